//! Closed-form link-level and energy models for NR sidelink V2X
//! connected braking.
//!
//! This crate holds the pure math shared by the simulator and the
//! analytic oracle:
//!
//! - unit conversions ([`units`])
//! - Gaussian tail Q-function and its inverse ([`qfunc`])
//! - rural LOS pathloss, correlated shadowing step, noise, ICI and
//!   SINR ([`channel`])
//! - BER/PER/rate link abstraction for QPSK and 16-QAM ([`phy`])
//! - MCS table ([`mcs`])
//! - critical-distance and truncated-HARQ energy formulas ([`analytic`])
//!
//! Everything here is `no_std` compatible and allocation free; the
//! `sidelink-sim` crate layers IO, RNG and the discrete-time engine on
//! top.

#![cfg_attr(not(test), no_std)]

pub mod analytic;
pub mod channel;
pub mod mcs;
pub mod phy;
pub mod qfunc;
pub mod units;

pub use analytic::{d_comm, dbm_to_watts, e_total, expected_attempts, DcommInput, EnergyInput};
pub use channel::{ici_ratio, noise_power_dbm, pathloss_db, shadowing_step, sinr_db, sinr_db_linear};
pub use mcs::{McsEntry, Modulation, DEFAULT_MCS_TABLE};
pub use phy::{
    ber_from_ebn0, ber_from_prr, data_rate_bps, ebn0_from_ber, ebn0_from_sinr, per_from_ber,
};
pub use qfunc::{q_function, q_inverse};
