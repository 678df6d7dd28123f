//! Link abstraction: BER as a function of Eb/N0 for QPSK and 16-QAM,
//! its inverse, packet-level error rates and the slot data rate.

use crate::mcs::Modulation;
use crate::qfunc::{q_function, q_inverse};
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhyError {
    /// Target BER outside the invertible range for the modulation.
    BerOutOfRange,
}

impl fmt::Display for PhyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhyError::BerOutOfRange => write!(f, "BER outside invertible range for modulation"),
        }
    }
}

/// Uncoded BER at a given linear Eb/N0.
///
/// QPSK: `Q(sqrt(Eb/N0))`; 16-QAM: `(3/8) Q(sqrt(0.8 Eb/N0))`.
pub fn ber_from_ebn0(eb_n0_linear: f64, modulation: Modulation) -> f64 {
    match modulation {
        Modulation::Qpsk => q_function(libm::sqrt(eb_n0_linear)),
        Modulation::Qam16 => 0.375 * q_function(libm::sqrt(0.8 * eb_n0_linear)),
    }
}

/// Inverse of [`ber_from_ebn0`], returning a linear Eb/N0.
///
/// Errors when the target exceeds the zero-Eb/N0 ceiling (0.5 for QPSK,
/// 0.1875 for 16-QAM), which signals an infeasible reliability target.
pub fn ebn0_from_ber(ber: f64, modulation: Modulation) -> Result<f64, PhyError> {
    match modulation {
        Modulation::Qpsk => {
            if !(ber > 0.0 && ber < 0.5) {
                return Err(PhyError::BerOutOfRange);
            }
            let x = q_inverse(ber).map_err(|_| PhyError::BerOutOfRange)?;
            Ok(x * x)
        }
        Modulation::Qam16 => {
            if !(ber > 0.0 && ber < 0.1875) {
                return Err(PhyError::BerOutOfRange);
            }
            let x = q_inverse(ber * 8.0 / 3.0).map_err(|_| PhyError::BerOutOfRange)?;
            Ok(1.25 * x * x)
        }
    }
}

/// Packet error rate for `l_bits` independent bit errors:
/// `PER = 1 - (1 - BER)^L`.
pub fn per_from_ber(ber: f64, l_bits: u64) -> f64 {
    // ln1p/expm1 keep precision for tiny BER and large L.
    1.0 - libm::exp(l_bits as f64 * libm::log1p(-ber))
}

/// Exact inverse: `BER = 1 - PRR^(1/L)`.
pub fn ber_from_prr(prr: f64, l_bits: u64) -> f64 {
    -libm::expm1(libm::log(prr) / l_bits as f64)
}

/// Slot data rate: `R = 12 N_sub N_bits Rc SCS N_symbols` in bit/s.
///
/// `n_symbols` is fractional to allow DMRS overhead expressed as
/// `14 - dmrs_re/12` data symbols per slot.
pub fn data_rate_bps(
    n_sub_prb: u32,
    bits_per_symbol: u32,
    code_rate: f64,
    scs_hz: f64,
    n_symbols: f64,
) -> f64 {
    12.0 * n_sub_prb as f64 * bits_per_symbol as f64 * code_rate * scs_hz * n_symbols
}

/// Converts SINR to Eb/N0 in dB: `Eb/N0 = SINR + 10 log10(B/R)`.
///
/// `B` must be the bandwidth over which the SINR's noise term was
/// measured.
pub fn ebn0_from_sinr(sinr_db: f64, noise_bw_hz: f64, rate_bps: f64) -> f64 {
    sinr_db + 10.0 * libm::log10(noise_bw_hz / rate_bps)
}
