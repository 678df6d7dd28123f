//! Discrete-time simulator for NR sidelink V2X connected braking in
//! rural LOS scenarios.
//!
//! Binds the pure link/energy math from `sidelink-core` to a slot-driven
//! replication loop: vehicle mobility on a ring road, per-link correlated
//! shadowing, sensing-based semi-persistent resource selection, blind
//! HARQ retransmissions and distance-binned reception metrics.

pub mod config;
pub mod engine;
pub mod mac;
pub mod metrics;
pub mod mobility;
pub mod output;
pub mod report;
pub mod rngs;
pub mod sweep;

pub use config::ScenarioConfig;
pub use engine::{run_replication, run_scenario};
pub use metrics::MetricsAccumulator;
