//! Sweep execution: expands axes over a base config and runs every point,
//! appending CSV rows and manifest entries as each point completes.
//!
//! Points run sequentially in index order so output files are
//! byte-reproducible; the replications inside each point run in parallel.
//! A failed point is recorded in the manifest and the sweep continues.
//! Re-running into the same directory skips fingerprints already marked
//! ok, which resumes an interrupted sweep.

use crate::config::{expand_sweep, ScenarioConfig};
use crate::engine::run_scenario_seeded;
use crate::output::SweepOutputs;
use anyhow::Result;
use std::path::Path;

/// Built-in preset: transmit power 23-26 dBm crossed with density
/// 30/50/80/100 vehicles per km, at SCS 30, MCS 8 and 50 km/h.
pub fn baseline_grid_axes() -> Vec<(String, Vec<f64>)> {
    vec![
        ("pt_dbm".to_string(), vec![23.0, 24.0, 25.0, 26.0]),
        ("density_rho".to_string(), vec![30.0, 50.0, 80.0, 100.0]),
    ]
}

/// Applies the preset's fixed parameters to a base config.
pub fn apply_baseline_grid_base(cfg: &mut ScenarioConfig) {
    cfg.scs_khz = 30;
    cfg.dmrs_re_per_slot = Some(18);
    cfg.mcs_index = 8;
    cfg.mean_speed_kmh = 50.0;
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub total: usize,
    pub completed: usize,
    pub skipped: usize,
    pub failed: usize,
}

pub fn run_sweep(
    base: &ScenarioConfig,
    axes: &[(String, Vec<f64>)],
    dir: &Path,
) -> Result<SweepSummary> {
    let points = expand_sweep(base, axes)?;
    let outputs = SweepOutputs::open(dir)?;
    let done = outputs.completed_fingerprints()?;
    let mut summary = SweepSummary { total: points.len(), ..Default::default() };
    for point in &points {
        if done.contains(&point.config.fingerprint()) {
            summary.skipped += 1;
            continue;
        }
        match run_scenario_seeded(&point.config, point.seed) {
            Ok(metrics) => {
                outputs.append_point(point, Ok(&metrics))?;
                summary.completed += 1;
            }
            Err(e) => {
                outputs.append_point(point, Err(&e))?;
                summary.failed += 1;
            }
        }
    }
    Ok(summary)
}
