//! CSV and manifest emission for simulate/sweep runs.
//!
//! Fixed column orders and fixed float formatting keep re-runs with the
//! same seed byte-identical. The manifest carries one entry per sweep
//! point (fingerprint, parameters, status) and lets an interrupted sweep
//! resume by skipping fingerprints already marked ok.

use crate::config::{ScenarioConfig, SweepPoint};
use crate::engine::{AttemptRecord, VehicleSample};
use crate::metrics::{measured_d_comm, MetricsAccumulator};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const PRR_CSV: &str = "prr_by_distance.csv";
pub const DCOMM_CSV: &str = "dcomm.csv";
pub const ENERGY_CSV: &str = "energy.csv";
pub const MANIFEST: &str = "manifest.toml";

const PRR_HEADER: &str = "scenario_fingerprint,pt_dbm,scs_khz,mcs,rho,v_kmh,bin_low_m,bin_high_m,receptions,successes,prr";
const DCOMM_HEADER: &str =
    "scenario_fingerprint,pt_dbm,v_kmh,rho,dcomm_p99_m,dcomm_mean_m,censored_fraction";
const ENERGY_HEADER: &str =
    "scenario_fingerprint,pt_dbm,rho,total_attempts,total_joules,joules_per_delivered";

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    index: usize,
    fingerprint: String,
    seed: u64,
    status: String,
    files: Vec<String>,
    config: ScenarioConfig,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct ManifestDoc {
    #[serde(default)]
    points: Vec<ManifestEntry>,
}

/// A sweep output directory holding the three metric CSVs and the
/// manifest. Opening creates the directory and CSV headers when absent.
pub struct SweepOutputs {
    dir: PathBuf,
}

impl SweepOutputs {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        for (name, header) in [
            (PRR_CSV, PRR_HEADER),
            (DCOMM_CSV, DCOMM_HEADER),
            (ENERGY_CSV, ENERGY_HEADER),
        ] {
            let path = dir.join(name);
            if !path.exists() {
                fs::write(&path, format!("{header}\n"))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Ok(SweepOutputs { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Fingerprints of points the manifest already marks ok.
    pub fn completed_fingerprints(&self) -> Result<HashSet<String>> {
        Ok(self
            .read_manifest()?
            .points
            .into_iter()
            .filter(|p| p.status == "ok")
            .map(|p| p.fingerprint)
            .collect())
    }

    fn read_manifest(&self) -> Result<ManifestDoc> {
        let path = self.dir.join(MANIFEST);
        if !path.exists() {
            return Ok(ManifestDoc::default());
        }
        let text = fs::read_to_string(&path)?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn append_manifest(&self, entry: ManifestEntry) -> Result<()> {
        let doc = ManifestDoc { points: vec![entry] };
        let block = toml::to_string(&doc).context("serializing manifest entry")?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join(MANIFEST))?;
        f.write_all(block.as_bytes())?;
        Ok(())
    }

    /// Books one completed (or failed) sweep point: appends its CSV rows
    /// when metrics are available and records status in the manifest.
    pub fn append_point(
        &self,
        point: &SweepPoint,
        outcome: std::result::Result<&MetricsAccumulator, &anyhow::Error>,
    ) -> Result<()> {
        let (status, files) = match outcome {
            Ok(metrics) => {
                self.append_csv(PRR_CSV, &prr_rows(&point.config, metrics))?;
                self.append_csv(DCOMM_CSV, &dcomm_rows(&point.config, metrics))?;
                self.append_csv(ENERGY_CSV, &energy_rows(&point.config, metrics))?;
                (
                    "ok".to_string(),
                    vec![PRR_CSV.into(), DCOMM_CSV.into(), ENERGY_CSV.into()],
                )
            }
            Err(e) => (format!("failed: {e:#}"), Vec::new()),
        };
        self.append_manifest(ManifestEntry {
            index: point.index,
            fingerprint: point.config.fingerprint(),
            seed: point.seed,
            status,
            files,
            config: point.config.clone(),
        })
    }

    fn append_csv(&self, name: &str, rows: &[String]) -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let mut f = OpenOptions::new().append(true).open(self.dir.join(name))?;
        for row in rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// One row per populated distance bin; empty bins are omitted, never
/// written as PRR 0.
pub fn prr_rows(cfg: &ScenarioConfig, m: &MetricsAccumulator) -> Vec<String> {
    let fp = cfg.fingerprint();
    m.bins
        .iter()
        .enumerate()
        .filter_map(|(i, b)| {
            let prr = b.prr()?;
            let low = i as f64 * m.bin_width_m;
            Some(format!(
                "{fp},{:.2},{},{},{:.2},{:.2},{:.1},{:.1},{},{},{:.6}",
                cfg.pt_dbm,
                cfg.scs_khz,
                cfg.mcs_index,
                cfg.density_rho,
                cfg.mean_speed_kmh,
                low,
                low + m.bin_width_m,
                b.receptions,
                b.successes,
                prr,
            ))
        })
        .collect()
}

/// One row per point; omitted entirely when no delivery delays were
/// observed (e.g. zero vehicles).
pub fn dcomm_rows(cfg: &ScenarioConfig, m: &MetricsAccumulator) -> Vec<String> {
    let v_ms = cfg.mean_speed_kmh / 3.6;
    let Some(stats) = measured_d_comm(
        &m.delay_samples_slots,
        m.censored_deliveries,
        v_ms,
        cfg.slot_duration_s(),
    ) else {
        return Vec::new();
    };
    vec![format!(
        "{},{:.2},{:.2},{:.2},{:.3},{:.3},{:.6}",
        cfg.fingerprint(),
        cfg.pt_dbm,
        cfg.mean_speed_kmh,
        cfg.density_rho,
        stats.p99_m,
        stats.mean_m,
        stats.censored_fraction,
    )]
}

pub fn energy_rows(cfg: &ScenarioConfig, m: &MetricsAccumulator) -> Vec<String> {
    let joules_per_delivered = if m.delivered_packets > 0 {
        format!("{:.9}", m.total_energy_joules / m.delivered_packets as f64)
    } else {
        String::new()
    };
    vec![format!(
        "{},{:.2},{:.2},{},{:.9},{}",
        cfg.fingerprint(),
        cfg.pt_dbm,
        cfg.density_rho,
        m.total_attempts,
        m.total_energy_joules,
        joules_per_delivered,
    )]
}

/// Attempt ledger: one row per transmission attempt with per-receiver
/// outcomes packed as `rx:0/1` pairs separated by `;`.
pub fn write_attempt_ledger(path: &Path, records: &[AttemptRecord]) -> Result<()> {
    let mut out = String::from(
        "replication,tx,packet_gen_slot,attempt,slot,subchannel_start,outcomes\n",
    );
    for r in records {
        let outcomes: Vec<String> = r
            .outcomes
            .iter()
            .map(|(rx, ok)| format!("{rx}:{}", u8::from(*ok)))
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.replication,
            r.tx,
            r.gen_slot,
            r.attempt,
            r.slot,
            r.subchannel_start,
            outcomes.join(";"),
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Vehicle trace: one row per (sample time, vehicle).
pub fn write_vehicle_trace(path: &Path, samples: &[VehicleSample]) -> Result<()> {
    let mut out = String::from("t_s,id,x_m,lane,speed_ms\n");
    for s in samples {
        out.push_str(&format!(
            "{:.4},{},{:.3},{},{:.3}\n",
            s.t_s, s.id, s.x_m, s.lane, s.speed_ms
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}
