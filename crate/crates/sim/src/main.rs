//! Command-line front door: closed-form calculations, single simulation
//! runs, parameter sweeps and trend reports.
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 runtime
//! error, 3 failed trend check under `report --strict`.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sidelink_core::analytic::{
    d_comm, dbm_to_watts, e_total, expected_attempts, required_ebn0_db_for_prr, DcommInput,
    EnergyInput,
};
use sidelink_core::mcs::DEFAULT_MCS_TABLE;
use sidelink_sim::config::{ConfigError, ScenarioConfig, SweepPoint};
use sidelink_sim::engine::{run_replication_traced, run_scenario_seeded, Trace};
use sidelink_sim::metrics::MetricsAccumulator;
use sidelink_sim::output::{
    write_attempt_ledger, write_vehicle_trace, SweepOutputs, MANIFEST,
};
use sidelink_sim::report::{build_report, render, CheckStatus};
use sidelink_sim::sweep::{apply_baseline_grid_base, baseline_grid_axes, run_sweep};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Environment variable naming the default parent of run directories.
const OUT_DIR_ENV: &str = "SIDELINK_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "sidelink-sim",
    about = "NR sidelink V2X connected-braking simulator and analytic oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonConfig {
    /// Scenario config file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value overrides applied after the file, before validation.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; default is a timestamped directory under
    /// $SIDELINK_OUT_DIR (or ./runs).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form critical distance, expected attempts and energy.
    Analytic {
        #[command(flatten)]
        common: CommonConfig,
        /// Packet receive ratio the formulas are evaluated at.
        #[arg(long, default_value_t = 0.9)]
        prr: f64,
        /// Delivered-packet count N of the critical-distance formula.
        #[arg(long, default_value_t = 1000.0)]
        n_packets: f64,
        /// Emit a CSV grid over PRR x transmit power instead of a summary.
        #[arg(long)]
        grid: bool,
    },
    /// Run one scenario point and write the metric CSVs.
    Simulate {
        #[command(flatten)]
        common: CommonConfig,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Also dump the attempt ledger (ledger.csv).
        #[arg(long)]
        ledger: bool,
        /// Also dump a vehicle trace (vehicle_trace.csv).
        #[arg(long)]
        trace_vehicles: bool,
    },
    /// Run a sweep over one or more axes.
    Sweep {
        #[command(flatten)]
        common: CommonConfig,
        /// Sweep axis as field=v1,v2,... (repeatable).
        #[arg(long = "axis", value_name = "FIELD=V1,V2,...")]
        axes: Vec<String>,
        /// Built-in preset grid (pt 23-26 dBm x rho 30/50/80/100).
        #[arg(long)]
        preset: Option<String>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate trend checks over a completed sweep directory.
    Report {
        /// Sweep output directory.
        #[arg(long)]
        dir: PathBuf,
        /// Exit 3 when any check fails.
        #[arg(long)]
        strict: bool,
        /// Skipped checks (missing points) do not affect the exit code.
        #[arg(long)]
        allow_partial: bool,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analytic { common, prr, n_packets, grid } => {
            cmd_analytic(&common, prr, n_packets, grid)
        }
        Command::Simulate { common, seed, ledger, trace_vehicles } => {
            cmd_simulate(&common, seed, ledger, trace_vehicles)
        }
        Command::Sweep { common, axes, preset, seed } => cmd_sweep(&common, &axes, preset, seed),
        Command::Report { dir, strict, allow_partial } => {
            return match cmd_report(&dir, strict, allow_partial) {
                Ok(code) => code,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    2
                }
            };
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

fn load_config(common: &CommonConfig) -> Result<ScenarioConfig> {
    let cfg = match &common.config {
        Some(path) => ScenarioConfig::load(path, &common.set)?,
        None => ScenarioConfig::from_toml_str("", &common.set)?,
    };
    Ok(cfg)
}

/// Output directory: `--out` verbatim, otherwise a per-run timestamped
/// directory under $SIDELINK_OUT_DIR (default ./runs).
fn resolve_out_dir(common: &CommonConfig, label: &str) -> PathBuf {
    if let Some(dir) = &common.out {
        return dir.clone();
    }
    let parent = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    parent.join(format!("{stamp}-{label}"))
}

fn cmd_analytic(common: &CommonConfig, prr: f64, n_packets: f64, grid: bool) -> Result<()> {
    let cfg = load_config(common)?;
    let mcs = cfg.mcs_resolved()?;
    let rate = cfg.data_rate_bps_with(mcs);
    let v_ms = cfg.mean_speed_kmh / 3.6;
    let l_bits = cfg.packet_bits() as f64;

    if grid {
        println!("prr,pt_dbm,d_comm_m,expected_attempts,e_total_j,required_ebn0_db");
        for prr_pct in (5..100).step_by(5) {
            let prr = prr_pct as f64 / 100.0;
            let ebn0 = required_ebn0_db_for_prr(prr, cfg.packet_bits(), mcs.modulation)
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|e| format!("infeasible ({e})"));
            for pt in [23.0, 24.0, 25.0, 26.0] {
                let d = d_comm(DcommInput { n_packets, speed_ms: v_ms, pps: cfg.pps, prr })
                    .map_err(|e| anyhow::anyhow!("d_comm: {e}"))?;
                let e = e_total(EnergyInput {
                    n_packets,
                    pt_watts: dbm_to_watts(pt),
                    l_bits,
                    rate_bps: rate,
                    h_attempts: cfg.harq_max_attempts,
                    prr,
                })
                .map_err(|e| anyhow::anyhow!("e_total: {e}"))?;
                println!(
                    "{prr:.2},{pt:.2},{d:.4},{:.6},{e:.9},{ebn0}",
                    expected_attempts(prr, cfg.harq_max_attempts)
                );
            }
        }
        return Ok(());
    }

    let d = d_comm(DcommInput { n_packets, speed_ms: v_ms, pps: cfg.pps, prr })
        .map_err(|e| anyhow::anyhow!("d_comm: {e}"))?;
    let attempts = expected_attempts(prr, cfg.harq_max_attempts);
    let energy = e_total(EnergyInput {
        n_packets,
        pt_watts: dbm_to_watts(cfg.pt_dbm),
        l_bits,
        rate_bps: rate,
        h_attempts: cfg.harq_max_attempts,
        prr,
    })
    .map_err(|e| anyhow::anyhow!("e_total: {e}"))?;
    println!("prr                    = {prr}");
    println!("n_packets (N)          = {n_packets}");
    println!("speed                  = {:.2} km/h", cfg.mean_speed_kmh);
    println!("data_rate              = {rate:.0} bit/s");
    println!("d_comm                 = {d:.4} m");
    println!("expected_attempts      = {attempts:.6}");
    println!("e_total                = {energy:.9} J");
    println!("required Eb/N0 at this PRR, per MCS:");
    for entry in DEFAULT_MCS_TABLE {
        match required_ebn0_db_for_prr(prr, cfg.packet_bits(), entry.modulation) {
            Ok(db) => println!("  mcs {:>2} ({}): {db:.4} dB", entry.index, entry.modulation),
            Err(e) => println!("  mcs {:>2} ({}): {e}", entry.index, entry.modulation),
        }
    }
    Ok(())
}

fn cmd_simulate(
    common: &CommonConfig,
    seed: Option<u64>,
    ledger: bool,
    trace_vehicles: bool,
) -> Result<()> {
    let cfg = load_config(common)?;
    let seed = seed.unwrap_or(cfg.master_seed);
    let dir = resolve_out_dir(common, "simulate");
    let outputs = SweepOutputs::open(&dir)?;
    let point = SweepPoint { index: 0, config: cfg.clone(), seed };

    let metrics: MetricsAccumulator = if ledger || trace_vehicles {
        // Traced runs execute replications serially so trace rows land in
        // replication order.
        let mut merged: Option<MetricsAccumulator> = None;
        let mut all_attempts = Vec::new();
        let mut all_vehicles = Vec::new();
        for rep in 0..cfg.replications {
            let mut trace = Trace {
                attempts: ledger.then(Vec::new),
                vehicles: trace_vehicles.then(Vec::new),
            };
            let m = run_replication_traced(&cfg, seed, rep, &mut trace)?;
            if let Some(a) = trace.attempts {
                all_attempts.extend(a);
            }
            if let Some(v) = trace.vehicles {
                all_vehicles.extend(v);
            }
            match &mut merged {
                None => merged = Some(m),
                Some(acc) => acc.merge(&m),
            }
        }
        if ledger {
            write_attempt_ledger(&dir.join("ledger.csv"), &all_attempts)?;
        }
        if trace_vehicles {
            write_vehicle_trace(&dir.join("vehicle_trace.csv"), &all_vehicles)?;
        }
        merged.context("at least one replication")?
    } else {
        run_scenario_seeded(&cfg, seed)?
    };

    outputs.append_point(&point, Ok(&metrics))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn parse_axes(raw: &[String]) -> Result<Vec<(String, Vec<f64>)>> {
    raw.iter()
        .map(|spec| {
            let (field, values) = spec
                .split_once('=')
                .with_context(|| format!("malformed axis '{spec}', expected field=v1,v2"))?;
            let values = values
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .with_context(|| format!("axis '{spec}' has a non-numeric value"))?;
            Ok((field.trim().to_string(), values))
        })
        .collect()
}

fn cmd_sweep(
    common: &CommonConfig,
    axes: &[String],
    preset: Option<String>,
    seed: Option<u64>,
) -> Result<()> {
    let mut cfg = load_config(common)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let axes = match preset.as_deref() {
        Some("baseline-grid") => {
            apply_baseline_grid_base(&mut cfg);
            cfg.validate()?;
            baseline_grid_axes()
        }
        Some(other) => anyhow::bail!("unknown preset '{other}' (available: baseline-grid)"),
        None => parse_axes(axes)?,
    };
    let dir = resolve_out_dir(common, "sweep");
    let summary = run_sweep(&cfg, &axes, &dir)?;
    println!(
        "sweep: {} points, {} completed, {} skipped (already done), {} failed",
        summary.total, summary.completed, summary.skipped, summary.failed
    );
    println!("wrote {}", dir.join(MANIFEST).display());
    if summary.failed > 0 {
        anyhow::bail!("{} sweep points failed (see manifest)", summary.failed);
    }
    Ok(())
}

fn cmd_report(dir: &Path, strict: bool, allow_partial: bool) -> Result<i32> {
    let checks = build_report(dir)?;
    print!("{}", render(&checks));
    let any_fail = checks.iter().any(|c| c.status == CheckStatus::Fail);
    let any_skip = checks.iter().any(|c| c.status == CheckStatus::Skipped);
    if strict && any_fail {
        return Ok(3);
    }
    if any_skip && !allow_partial {
        return Ok(1);
    }
    Ok(0)
}
