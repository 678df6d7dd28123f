//! Trend report over a completed sweep directory.
//!
//! Reads the three metric CSVs and evaluates the headline trends: PRR
//! monotone in transmit power, the 26-vs-23 dBm PRR gain at medium
//! density, attempt-count stability across power, the total-energy ratio,
//! and the critical-distance ordering. Each check renders as one
//! PASS/FAIL/SKIPPED row; SKIPPED means the sweep lacks the needed
//! points.

use crate::output::{DCOMM_CSV, ENERGY_CSV, PRR_CSV};
use anyhow::{Context, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "PASS"),
            CheckStatus::Fail => write!(f, "FAIL"),
            CheckStatus::Skipped => write!(f, "SKIPPED"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy)]
struct PrrRow {
    pt_dbm: f64,
    rho: f64,
    bin_low_m: f64,
    receptions: u64,
    prr: f64,
}

#[derive(Debug, Clone, Copy)]
struct EnergyRow {
    pt_dbm: f64,
    rho: f64,
    total_attempts: u64,
    total_joules: f64,
}

#[derive(Debug, Clone, Copy)]
struct DcommRow {
    pt_dbm: f64,
    v_kmh: f64,
    rho: f64,
    mean_m: f64,
}

/// Fixed-point key so f64 grid values can index BTree maps.
fn key(v: f64) -> i64 {
    (v * 100.0).round() as i64
}

fn parse_csv<T>(path: &Path, parse: impl Fn(&[&str]) -> Option<T>) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if let Some(row) = parse(&fields) {
            out.push(row);
        }
    }
    Ok(out)
}

fn f(s: &str) -> Option<f64> {
    s.parse().ok()
}

/// Bin-averaged PRR over bins with low edge < `up_to_m`, grouped by
/// (pt, rho).
fn mean_prr_by_point(rows: &[PrrRow], up_to_m: f64) -> BTreeMap<(i64, i64), f64> {
    let mut sums: BTreeMap<(i64, i64), (f64, u32)> = BTreeMap::new();
    for r in rows {
        if r.bin_low_m >= up_to_m || r.receptions == 0 {
            continue;
        }
        let e = sums.entry((key(r.pt_dbm), key(r.rho))).or_insert((0.0, 0));
        e.0 += r.prr;
        e.1 += 1;
    }
    sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

pub fn build_report(dir: &Path) -> Result<Vec<CheckRow>> {
    let prr_rows = parse_csv(&dir.join(PRR_CSV), |c| {
        Some(PrrRow {
            pt_dbm: f(c.get(1)?)?,
            rho: f(c.get(4)?)?,
            bin_low_m: f(c.get(6)?)?,
            receptions: c.get(8)?.parse().ok()?,
            prr: f(c.get(10)?)?,
        })
    })?;
    let energy_rows = parse_csv(&dir.join(ENERGY_CSV), |c| {
        Some(EnergyRow {
            pt_dbm: f(c.get(1)?)?,
            rho: f(c.get(2)?)?,
            total_attempts: c.get(3)?.parse().ok()?,
            total_joules: f(c.get(4)?)?,
        })
    })?;
    let dcomm_rows = parse_csv(&dir.join(DCOMM_CSV), |c| {
        Some(DcommRow {
            pt_dbm: f(c.get(1)?)?,
            v_kmh: f(c.get(2)?)?,
            rho: f(c.get(3)?)?,
            mean_m: f(c.get(5)?)?,
        })
    })?;

    let mut checks = Vec::new();
    let prr_means = mean_prr_by_point(&prr_rows, 375.0);
    let mut pts: Vec<i64> = prr_means.keys().map(|k| k.0).collect();
    pts.sort_unstable();
    pts.dedup();
    let mut rhos: Vec<i64> = prr_means.keys().map(|k| k.1).collect();
    rhos.sort_unstable();
    rhos.dedup();

    // PRR nondecreasing in transmit power at every density.
    for &rho in &rhos {
        let series: Vec<(i64, f64)> = pts
            .iter()
            .filter_map(|&pt| prr_means.get(&(pt, rho)).map(|&v| (pt, v)))
            .collect();
        let name = format!("prr_nondecreasing_in_pt rho={}", rho as f64 / 100.0);
        if series.len() < 2 {
            checks.push(CheckRow {
                name,
                status: CheckStatus::Skipped,
                detail: "needs >= 2 transmit powers".into(),
            });
            continue;
        }
        // Bin-averaged PRR is a noisy estimate; tolerate sub-noise dips.
        let tol = 0.01;
        let ok = series.windows(2).all(|w| w[1].1 >= w[0].1 - tol);
        let detail = series
            .iter()
            .map(|(pt, v)| format!("{}dBm:{:.3}", *pt as f64 / 100.0, v))
            .collect::<Vec<_>>()
            .join(" ");
        checks.push(CheckRow {
            name,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        });
    }

    // PRR gain 26 vs 23 dBm at density 50 of at least 0.02.
    let gain = match (prr_means.get(&(2600, 5000)), prr_means.get(&(2300, 5000))) {
        (Some(hi), Some(lo)) => Some(hi - lo),
        _ => None,
    };
    checks.push(match gain {
        Some(g) => CheckRow {
            name: "prr_gain_26_vs_23_dbm rho=50".into(),
            status: if g >= 0.02 { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: format!("delta={g:.4} (needs >= 0.02)"),
        },
        None => CheckRow {
            name: "prr_gain_26_vs_23_dbm rho=50".into(),
            status: CheckStatus::Skipped,
            detail: "needs pt 23 and 26 dBm at rho=50".into(),
        },
    });

    // Attempt counts roughly invariant in transmit power at each density.
    let mut by_rho: BTreeMap<i64, Vec<&EnergyRow>> = BTreeMap::new();
    for r in &energy_rows {
        by_rho.entry(key(r.rho)).or_default().push(r);
    }
    for (rho, rows) in &by_rho {
        let name = format!("attempts_stable_in_pt rho={}", *rho as f64 / 100.0);
        if rows.len() < 2 {
            checks.push(CheckRow {
                name,
                status: CheckStatus::Skipped,
                detail: "needs >= 2 transmit powers".into(),
            });
            continue;
        }
        let max = rows.iter().map(|r| r.total_attempts).max().unwrap() as f64;
        let min = rows.iter().map(|r| r.total_attempts).min().unwrap() as f64;
        let spread = (max - min) / max;
        checks.push(CheckRow {
            name,
            status: if spread < 0.10 { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: format!("spread={:.4} (needs < 0.10)", spread),
        });
    }

    // Total-energy ratio 26 dBm / 23 dBm at the densest point.
    let energy_at = |pt: f64, rho: f64| {
        energy_rows
            .iter()
            .find(|r| key(r.pt_dbm) == key(pt) && key(r.rho) == key(rho))
            .map(|r| r.total_joules)
    };
    let ratio = match (energy_at(26.0, 100.0), energy_at(23.0, 100.0)) {
        (Some(hi), Some(lo)) if lo > 0.0 => Some(hi / lo),
        _ => None,
    };
    checks.push(match ratio {
        Some(r) => CheckRow {
            name: "energy_ratio_26_vs_23_dbm rho=100".into(),
            status: if (1.7..=2.3).contains(&r) { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: format!("ratio={r:.4} (needs within [1.7, 2.3])"),
        },
        None => CheckRow {
            name: "energy_ratio_26_vs_23_dbm rho=100".into(),
            status: CheckStatus::Skipped,
            detail: "needs pt 23 and 26 dBm at rho=100".into(),
        },
    });

    // Critical distance decreasing in transmit power per (speed, density).
    let mut by_scenario: BTreeMap<(i64, i64), Vec<&DcommRow>> = BTreeMap::new();
    for r in &dcomm_rows {
        by_scenario.entry((key(r.v_kmh), key(r.rho))).or_default().push(r);
    }
    if by_scenario.is_empty() {
        checks.push(CheckRow {
            name: "dcomm_decreasing_in_pt".into(),
            status: CheckStatus::Skipped,
            detail: "no critical-distance rows".into(),
        });
    }
    for ((v, rho), mut rows) in by_scenario {
        let name = format!(
            "dcomm_decreasing_in_pt v={} rho={}",
            v as f64 / 100.0,
            rho as f64 / 100.0
        );
        rows.sort_by(|a, b| a.pt_dbm.partial_cmp(&b.pt_dbm).unwrap());
        if rows.len() < 2 {
            checks.push(CheckRow {
                name,
                status: CheckStatus::Skipped,
                detail: "needs >= 2 transmit powers".into(),
            });
            continue;
        }
        // Mean critical distance carries replication noise; tolerate
        // reversals within 5%.
        let ok = rows.windows(2).all(|w| w[1].mean_m <= w[0].mean_m * 1.05);
        let detail = rows
            .iter()
            .map(|r| format!("{}dBm:{:.2}m", r.pt_dbm, r.mean_m))
            .collect::<Vec<_>>()
            .join(" ");
        checks.push(CheckRow {
            name,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        });
    }

    Ok(checks)
}

/// Renders the check table.
pub fn render(checks: &[CheckRow]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
    let mut out = format!("{:<width$}  {:<7}  detail\n", "check", "status");
    for c in checks {
        out.push_str(&format!("{:<width$}  {:<7}  {}\n", c.name, c.status, c.detail));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_fixture(dir: &Path, prr: &str, energy: &str, dcomm: &str) {
        fs::write(dir.join(PRR_CSV), format!("h\n{prr}")).unwrap();
        fs::write(dir.join(ENERGY_CSV), format!("h\n{energy}")).unwrap();
        fs::write(dir.join(DCOMM_CSV), format!("h\n{dcomm}")).unwrap();
    }

    #[test]
    fn passing_fixture_reports_all_pass() {
        let tmp = tempfile::tempdir().unwrap();
        let mut prr = String::new();
        for (pt, base) in [(23.0, 0.80), (26.0, 0.90)] {
            for rho in [50.0, 100.0] {
                prr.push_str(&format!(
                    "fp,{pt:.2},30,8,{rho:.2},50.00,0.0,25.0,100,90,{base:.6}\n"
                ));
            }
        }
        let energy = "fp,23.00,100.00,1000,1.000000000,0.01\n\
                      fp,26.00,100.00,1020,1.995262315,0.02\n";
        let dcomm = "fp,23.00,50.00,100.00,10.0,5.0,0.0\n\
                     fp,26.00,50.00,100.00,8.0,4.0,0.0\n";
        write_fixture(tmp.path(), &prr, energy, dcomm);
        let checks = build_report(tmp.path()).unwrap();
        assert!(!checks.is_empty());
        for c in &checks {
            assert_eq!(c.status, CheckStatus::Pass, "{}: {}", c.name, c.detail);
        }
        let rendered = render(&checks);
        assert!(rendered.contains("PASS"));
    }

    #[test]
    fn missing_points_are_skipped_and_regressions_fail() {
        let tmp = tempfile::tempdir().unwrap();
        // PRR decreasing in pt at rho=30 (beyond tolerance) -> FAIL;
        // rho=50 pair missing -> the gain check SKIPPED.
        let prr = "fp,23.00,30,8,30.00,50.00,0.0,25.0,100,90,0.900000\n\
                   fp,26.00,30,8,30.00,50.00,0.0,25.0,100,40,0.400000\n";
        write_fixture(tmp.path(), prr, "", "");
        let checks = build_report(tmp.path()).unwrap();
        let get = |name: &str| {
            checks
                .iter()
                .find(|c| c.name.starts_with(name))
                .unwrap_or_else(|| panic!("missing {name}"))
        };
        assert_eq!(get("prr_nondecreasing_in_pt rho=30").status, CheckStatus::Fail);
        assert_eq!(get("prr_gain_26_vs_23_dbm").status, CheckStatus::Skipped);
        assert_eq!(get("energy_ratio_26_vs_23_dbm").status, CheckStatus::Skipped);
        assert_eq!(get("dcomm_decreasing_in_pt").status, CheckStatus::Skipped);
    }
}
