//! Distance-binned PRR counters, first-success delays for the critical
//! distance, and attempt/energy totals.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct BinCounter {
    pub receptions: u64,
    pub successes: u64,
    /// Sum of analog packet error probabilities, for the law-of-large-
    /// numbers cross check against the Bernoulli outcomes.
    pub per_sum: f64,
}

impl BinCounter {
    /// PRR of the bin; `None` when no receptions landed in it.
    pub fn prr(&self) -> Option<f64> {
        if self.receptions == 0 {
            None
        } else {
            Some(self.successes as f64 / self.receptions as f64)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MetricsAccumulator {
    pub bin_width_m: f64,
    pub bins: Vec<BinCounter>,
    /// Receptions outside [0, max_eval_distance), dropped but counted.
    pub dropped_receptions: u64,

    pub total_attempts: u64,
    pub total_energy_joules: f64,
    pub rsu_attempts: u64,
    pub rsu_energy_joules: f64,
    /// Packets (any transmitter) decoded by at least one receiver.
    pub delivered_packets: u64,
    pub generated_packets: u64,

    /// First-success delays in slots for RSU->vehicle deliveries,
    /// censored entries included at the horizon value.
    pub delay_samples_slots: Vec<u64>,
    pub censored_deliveries: u64,
    pub replications: u32,
}

impl MetricsAccumulator {
    pub fn new(bin_width_m: f64, max_eval_distance_m: f64) -> Self {
        let n_bins = (max_eval_distance_m / bin_width_m).ceil() as usize;
        MetricsAccumulator {
            bin_width_m,
            bins: vec![BinCounter::default(); n_bins],
            replications: 1,
            ..Default::default()
        }
    }

    pub fn record_reception(&mut self, distance_m: f64, success: bool, analog_per: f64) {
        let bin = (distance_m / self.bin_width_m).floor();
        if bin < 0.0 || bin as usize >= self.bins.len() {
            self.dropped_receptions += 1;
            return;
        }
        let b = &mut self.bins[bin as usize];
        b.receptions += 1;
        if success {
            b.successes += 1;
        }
        b.per_sum += analog_per;
    }

    pub fn record_attempt(&mut self, is_rsu: bool, energy_joules: f64) {
        self.total_attempts += 1;
        self.total_energy_joules += energy_joules;
        if is_rsu {
            self.rsu_attempts += 1;
            self.rsu_energy_joules += energy_joules;
        }
    }

    pub fn record_delivery_delay(&mut self, delay_slots: u64, censored: bool) {
        self.delay_samples_slots.push(delay_slots);
        if censored {
            self.censored_deliveries += 1;
        }
    }

    /// Associative, commutative merge for cross-replication aggregation.
    pub fn merge(&mut self, other: &MetricsAccumulator) {
        assert_eq!(self.bins.len(), other.bins.len());
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            a.receptions += b.receptions;
            a.successes += b.successes;
            a.per_sum += b.per_sum;
        }
        self.dropped_receptions += other.dropped_receptions;
        self.total_attempts += other.total_attempts;
        self.total_energy_joules += other.total_energy_joules;
        self.rsu_attempts += other.rsu_attempts;
        self.rsu_energy_joules += other.rsu_energy_joules;
        self.delivered_packets += other.delivered_packets;
        self.generated_packets += other.generated_packets;
        self.delay_samples_slots.extend_from_slice(&other.delay_samples_slots);
        self.censored_deliveries += other.censored_deliveries;
        self.replications += other.replications;
    }

    /// Bin-count-weighted mean PRR over bins whose low edge lies in
    /// [0, up_to_m). Bins without receptions are excluded.
    pub fn mean_prr_up_to(&self, up_to_m: f64) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (i, b) in self.bins.iter().enumerate() {
            if (i as f64) * self.bin_width_m >= up_to_m {
                break;
            }
            if let Some(p) = b.prr() {
                sum += p;
                n += 1;
            }
        }
        if n == 0 {
            None
        } else {
            Some(sum / n as f64)
        }
    }
}

/// Measured critical-distance summary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DcommStats {
    pub p99_m: f64,
    pub mean_m: f64,
    pub censored_fraction: f64,
    pub samples: usize,
}

/// Converts first-success delays (slots) to travel distances at speed
/// `v_ms` and summarizes them: worst-case-oriented 99th percentile plus
/// the mean variant for comparison against the closed-form lemma.
pub fn measured_d_comm(
    delays_slots: &[u64],
    censored: u64,
    v_ms: f64,
    slot_s: f64,
) -> Option<DcommStats> {
    if delays_slots.is_empty() {
        return None;
    }
    let mut sorted: Vec<u64> = delays_slots.to_vec();
    sorted.sort_unstable();
    let q_index = ((sorted.len() as f64 * 0.99).ceil() as usize).clamp(1, sorted.len()) - 1;
    let p99 = sorted[q_index] as f64 * slot_s * v_ms;
    let mean = sorted.iter().map(|&d| d as f64).sum::<f64>() / sorted.len() as f64 * slot_s * v_ms;
    Some(DcommStats {
        p99_m: p99,
        mean_m: mean,
        censored_fraction: censored as f64 / sorted.len() as f64,
        samples: sorted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_prr_ratio() {
        let mut acc = MetricsAccumulator::new(25.0, 500.0);
        for _ in 0..3 {
            acc.record_reception(30.0, true, 0.1);
        }
        acc.record_reception(30.0, false, 0.1);
        assert_eq!(acc.bins[1].prr(), Some(0.75));
    }

    #[test]
    fn empty_bin_reports_absent() {
        let acc = MetricsAccumulator::new(25.0, 500.0);
        assert_eq!(acc.bins[0].prr(), None);
        assert_eq!(acc.mean_prr_up_to(375.0), None);
    }

    #[test]
    fn out_of_range_reception_dropped_and_counted() {
        let mut acc = MetricsAccumulator::new(25.0, 500.0);
        acc.record_reception(600.0, true, 0.0);
        acc.record_reception(-1.0, true, 0.0);
        assert_eq!(acc.dropped_receptions, 2);
        assert_eq!(acc.bins.iter().map(|b| b.receptions).sum::<u64>(), 0);
    }

    #[test]
    fn merge_is_associative_and_commutative() {
        let mk = |seed: u64| {
            let mut acc = MetricsAccumulator::new(25.0, 500.0);
            for i in 0..seed * 5 {
                acc.record_reception((i % 20) as f64 * 24.0, i % 3 == 0, 0.2);
                acc.record_attempt(i % 2 == 0, 1e-5);
            }
            acc.record_delivery_delay(seed, false);
            acc
        };
        let (a, b, c) = (mk(1), mk(2), mk(3));
        let mut left = a.clone();
        let mut bc = b.clone();
        bc.merge(&c);
        left.merge(&bc);
        let mut right = a.clone();
        right.merge(&b);
        right.merge(&c);
        assert_eq!(left.total_attempts, right.total_attempts);
        assert_eq!(left.total_energy_joules, right.total_energy_joules);
        for (x, y) in left.bins.iter().zip(&right.bins) {
            assert_eq!(x.receptions, y.receptions);
            assert_eq!(x.successes, y.successes);
        }
        let mut ba = b.clone();
        ba.merge(&a);
        let mut ab = a.clone();
        ab.merge(&b);
        assert_eq!(ab.total_attempts, ba.total_attempts);
    }

    #[test]
    fn dcomm_degenerate_delays() {
        // 10 slots at 0.5 ms, v = 13.89 m/s -> 0.0694 m for every packet.
        let delays = vec![10u64; 100];
        let s = measured_d_comm(&delays, 0, 13.89, 0.0005).unwrap();
        assert!((s.mean_m - 0.069_45).abs() < 1e-9);
        assert!((s.p99_m - 0.069_45).abs() < 1e-9);
        assert_eq!(s.censored_fraction, 0.0);
    }

    #[test]
    fn dcomm_linear_in_speed() {
        let delays: Vec<u64> = (0..100).collect();
        let a = measured_d_comm(&delays, 0, 10.0, 0.001).unwrap();
        let b = measured_d_comm(&delays, 0, 20.0, 0.001).unwrap();
        assert!((b.mean_m - 2.0 * a.mean_m).abs() < 1e-12);
        assert!((b.p99_m - 2.0 * a.p99_m).abs() < 1e-12);
    }

    #[test]
    fn dcomm_empty_is_none() {
        assert!(measured_d_comm(&[], 0, 10.0, 0.001).is_none());
    }

    #[test]
    fn energy_accounting_exact() {
        let mut acc = MetricsAccumulator::new(25.0, 500.0);
        let e = 0.2 * 2800.0 / 1e7;
        acc.record_attempt(true, e);
        assert!((acc.total_energy_joules - 5.6e-5).abs() < 1e-18);
        assert_eq!(acc.total_attempts, 1);
        // Raising Pt 23 -> 26 dBm scales energy by exactly 10^0.3.
        let scale = 10f64.powf(0.3);
        let mut acc2 = MetricsAccumulator::new(25.0, 500.0);
        acc2.record_attempt(true, e * scale);
        assert!((acc2.total_energy_joules / acc.total_energy_joules - scale).abs() < 1e-12);
    }
}
