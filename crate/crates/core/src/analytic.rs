//! Closed-form oracle for the safety-critical communication distance and
//! the truncated-HARQ transmit energy, including both limit regimes
//! (single attempt, unlimited retransmissions).

use crate::mcs::Modulation;
use crate::phy::{ber_from_prr, ebn0_from_ber, PhyError};
use crate::units::linear_to_db;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticError {
    /// Packet rate must be strictly positive.
    ZeroPacketRate,
    /// Data rate must be strictly positive.
    ZeroDataRate,
    /// PRR target cannot be met by the modulation (BER above ceiling).
    InfeasiblePrrTarget,
    /// An input violated its positivity/range invariant.
    InvalidInput,
}

impl fmt::Display for AnalyticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticError::ZeroPacketRate => write!(f, "pps must be > 0"),
            AnalyticError::ZeroDataRate => write!(f, "data rate must be > 0"),
            AnalyticError::InfeasiblePrrTarget => {
                write!(f, "PRR target infeasible for this modulation")
            }
            AnalyticError::InvalidInput => write!(f, "input out of range"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DcommInput {
    /// Total number of delivered packets.
    pub n_packets: f64,
    /// Ego speed in m/s.
    pub speed_ms: f64,
    /// Packet generation rate in packets/s.
    pub pps: f64,
    /// Packet receive ratio in [0, 1].
    pub prr: f64,
}

/// Critical distance: `D_comm = N v / pps * (1 - PRR)`.
pub fn d_comm(input: DcommInput) -> Result<f64, AnalyticError> {
    if input.pps <= 0.0 {
        return Err(AnalyticError::ZeroPacketRate);
    }
    if input.n_packets < 0.0 || input.speed_ms < 0.0 || !(0.0..=1.0).contains(&input.prr) {
        return Err(AnalyticError::InvalidInput);
    }
    Ok(input.n_packets * input.speed_ms / input.pps * (1.0 - input.prr))
}

/// Expected attempts per packet under truncated HARQ:
/// `E[min(K, H)] = (1 - (1 - PRR)^H) / PRR`.
///
/// At `prr = 0` the limit value `H` is returned rather than an error so
/// sweeps can touch empty-success bins.
pub fn expected_attempts(prr: f64, h_attempts: u32) -> f64 {
    debug_assert!((0.0..=1.0).contains(&prr));
    debug_assert!(h_attempts >= 1);
    if prr == 0.0 {
        return h_attempts as f64;
    }
    // (1 - (1-prr)^H) / prr, stable for tiny prr via expm1/log1p.
    -libm::expm1(h_attempts as f64 * libm::log1p(-prr)) / prr
}

#[derive(Debug, Clone, Copy)]
pub struct EnergyInput {
    /// Generated packet count over the horizon (pps * T).
    pub n_packets: f64,
    /// Transmit power in watts.
    pub pt_watts: f64,
    /// Payload length in bits.
    pub l_bits: f64,
    /// Data rate in bit/s.
    pub rate_bps: f64,
    /// Maximum attempts per packet.
    pub h_attempts: u32,
    /// Per-attempt success probability.
    pub prr: f64,
}

/// Expected total transmit energy over the horizon:
/// `E_total = N_pkt Pt (L/R) (1 - (1 - PRR)^H) / PRR` joules.
///
/// At `prr = 0` the limit `N_pkt Pt L H / R` is returned.
pub fn e_total(input: EnergyInput) -> Result<f64, AnalyticError> {
    if input.rate_bps <= 0.0 {
        return Err(AnalyticError::ZeroDataRate);
    }
    if input.n_packets < 0.0
        || input.pt_watts < 0.0
        || input.l_bits <= 0.0
        || input.h_attempts < 1
        || !(0.0..=1.0).contains(&input.prr)
    {
        return Err(AnalyticError::InvalidInput);
    }
    let per_attempt = input.pt_watts * input.l_bits / input.rate_bps;
    Ok(input.n_packets * per_attempt * expected_attempts(input.prr, input.h_attempts))
}

/// dBm to watts: `10^((p - 30) / 10)`.
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    libm::pow(10.0, (p_dbm - 30.0) / 10.0)
}

/// Required Eb/N0 in dB to hit a target per-packet PRR:
/// invert `PRR -> BER` (packet length L), then `BER -> Eb/N0`.
pub fn required_ebn0_db_for_prr(
    prr_target: f64,
    l_bits: u64,
    modulation: Modulation,
) -> Result<f64, AnalyticError> {
    if !(prr_target > 0.0 && prr_target < 1.0) {
        return Err(AnalyticError::InvalidInput);
    }
    let ber = ber_from_prr(prr_target, l_bits);
    match ebn0_from_ber(ber, modulation) {
        Ok(linear) => Ok(linear_to_db(linear)),
        Err(PhyError::BerOutOfRange) => Err(AnalyticError::InfeasiblePrrTarget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_comm_perfect_prr_is_zero() {
        let d = d_comm(DcommInput { n_packets: 10.0, speed_ms: 13.89, pps: 10.0, prr: 1.0 });
        assert_eq!(d.unwrap(), 0.0);
    }

    #[test]
    fn d_comm_frozen_products() {
        let d = d_comm(DcommInput { n_packets: 10.0, speed_ms: 13.89, pps: 10.0, prr: 0.0 });
        assert!((d.unwrap() - 13.89).abs() < 1e-12);
        // Consistency anchor: N(1-PRR) = 270 at 50 km/h implies 375 m.
        let d = d_comm(DcommInput { n_packets: 270.0, speed_ms: 13.89, pps: 10.0, prr: 0.0 });
        assert!((d.unwrap() - 375.03).abs() < 0.05);
    }

    #[test]
    fn d_comm_linear_in_speed() {
        let base = DcommInput { n_packets: 100.0, speed_ms: 13.89, pps: 10.0, prr: 0.3 };
        let d1 = d_comm(base).unwrap();
        let d2 = d_comm(DcommInput { speed_ms: 2.0 * base.speed_ms, ..base }).unwrap();
        assert!((d2 - 2.0 * d1).abs() < 1e-9);
        // Speed-ratio property: 110/50 km/h = 2.2 exactly.
        let d110 = d_comm(DcommInput { speed_ms: 110.0 / 3.6, ..base }).unwrap();
        let d50 = d_comm(DcommInput { speed_ms: 50.0 / 3.6, ..base }).unwrap();
        assert!((d110 / d50 - 2.2).abs() < 1e-12);
    }

    #[test]
    fn d_comm_rejects_zero_pps() {
        assert!(d_comm(DcommInput { n_packets: 1.0, speed_ms: 1.0, pps: 0.0, prr: 0.5 }).is_err());
    }

    /// Brute-force oracle: E[min(K, H)] by exhaustive enumeration over
    /// attempt outcome sequences of length H.
    fn attempts_oracle(prr: f64, h: u32) -> f64 {
        let mut expectation = 0.0;
        // Success at attempt k (first success), k = 1..H.
        for k in 1..=h {
            let p = (1.0 - prr).powi(k as i32 - 1) * prr;
            expectation += p * k as f64;
        }
        // No success within H attempts.
        expectation += (1.0 - prr).powi(h as i32) * h as f64;
        expectation
    }

    #[test]
    fn expected_attempts_matches_enumeration() {
        for h in 1..=6u32 {
            for i in 1..=9 {
                let prr = i as f64 / 10.0;
                let closed = expected_attempts(prr, h);
                let oracle = attempts_oracle(prr, h);
                assert!((closed - oracle).abs() < 1e-12, "prr={prr} h={h}");
            }
        }
    }

    #[test]
    fn expected_attempts_edges() {
        assert_eq!(expected_attempts(1.0, 5), 1.0);
        assert_eq!(expected_attempts(0.0, 7), 7.0);
        // Derived: E[min(K,2)] at prr=0.5 is 1*0.5 + 2*0.5 = 1.5.
        assert!((expected_attempts(0.5, 2) - 1.5).abs() < 1e-15);
        // Geometric limit 1/prr for huge H.
        assert!((expected_attempts(0.25, 1_000_000) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn e_total_single_attempt_independent_of_prr() {
        let base = EnergyInput {
            n_packets: 1.0,
            pt_watts: 0.2,
            l_bits: 2800.0,
            rate_bps: 1e7,
            h_attempts: 1,
            prr: 0.1,
        };
        let a = e_total(base).unwrap();
        let b = e_total(EnergyInput { prr: 0.9, ..base }).unwrap();
        assert_eq!(a, b);
        assert!((a - 5.6e-5).abs() < 1e-18);
    }

    #[test]
    fn e_total_frozen_value() {
        let e = e_total(EnergyInput {
            n_packets: 1.0,
            pt_watts: 0.2,
            l_bits: 2800.0,
            rate_bps: 1e7,
            h_attempts: 2,
            prr: 0.5,
        })
        .unwrap();
        assert!((e - 8.4e-5).abs() < 1e-18);
    }

    #[test]
    fn e_total_unlimited_retransmission_limit() {
        let prr = 0.37;
        let e = e_total(EnergyInput {
            n_packets: 3.0,
            pt_watts: 0.2,
            l_bits: 2800.0,
            rate_bps: 1e7,
            h_attempts: 1_000_000,
            prr,
        })
        .unwrap();
        let limit = 3.0 * 0.2 * 2800.0 / 1e7 / prr;
        assert!(((e - limit) / limit).abs() < 1e-6);
    }

    #[test]
    fn dbm_to_watts_frozen_values() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(23.0) - 0.199_526_231_496_888).abs() < 1e-9);
        assert!((dbm_to_watts(26.0) - 0.398_107_170_553_497).abs() < 1e-9);
        let ratio = dbm_to_watts(26.0) / dbm_to_watts(23.0);
        assert!((ratio - libm::pow(10.0, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn required_ebn0_frozen_chain() {
        // prr=0.99, L=2800, QPSK: [Q^-1(3.589e-6)]^2 ~= 20.14 linear
        // ~= 13.04 dB (chain of previously verified oracles).
        let db = required_ebn0_db_for_prr(0.99, 2800, Modulation::Qpsk).unwrap();
        assert!((db - 13.04).abs() < 0.01, "db={db}");
        // 16-QAM needs strictly more Eb/N0 at the same target.
        let db16 = required_ebn0_db_for_prr(0.99, 2800, Modulation::Qam16).unwrap();
        assert!(db16 > db);
    }

    #[test]
    fn required_ebn0_monotone_toward_one() {
        let mut prev = f64::NEG_INFINITY;
        for &prr in &[0.5, 0.9, 0.99, 0.9999, 0.999_999] {
            let db = required_ebn0_db_for_prr(prr, 2800, Modulation::Qpsk).unwrap();
            assert!(db > prev);
            prev = db;
        }
    }

    #[test]
    fn required_ebn0_infeasible_target() {
        // PRR so low that the implied BER exceeds the QPSK ceiling.
        let ber_ceiling_prr = 1e-300;
        assert_eq!(
            required_ebn0_db_for_prr(ber_ceiling_prr, 1, Modulation::Qam16),
            Err(AnalyticError::InfeasiblePrrTarget)
        );
    }
}
