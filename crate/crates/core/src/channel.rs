//! Rural LOS pathloss, correlated shadowing, thermal noise, Doppler/ICI
//! penalty and SINR combination.

use crate::units::{db_to_linear, dbm_to_mw, mw_to_dbm};
use core::fmt;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelError {
    /// Carrier frequency must be strictly positive.
    NonPositiveFrequency,
    /// Bandwidth must be strictly positive.
    NonPositiveBandwidth,
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::NonPositiveFrequency => write!(f, "carrier frequency must be > 0"),
            ChannelError::NonPositiveBandwidth => write!(f, "bandwidth must be > 0"),
        }
    }
}

/// Rural LOS pathloss in dB: `20 log10(d) + 20 log10(fc) + 32.45`.
///
/// `d` in meters (callers clamp to >= 1 m), `fc` in GHz.
pub fn pathloss_db(d_m: f64, fc_ghz: f64) -> Result<f64, ChannelError> {
    if fc_ghz <= 0.0 {
        return Err(ChannelError::NonPositiveFrequency);
    }
    Ok(20.0 * libm::log10(d_m) + 20.0 * libm::log10(fc_ghz) + 32.45)
}

/// One correlated shadowing update.
///
/// `S_{i+1} = exp(-dd/d_corr) S_i + sqrt(1 - exp(-2 dd/d_corr)) N_{i+1}`
/// where `noise_draw` is the caller-supplied `N_{i+1} ~ Normal(0, sigma^2)`
/// sample in dB. Keeping the draw outside makes the step pure and keeps
/// RNG stream discipline in the simulation layer.
pub fn shadowing_step(s_db: f64, delta_d_m: f64, d_corr_m: f64, noise_draw_db: f64) -> f64 {
    let a = libm::exp(-delta_d_m / d_corr_m);
    let b = libm::sqrt(1.0 - libm::exp(-2.0 * delta_d_m / d_corr_m));
    a * s_db + b * noise_draw_db
}

/// Autoregressive weight `exp(-dd/d_corr)` of the shadowing step.
pub fn shadowing_ar_weight(delta_d_m: f64, d_corr_m: f64) -> f64 {
    libm::exp(-delta_d_m / d_corr_m)
}

/// Thermal noise power in dBm: `-174 + 10 log10(B) + NF`.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64, ChannelError> {
    if bandwidth_hz <= 0.0 {
        return Err(ChannelError::NonPositiveBandwidth);
    }
    Ok(-174.0 + 10.0 * libm::log10(bandwidth_hz) + noise_figure_db)
}

/// ICI-to-signal power ratio for a given relative speed, carrier and
/// subcarrier spacing: `(pi f_d / SCS)^2 / 3` with
/// `f_d = v_rel * fc / c`.
///
/// The quadratic small-ICI approximation models the Doppler resilience
/// of wider subcarrier spacings. The returned ratio scales the received
/// signal power into an interference floor in the SINR denominator.
pub fn ici_ratio(speed_rel_ms: f64, fc_ghz: f64, scs_hz: f64) -> f64 {
    if speed_rel_ms == 0.0 {
        return 0.0;
    }
    let f_d = speed_rel_ms * fc_ghz * 1e9 / SPEED_OF_LIGHT;
    let x = core::f64::consts::PI * f_d / scs_hz;
    x * x / 3.0
}

/// SINR in dB from received power, noise, interferer powers (dBm) and an
/// ICI floor already expressed in linear mW.
pub fn sinr_db(p_rx_dbm: f64, noise_dbm: f64, interferers_dbm: &[f64], ici_floor_mw: f64) -> f64 {
    let p = dbm_to_mw(p_rx_dbm);
    let mut denom = dbm_to_mw(noise_dbm) + ici_floor_mw;
    for &i in interferers_dbm {
        denom += dbm_to_mw(i);
    }
    10.0 * libm::log10(p / denom)
}

/// Same combination with interference supplied as a pre-summed linear
/// mW term; the hot path of the slot resolver uses this form.
pub fn sinr_db_linear(p_rx_mw: f64, noise_mw: f64, interference_mw: f64, ici_floor_mw: f64) -> f64 {
    10.0 * libm::log10(p_rx_mw / (noise_mw + interference_mw + ici_floor_mw))
}

/// Convenience: dB gain total for a link (used by tests and traces).
pub fn link_gain_db(pathloss: f64, g_tx_dbi: f64, g_rx_dbi: f64, shadowing_db: f64) -> f64 {
    -pathloss + g_tx_dbi + g_rx_dbi + shadowing_db
}

#[allow(dead_code)]
fn _linear(db: f64) -> f64 {
    db_to_linear(db)
}

#[allow(dead_code)]
fn _dbm(mw: f64) -> f64 {
    mw_to_dbm(mw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pathloss_fc_one_ghz() {
        // fc = 1 GHz log term vanishes: PL(10 m) = 20 + 32.45.
        let pl = pathloss_db(10.0, 1.0).unwrap();
        assert!((pl - 52.45).abs() < 1e-12);
    }

    #[test]
    fn pathloss_frozen_values() {
        // Hand-evaluated oracle: 20log10(100)+20log10(5.9)+32.45.
        let pl = pathloss_db(100.0, 5.9).unwrap();
        assert!((pl - 87.8663).abs() < 1e-3, "pl={pl}");
        let pl1 = pathloss_db(1.0, 5.9).unwrap();
        assert!((pl1 - 47.8663).abs() < 1e-3, "pl={pl1}");
    }

    #[test]
    fn pathloss_six_db_per_doubling() {
        let a = pathloss_db(50.0, 5.9).unwrap();
        let b = pathloss_db(100.0, 5.9).unwrap();
        assert!((b - a - 6.020_599_913_279_624).abs() < 1e-9);
    }

    #[test]
    fn pathloss_rejects_bad_fc() {
        assert!(pathloss_db(10.0, 0.0).is_err());
        assert!(pathloss_db(10.0, -1.0).is_err());
    }

    #[test]
    fn shadowing_zero_step_keeps_state() {
        let s = shadowing_step(1.7, 0.0, 25.0, 99.0);
        assert_eq!(s, 1.7);
    }

    #[test]
    fn shadowing_large_step_is_fresh_draw() {
        // dd = 2500 m >> d_corr: AR weight below 1e-43.
        let s = shadowing_step(100.0, 2500.0, 25.0, -2.5);
        assert!((s - -2.5).abs() < 1e-40);
        assert!(shadowing_ar_weight(2500.0, 25.0) < 1e-43);
    }

    #[test]
    fn shadowing_weight_at_decorrelation_distance() {
        // dd = d_corr = 25 m: weight = exp(-1).
        let w = shadowing_ar_weight(25.0, 25.0);
        assert!((w - 0.367_879_441_171_442_3).abs() < 1e-12);
    }

    #[test]
    fn noise_floor_definition() {
        assert!((noise_power_dbm(1.0, 0.0).unwrap() - -174.0).abs() < 1e-12);
    }

    #[test]
    fn noise_frozen_values() {
        // -174 + 73.0103 + 9
        let n = noise_power_dbm(20e6, 9.0).unwrap();
        assert!((n - -91.99).abs() < 1e-2, "n={n}");
        // 2 subchannels x 10 PRB x 12 x 30 kHz = 7.2 MHz
        let n2 = noise_power_dbm(7.2e6, 9.0).unwrap();
        assert!((n2 - -96.43).abs() < 1e-2, "n={n2}");
    }

    #[test]
    fn ici_zero_speed() {
        assert_eq!(ici_ratio(0.0, 5.9, 15_000.0), 0.0);
    }

    #[test]
    fn ici_inverse_square_in_scs() {
        let r15 = ici_ratio(20.0, 5.9, 15_000.0);
        let r30 = ici_ratio(20.0, 5.9, 30_000.0);
        assert!((r15 / r30 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ici_frozen_value() {
        // f_d = 30.6 * 5.9e9 / c = 602.2 Hz; (pi f_d / 15000)^2 / 3.
        let r = ici_ratio(30.6, 5.9, 15_000.0);
        assert!((r - 5.28e-3).abs() < 2e-4, "r={r}");
    }

    #[test]
    fn sinr_equal_power_no_interference() {
        let s = sinr_db(-90.0, -90.0, &[], 0.0);
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn sinr_one_interferer_equal_to_noise() {
        let snr = sinr_db(-80.0, -90.0, &[], 0.0);
        let sinr = sinr_db(-80.0, -90.0, &[-90.0], 0.0);
        assert!((snr - sinr - 3.010_299_956_639_812).abs() < 1e-9);
    }

    #[test]
    fn sinr_absent_interferer_is_identity() {
        let a = sinr_db(-80.0, -90.0, &[], 0.0);
        let b = sinr_db(-80.0, -90.0, &[f64::NEG_INFINITY], 0.0);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sinr_monotone_in_interferer_power() {
        let mut prev = f64::INFINITY;
        for int_dbm in [-120.0, -100.0, -90.0, -80.0] {
            let s = sinr_db(-80.0, -90.0, &[int_dbm], 0.0);
            assert!(s < prev);
            prev = s;
        }
    }
}
