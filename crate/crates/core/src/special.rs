//! Special functions needed by closed-form Berezin transforms.

use std::f64::consts::PI;

/// Dilogarithm `Li₂(x) = Σ_{n≥1} xⁿ/n²` for real `0 ≤ x ≤ 1`.
///
/// The series is summed directly for `x ≤ 1/2`; above that the reflection
/// `Li₂(x) = π²/6 − ln(x)ln(1−x) − Li₂(1−x)` keeps the argument small.
pub fn dilog(x: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&x),
        "dilog argument {x} outside [0, 1]"
    );
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    if x <= 0.5 {
        dilog_series(x)
    } else {
        PI * PI / 6.0 - x.ln() * (-x).ln_1p() - dilog_series(1.0 - x)
    }
}

fn dilog_series(x: f64) -> f64 {
    let mut sum: f64 = 0.0;
    let mut pow = x;
    let mut n = 1.0;
    while pow > 1e-18 * sum.max(f64::MIN_POSITIVE) || n < 2.0 {
        sum += pow / (n * n);
        pow *= x;
        n += 1.0;
        if pow == 0.0 {
            break;
        }
    }
    sum
}

/// `ln(1/(1−x))` for `0 ≤ x < 1`, accurate near zero.
pub fn neg_log1m(x: f64) -> f64 {
    -(-x).ln_1p()
}
