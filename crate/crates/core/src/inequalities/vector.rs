//! The vector-level lemma behind the `t`-infimum bound.

use std::collections::BTreeMap;

use super::{Hypothesis, InequalityReport, TheoremId, VerifyParams};
use crate::error::{Error, Result};
use crate::numerics::{inner, norm_sq};
use crate::C64;

/// `(‖x‖²‖y‖², ¼(ℑ⟨x,y⟩ + ℜ⟨x,y⟩)² + (‖y‖²/2)(‖x−ty‖² + ‖x−ity‖²))`.
pub fn last30_sides(x: &[C64], y: &[C64], t: f64) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let xy = inner(x, y);
    let ny = norm_sq(y);
    let it = C64::new(0.0, t);
    let d1: f64 = x.iter().zip(y).map(|(a, b)| (a - b * t).norm_sqr()).sum();
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b * it).norm_sqr()).sum();
    let lhs = norm_sq(x) * ny;
    let rhs = 0.25 * (xy.im + xy.re).powi(2) + ny / 2.0 * (d1 + d2);
    Ok((lhs, rhs))
}

/// Evaluates the lemma directly on `(x, y, t)`.
pub fn verify_vector_lemma(x: &[C64], y: &[C64], t: f64) -> Result<InequalityReport> {
    let (lhs, rhs) = last30_sides(x, y, t)?;
    let mut extra = BTreeMap::new();
    extra.insert("t".into(), t);
    let hyps: Vec<Hypothesis> = Vec::new();
    Ok(InequalityReport::new(
        TheoremId::LemmaLast30,
        lhs,
        rhs,
        f64::NAN,
        hyps,
        VerifyParams::default(),
        extra,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, k: usize) -> Vec<C64> {
        (0..n)
            .map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
            .collect()
    }

    #[test]
    fn equal_unit_vectors() {
        let r = verify_vector_lemma(&e(2, 0), &e(2, 0), 1.0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!((r.rhs - 1.25).abs() < 1e-15);
        assert!(r.satisfied);
    }

    #[test]
    fn orthogonal_unit_vectors() {
        let r = verify_vector_lemma(&e(3, 0), &e(3, 1), 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            verify_vector_lemma(&e(2, 0), &e(3, 0), 0.0),
            Err(Error::LengthMismatch(2, 3))
        ));
    }
}
