//! Diagonal-kernel reproducing-kernel Hilbert spaces.
//!
//! A disk space is determined by its monomial norms `‖zⁿ‖²`; the kernel is
//! `k_λ(z) = Σ cₙ λ̄ⁿ zⁿ` with `cₙ = 1/‖zⁿ‖²`. Vectors are expressed in the
//! orthonormal basis `eₙ = zⁿ/‖zⁿ‖`, so the kernel has coordinates `√cₙ λ̄ⁿ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::neg_log1m;
use crate::C64;

/// Largest admissible modulus of a disk point.
pub const R_MAX: f64 = 1.0 - 1e-9;
/// Relative kernel-tail target used to pick truncation lengths.
pub const TAIL_TARGET: f64 = 1e-12;
/// Relative kernel tail that still counts as converged at the cap.
pub const TAIL_ACCEPT: f64 = 1e-10;
/// Truncation cap for series evaluation.
pub const MAX_TERMS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum KernelSpace {
    Hardy,
    Bergman { alpha: f64 },
    Dirichlet,
    StandardFinite { n: usize },
}

impl fmt::Display for KernelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpace::Hardy => write!(f, "Hardy"),
            KernelSpace::Bergman { alpha } => write!(f, "Bergman(alpha={alpha})"),
            KernelSpace::Dirichlet => write!(f, "Dirichlet"),
            KernelSpace::StandardFinite { n } => write!(f, "StandardFinite(n={n})"),
        }
    }
}

impl KernelSpace {
    pub fn bergman(alpha: f64) -> Result<Self> {
        let s = KernelSpace::Bergman { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn standard(n: usize) -> Result<Self> {
        let s = KernelSpace::StandardFinite { n };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpace::Bergman { alpha } if !(alpha > -1.0 && alpha.is_finite()) => {
                Err(Error::InvalidParameter(format!(
                    "Bergman weight must satisfy alpha > -1, got {alpha}"
                )))
            }
            KernelSpace::StandardFinite { n: 0 } => Err(Error::InvalidParameter(
                "StandardFinite needs n >= 1".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn is_disk(&self) -> bool {
        !matches!(self, KernelSpace::StandardFinite { .. })
    }

    /// Dimension of a finite space, `None` on the disk.
    pub fn dimension(&self) -> Option<usize> {
        match *self {
            KernelSpace::StandardFinite { n } => Some(n),
            _ => None,
        }
    }

    fn require_disk(&self) -> Result<()> {
        if self.is_disk() {
            Ok(())
        } else {
            Err(Error::UnsupportedSpace(self.to_string()))
        }
    }

    /// `‖zⁿ‖²`.
    pub fn monomial_norm_sq(&self, n: usize) -> Result<f64> {
        Ok(1.0 / self.kernel_coefficient(n)?)
    }

    /// `cₙ = 1/‖zⁿ‖²`.
    pub fn kernel_coefficient(&self, n: usize) -> Result<f64> {
        self.require_disk()?;
        Ok(match *self {
            KernelSpace::Hardy => 1.0,
            KernelSpace::Dirichlet => 1.0 / (n as f64 + 1.0),
            KernelSpace::Bergman { alpha } => {
                let mut c = 1.0;
                for k in 0..n {
                    c *= (k as f64 + alpha + 2.0) / (k as f64 + 1.0);
                }
                c
            }
            KernelSpace::StandardFinite { .. } => unreachable!(),
        })
    }

    /// `c₀, …, c_{len−1}`.
    pub fn kernel_coefficients(&self, len: usize) -> Result<Vec<f64>> {
        self.require_disk()?;
        let mut out = Vec::with_capacity(len);
        match *self {
            KernelSpace::Hardy => out.resize(len, 1.0),
            KernelSpace::Dirichlet => out.extend((0..len).map(|n| 1.0 / (n as f64 + 1.0))),
            KernelSpace::Bergman { alpha } => {
                let mut c = 1.0;
                for k in 0..len {
                    out.push(c);
                    c *= (k as f64 + alpha + 2.0) / (k as f64 + 1.0);
                }
            }
            KernelSpace::StandardFinite { .. } => unreachable!(),
        }
        Ok(out)
    }

    /// `√(c_n / c_m) = ‖z^m‖/‖z^n‖`.
    pub fn norm_ratio(&self, m: usize, n: usize) -> Result<f64> {
        Ok((self.kernel_coefficient(n)? / self.kernel_coefficient(m)?).sqrt())
    }

    pub fn check_point(&self, lambda: C64) -> Result<()> {
        self.require_disk()?;
        let r = lambda.norm();
        if !r.is_finite() || r > R_MAX + 1e-12 {
            return Err(Error::OutOfDomain(format!("{lambda} (|λ| = {r})")));
        }
        Ok(())
    }

    /// `‖k_λ‖²` in closed form.
    pub fn kernel_norm_sq(&self, lambda: C64) -> Result<f64> {
        self.check_point(lambda)?;
        let x = lambda.norm_sqr();
        Ok(match *self {
            KernelSpace::Hardy => 1.0 / (1.0 - x),
            KernelSpace::Bergman { alpha } => (-(alpha + 2.0) * (-x).ln_1p()).exp(),
            KernelSpace::Dirichlet => {
                if x == 0.0 {
                    1.0
                } else {
                    neg_log1m(x) / x
                }
            }
            KernelSpace::StandardFinite { .. } => unreachable!(),
        })
    }

    /// Kernel coordinates `√cₙ λ̄ⁿ`, `n < len`.
    pub fn truncated_kernel_vector(&self, lambda: C64, len: usize) -> Result<Vec<C64>> {
        self.check_point(lambda)?;
        if len == 0 {
            return Err(Error::InvalidParameter("truncation must be >= 1".into()));
        }
        let coeffs = self.kernel_coefficients(len)?;
        let lb = lambda.conj();
        let mut pow = C64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(len);
        for c in coeffs {
            out.push(pow * c.sqrt());
            pow *= lb;
        }
        Ok(out)
    }

    /// Upper bound on `Σ_{n≥len} cₙ xⁿ` from the ratio test.
    ///
    /// For all three disk spaces `c_{n+1}/c_n` is nonincreasing in `n`, so the
    /// tail is dominated by a geometric series once the ratio drops below 1.
    pub fn tail_bound(&self, x: f64, len: usize) -> Result<f64> {
        self.require_disk()?;
        if x == 0.0 {
            return Ok(if len == 0 { 1.0 } else { 0.0 });
        }
        let n = len as f64;
        let ratio = match *self {
            KernelSpace::Hardy => 1.0,
            KernelSpace::Dirichlet => 1.0,
            KernelSpace::Bergman { alpha } => (n + alpha + 2.0) / (n + 1.0),
            KernelSpace::StandardFinite { .. } => unreachable!(),
        };
        let q = x * ratio;
        if q >= 1.0 {
            return Ok(f64::INFINITY);
        }
        let lead = (self.kernel_coefficient(len)?.ln() + n * x.ln()).exp();
        Ok(lead / (1.0 - q))
    }

    /// Smallest truncation whose relative kernel tail is below `rel_tail`.
    ///
    /// Capped at [`MAX_TERMS`]; at the cap a tail up to [`TAIL_ACCEPT`] is
    /// tolerated, anything larger is [`Error::SeriesNotConverged`].
    pub fn auto_truncation(&self, modulus: f64, rel_tail: f64) -> Result<usize> {
        self.require_disk()?;
        let x = modulus * modulus;
        if x == 0.0 {
            return Ok(1);
        }
        let total = self.kernel_norm_sq(C64::new(modulus, 0.0))?;
        // cheap geometric estimate first, then walk
        let mut len = 1usize;
        while len < MAX_TERMS {
            if self.tail_bound(x, len)? < rel_tail * total {
                return Ok(len);
            }
            len = (len * 2).min(MAX_TERMS);
        }
        if self.tail_bound(x, MAX_TERMS)? > TAIL_ACCEPT * total {
            return Err(Error::SeriesNotConverged { cap: MAX_TERMS });
        }
        let (mut lo, mut hi) = (MAX_TERMS / 2, MAX_TERMS);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.tail_bound(x, mid)? < rel_tail * total {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Smallest truncation meeting [`TAIL_TARGET`], found by bisection after
    /// doubling so the answer is minimal rather than a power of two.
    pub fn truncation_for(&self, modulus: f64) -> Result<usize> {
        let x = modulus * modulus;
        let upper = self.auto_truncation(modulus, TAIL_TARGET)?;
        if upper <= 2 || x == 0.0 {
            return Ok(upper);
        }
        let total = self.kernel_norm_sq(C64::new(modulus, 0.0))?;
        let target = if self.tail_bound(x, upper)? < TAIL_TARGET * total {
            TAIL_TARGET
        } else {
            TAIL_ACCEPT
        };
        let (mut lo, mut hi) = (upper / 2, upper);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.tail_bound(x, mid)? < target * total {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_norms() {
        assert_eq!(KernelSpace::Hardy.monomial_norm_sq(5).unwrap(), 1.0);
        assert_eq!(KernelSpace::Dirichlet.monomial_norm_sq(3).unwrap(), 4.0);
        let b = KernelSpace::bergman(0.0).unwrap();
        assert!((b.monomial_norm_sq(2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            KernelSpace::StandardFinite { n: 2 }.monomial_norm_sq(0),
            Err(Error::UnsupportedSpace(_))
        ));
    }

    #[test]
    fn coefficients() {
        assert_eq!(KernelSpace::Hardy.kernel_coefficient(7).unwrap(), 1.0);
        assert_eq!(KernelSpace::Dirichlet.kernel_coefficient(1).unwrap(), 0.5);
        let b = KernelSpace::bergman(0.0).unwrap();
        assert!((b.kernel_coefficient(2).unwrap() - 3.0).abs() < 1e-15);
        let b = KernelSpace::bergman(1.5).unwrap();
        let list = b.kernel_coefficients(6).unwrap();
        for (n, v) in list.iter().enumerate() {
            assert!((v - b.kernel_coefficient(n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_norms() {
        let h = KernelSpace::Hardy.kernel_norm_sq(c(0.5, 0.0)).unwrap();
        assert!((h - 4.0 / 3.0).abs() < 1e-15);
        let d = KernelSpace::Dirichlet.kernel_norm_sq(c(0.5, 0.0)).unwrap();
        assert!((d - 4.0 * (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((d - 1.150728).abs() < 1e-6);
        assert_eq!(
            KernelSpace::Dirichlet.kernel_norm_sq(c(0.0, 0.0)).unwrap(),
            1.0
        );
        assert!(matches!(
            KernelSpace::Hardy.kernel_norm_sq(c(1.0, 0.0)),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn kernel_vectors() {
        let v = KernelSpace::Hardy
            .truncated_kernel_vector(c(0.0, 0.0), 4)
            .unwrap();
        assert_eq!(v, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let v = KernelSpace::Hardy
            .truncated_kernel_vector(c(0.5, 0.0), 3)
            .unwrap();
        assert_eq!(v, vec![c(1.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)]);
        let v = KernelSpace::Dirichlet
            .truncated_kernel_vector(c(0.5, 0.0), 2)
            .unwrap();
        assert!((v[1].re - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        // conjugation
        let v = KernelSpace::Hardy
            .truncated_kernel_vector(c(0.0, 0.5), 2)
            .unwrap();
        assert_eq!(v[1], c(0.0, -0.5));
    }

    #[test]
    fn validation() {
        assert!(KernelSpace::bergman(-1.0).is_err());
        assert!(KernelSpace::standard(0).is_err());
    }

    #[test]
    fn truncation_length() {
        let h = KernelSpace::Hardy;
        let n = h.truncation_for(0.5).unwrap();
        // tail x^N/(1-x) relative to 1/(1-x) is x^N = 0.25^N
        assert!(0.25f64.powi(n as i32) < 1e-12);
        assert!(0.25f64.powi(n as i32 - 1) >= 1e-12);
        assert_eq!(h.truncation_for(0.0).unwrap(), 1);
        assert!(matches!(
            h.truncation_for(0.9999),
            Err(Error::SeriesNotConverged { .. })
        ));
    }
}
