//! Polynomials, harmonic symbols and shift-weight rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Polynomial by coefficient list; index is the monomial degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "non-finite polynomial coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn monomial(c: C64, degree: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); degree + 1];
        coeffs[degree] = c;
        Self { coeffs }
    }

    /// Degree ignoring trailing zeros; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|z| z.norm() != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.coeffs.iter().all(|z| z.im == 0.0)
    }

    /// `Σ |aₖ|`, an upper bound for the sup norm on the closed disk.
    pub fn l1(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }
}

/// Harmonic polynomial `φ(z) = Σ_{k≥0} aₖ zᵏ + Σ_{k≥1} bₖ z̄ᵏ`.
///
/// `coanalytic[i]` is the coefficient of `z̄^{i+1}`: the conjugate-analytic part
/// has no constant term, so its list starts at degree one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSymbol {
    pub analytic: Polynomial,
    pub coanalytic: Polynomial,
}

impl HarmonicSymbol {
    pub fn new(analytic: Polynomial, coanalytic: Polynomial) -> Self {
        Self {
            analytic,
            coanalytic,
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        let bar = z.conj();
        self.analytic.eval(z) + self.coanalytic.eval(bar) * bar
    }

    /// Degree of the analytic part (0 when absent).
    pub fn analytic_degree(&self) -> usize {
        self.analytic.degree().unwrap_or(0)
    }

    /// Degree of the conjugate-analytic part in `z̄` (0 when absent).
    pub fn coanalytic_degree(&self) -> usize {
        self.coanalytic.degree().map(|d| d + 1).unwrap_or(0)
    }

    /// Upper bound for `sup |φ|` on the disk.
    pub fn sup_bound(&self) -> f64 {
        self.analytic.l1() + self.coanalytic.l1()
    }

    /// `φ + c`.
    pub fn plus_constant(&self, c: C64) -> Self {
        let mut a = self.analytic.clone();
        if a.coeffs.is_empty() {
            a.coeffs.push(C64::new(0.0, 0.0));
        }
        a.coeffs[0] += c;
        Self::new(a, self.coanalytic.clone())
    }
}

/// Weight sequence `β₁, β₂, …` of a Dirichlet-space forward shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightRule {
    /// `βₙ = c`.
    Constant { c: C64 },
    /// `βₙ = c/n`.
    COverN { c: C64 },
    /// Real `β₁..β_m`, then zero.
    RealList { weights: Vec<f64> },
    /// `βₙ = i·wₙ` for real `w₁..w_m`, then zero.
    ImaginaryList { weights: Vec<f64> },
    /// Complex `β₁..β_m`, then zero.
    List { weights: Vec<C64> },
}

impl WeightRule {
    pub fn validate(&self) -> Result<()> {
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        let ok = match self {
            WeightRule::Constant { c } | WeightRule::COverN { c } => finite(c),
            WeightRule::RealList { weights } | WeightRule::ImaginaryList { weights } => {
                weights.iter().all(|w| w.is_finite())
            }
            WeightRule::List { weights } => weights.iter().all(finite),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("non-finite shift weight".into()))
        }
    }

    /// `βₙ` for `n ≥ 1`.
    pub fn weight(&self, n: usize) -> C64 {
        assert!(n >= 1, "shift weights are indexed from 1");
        let zero = C64::new(0.0, 0.0);
        match self {
            WeightRule::Constant { c } => *c,
            WeightRule::COverN { c } => c / n as f64,
            WeightRule::RealList { weights } => weights
                .get(n - 1)
                .map(|&w| C64::new(w, 0.0))
                .unwrap_or(zero),
            WeightRule::ImaginaryList { weights } => weights
                .get(n - 1)
                .map(|&w| C64::new(0.0, w))
                .unwrap_or(zero),
            WeightRule::List { weights } => weights.get(n - 1).copied().unwrap_or(zero),
        }
    }

    /// `sup |βₙ|`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            WeightRule::Constant { c } | WeightRule::COverN { c } => c.norm(),
            WeightRule::RealList { weights } | WeightRule::ImaginaryList { weights } => {
                weights.iter().map(|w| w.abs()).fold(0.0, f64::max)
            }
            WeightRule::List { weights } => weights.iter().map(|w| w.norm()).fold(0.0, f64::max),
        }
    }

    /// Whether every weight is real.
    pub fn is_real(&self) -> bool {
        match self {
            WeightRule::Constant { c } | WeightRule::COverN { c } => c.im == 0.0,
            WeightRule::RealList { .. } => true,
            WeightRule::ImaginaryList { weights } => weights.iter().all(|&w| w == 0.0),
            WeightRule::List { weights } => weights.iter().all(|w| w.im == 0.0),
        }
    }

    /// Whether every weight is purely imaginary.
    pub fn is_imaginary(&self) -> bool {
        match self {
            WeightRule::Constant { c } | WeightRule::COverN { c } => c.re == 0.0,
            WeightRule::RealList { weights } => weights.iter().all(|&w| w == 0.0),
            WeightRule::ImaginaryList { .. } => true,
            WeightRule::List { weights } => weights.iter().all(|w| w.re == 0.0),
        }
    }

    /// Number of explicitly listed weights, `None` for closed-form rules.
    pub fn list_len(&self) -> Option<usize> {
        match self {
            WeightRule::Constant { .. } | WeightRule::COverN { .. } => None,
            WeightRule::RealList { weights } | WeightRule::ImaginaryList { weights } => {
                Some(weights.len())
            }
            WeightRule::List { weights } => Some(weights.len()),
        }
    }

    /// Conjugated sequence.
    pub fn conj(&self) -> Self {
        match self {
            WeightRule::Constant { c } => WeightRule::Constant { c: c.conj() },
            WeightRule::COverN { c } => WeightRule::COverN { c: c.conj() },
            WeightRule::RealList { weights } => WeightRule::RealList {
                weights: weights.clone(),
            },
            WeightRule::ImaginaryList { weights } => WeightRule::ImaginaryList {
                weights: weights.iter().map(|w| -w).collect(),
            },
            WeightRule::List { weights } => WeightRule::List {
                weights: weights.iter().map(|w| w.conj()).collect(),
            },
        }
    }
}
