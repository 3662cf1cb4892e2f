//! Operator models and their compressions.
//!
//! An [`OperatorModel`] pairs a [`KernelSpace`] with a concrete operator.
//! Disk operators act on coordinates in the orthonormal basis
//! `eₙ = zⁿ/‖zⁿ‖`; [`OperatorModel::apply`] is the matrix-free action of the
//! compression and [`OperatorModel::truncate`] materializes it densely.
//!
//! The composition-differentiation model is stored as the weighted forward
//! shift `eₙ ↦ (n+1)ρⁿ eₙ₊₁`. Its Berezin transform at `λ = re^{iζ}` is
//! `(1−r²) r e^{iζ}/(1−ρr²)²`, derived from the derivative kernel
//! `z/(1−w̄z)²`.

pub mod file;
pub mod symbols;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::rkhs::KernelSpace;
use crate::C64;

pub use symbols::{HarmonicSymbol, Polynomial, WeightRule};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    /// Arbitrary matrix on `StandardFinite(n)`.
    Matrix {
        entries: ComplexMatrix,
    },
    /// `f ↦ f′∘φ` with `φ(z) = ρz`, on Hardy.
    CompositionDifferentiation {
        rho: f64,
    },
    /// Toeplitz operator with harmonic polynomial symbol, on Bergman(α).
    ToeplitzHarmonic {
        symbol: HarmonicSymbol,
    },
    /// `Σ aₙzⁿ ↦ Σ aₙβₙ₊₁zⁿ⁺¹`, on Dirichlet.
    DirichletShift {
        rule: WeightRule,
    },
    /// `f ↦ Σ ⟨f, g_j⟩ h_j`, on Dirichlet.
    FiniteRank {
        pairs: Vec<RankOnePair>,
    },
    /// `Σ cᵢ Tᵢ + shift·I`.
    Combination {
        terms: Vec<(C64, OperatorModel)>,
        shift: C64,
    },
    /// `A·B`.
    Product {
        left: Box<OperatorModel>,
        right: Box<OperatorModel>,
    },
    Adjoint {
        inner: Box<OperatorModel>,
    },
}

/// One term `⟨·, g⟩ h` of a finite-rank operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOnePair {
    pub g: Polynomial,
    pub h: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorModel {
    space: KernelSpace,
    kind: OperatorKind,
}

impl OperatorModel {
    pub fn matrix(entries: ComplexMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix must be square, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if entries
            .as_slice()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(Self {
            space: KernelSpace::StandardFinite { n: entries.rows() },
            kind: OperatorKind::Matrix { entries },
        })
    }

    pub fn dphi(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in (0, 1), got {rho}"
            )));
        }
        Ok(Self {
            space: KernelSpace::Hardy,
            kind: OperatorKind::CompositionDifferentiation { rho },
        })
    }

    pub fn toeplitz(symbol: HarmonicSymbol, alpha: f64) -> Result<Self> {
        let space = KernelSpace::bergman(alpha)?;
        Ok(Self {
            space,
            kind: OperatorKind::ToeplitzHarmonic { symbol },
        })
    }

    pub fn dirichlet_shift(rule: WeightRule) -> Result<Self> {
        rule.validate()?;
        Ok(Self {
            space: KernelSpace::Dirichlet,
            kind: OperatorKind::DirichletShift { rule },
        })
    }

    pub fn finite_rank(pairs: Vec<RankOnePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            space: KernelSpace::Dirichlet,
            kind: OperatorKind::FiniteRank { pairs },
        })
    }

    /// `c·I` on `space`.
    pub fn scalar(space: KernelSpace, c: C64) -> Self {
        Self {
            space,
            kind: OperatorKind::Combination {
                terms: Vec::new(),
                shift: c,
            },
        }
    }

    pub fn identity(space: KernelSpace) -> Self {
        Self::scalar(space, ONE)
    }

    /// `c·I` collapsed to a matrix on finite spaces.
    pub fn scalar_collapsed(space: KernelSpace, c: C64) -> Self {
        Self::scalar(space, c).collapse()
    }

    pub fn zero(space: KernelSpace) -> Self {
        Self::scalar(space, ZERO)
    }

    pub fn space(&self) -> KernelSpace {
        self.space
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Matrix dimension on a finite space.
    pub fn dimension(&self) -> Option<usize> {
        self.space.dimension()
    }

    fn require_same_space(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(
                self.space.to_string(),
                other.space.to_string(),
            ))
        }
    }

    /// On a finite space every model is materialized as a matrix.
    fn collapse(self) -> Self {
        match (self.space.dimension(), &self.kind) {
            (Some(_), OperatorKind::Matrix { .. }) | (None, _) => self,
            (Some(_), _) => {
                let m = self.truncate(1).expect("finite models always truncate");
                Self {
                    space: self.space,
                    kind: OperatorKind::Matrix { entries: m },
                }
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        match &self.kind {
            OperatorKind::Matrix { entries } => Self {
                space: self.space,
                kind: OperatorKind::Matrix {
                    entries: entries.adjoint(),
                },
            },
            OperatorKind::Adjoint { inner } => (**inner).clone(),
            OperatorKind::Combination { terms, shift } => Self {
                space: self.space,
                kind: OperatorKind::Combination {
                    terms: terms.iter().map(|(c, t)| (c.conj(), t.adjoint())).collect(),
                    shift: shift.conj(),
                },
            },
            OperatorKind::Product { left, right } => Self {
                space: self.space,
                kind: OperatorKind::Product {
                    left: Box::new(right.adjoint()),
                    right: Box::new(left.adjoint()),
                },
            },
            _ => Self {
                space: self.space,
                kind: OperatorKind::Adjoint {
                    inner: Box::new(self.clone()),
                },
            },
        }
    }

    fn as_terms(&self) -> (Vec<(C64, OperatorModel)>, C64) {
        match &self.kind {
            OperatorKind::Combination { terms, shift } => (terms.clone(), *shift),
            _ => (vec![(ONE, self.clone())], ZERO),
        }
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_space(other)?;
        let (mut terms, s1) = self.as_terms();
        let (more, s2) = other.as_terms();
        terms.extend(more);
        Ok(Self {
            space: self.space,
            kind: OperatorKind::Combination {
                terms,
                shift: s1 + s2,
            },
        }
        .collapse())
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `c·self`.
    pub fn scale(&self, c: C64) -> Self {
        let (terms, shift) = self.as_terms();
        Self {
            space: self.space,
            kind: OperatorKind::Combination {
                terms: terms.into_iter().map(|(k, t)| (k * c, t)).collect(),
                shift: shift * c,
            },
        }
        .collapse()
    }

    /// `self + c·I`.
    pub fn shift_identity(&self, c: C64) -> Self {
        let (terms, shift) = self.as_terms();
        Self {
            space: self.space,
            kind: OperatorKind::Combination {
                terms,
                shift: shift + c,
            },
        }
        .collapse()
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.require_same_space(other)?;
        if let (OperatorKind::Matrix { entries: a }, OperatorKind::Matrix { entries: b }) =
            (&self.kind, &other.kind)
        {
            return Self::matrix(a * b);
        }
        Ok(Self {
            space: self.space,
            kind: OperatorKind::Product {
                left: Box::new(self.clone()),
                right: Box::new(other.clone()),
            },
        })
    }

    /// `selfⁿ` (`n = 0` gives the identity).
    pub fn power(&self, n: u32) -> Self {
        if n == 0 {
            return Self::identity(self.space);
        }
        if let OperatorKind::Matrix { entries } = &self.kind {
            return Self::matrix(entries.pow(n)).expect("power of a square matrix");
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose(self).expect("same space");
        }
        acc
    }

    /// Cartesian parts `((T+T*)/2, (T−T*)/2i)`.
    pub fn cartesian_parts(&self) -> (Self, Self) {
        let adj = self.adjoint();
        let re = self
            .add(&adj)
            .expect("same space")
            .scale(C64::new(0.5, 0.0));
        let im = self
            .sub(&adj)
            .expect("same space")
            .scale(C64::new(0.0, -0.5));
        (re, im)
    }

    /// `T*T`.
    pub fn gram(&self) -> Self {
        self.adjoint().compose(self).expect("same space")
    }

    /// `(lower, upper)` bandwidths: `T_{ij} ≠ 0` only for `−upper ≤ i − j ≤ lower`.
    pub fn bandwidths(&self) -> (usize, usize) {
        match &self.kind {
            OperatorKind::Matrix { entries } => (entries.rows() - 1, entries.rows() - 1),
            OperatorKind::CompositionDifferentiation { .. } => (1, 0),
            OperatorKind::DirichletShift { .. } => (1, 0),
            OperatorKind::ToeplitzHarmonic { symbol } => {
                (symbol.analytic_degree(), symbol.coanalytic_degree())
            }
            OperatorKind::FiniteRank { pairs } => {
                let gh = |p: &Polynomial| p.degree().unwrap_or(0);
                (
                    pairs.iter().map(|p| gh(&p.h)).max().unwrap_or(0),
                    pairs.iter().map(|p| gh(&p.g)).max().unwrap_or(0),
                )
            }
            OperatorKind::Combination { terms, .. } => terms.iter().fold((0, 0), |acc, (_, t)| {
                let (l, u) = t.bandwidths();
                (acc.0.max(l), acc.1.max(u))
            }),
            OperatorKind::Product { left, right } => {
                let (l1, u1) = left.bandwidths();
                let (l2, u2) = right.bandwidths();
                (l1 + l2, u1 + u2)
            }
            OperatorKind::Adjoint { inner } => {
                let (l, u) = inner.bandwidths();
                (u, l)
            }
        }
    }

    /// Smallest truncation that holds every polynomial coefficient.
    pub fn min_truncation(&self) -> usize {
        match &self.kind {
            OperatorKind::Matrix { entries } => entries.rows(),
            OperatorKind::CompositionDifferentiation { .. }
            | OperatorKind::DirichletShift { .. } => 1,
            OperatorKind::ToeplitzHarmonic { symbol } => {
                symbol.analytic_degree().max(symbol.coanalytic_degree()) + 1
            }
            OperatorKind::FiniteRank { pairs } => {
                let (l, u) = self.bandwidths();
                let _ = pairs;
                l.max(u) + 1
            }
            OperatorKind::Combination { terms, .. } => terms
                .iter()
                .map(|(_, t)| t.min_truncation())
                .max()
                .unwrap_or(1),
            OperatorKind::Product { left, right } => {
                left.min_truncation().max(right.min_truncation())
            }
            OperatorKind::Adjoint { inner } => inner.min_truncation(),
        }
    }

    /// Dense `N×N` compression. Finite-space models return their own `n×n`
    /// matrix whatever `N` is.
    pub fn truncate(&self, n: usize) -> Result<ComplexMatrix> {
        let dim = match self.dimension() {
            Some(d) => d,
            None => {
                if n == 0 {
                    return Err(Error::InvalidParameter("truncation must be >= 1".into()));
                }
                let need = self.min_truncation();
                if n < need {
                    return Err(Error::TruncationTooSmall {
                        requested: n,
                        required: need,
                    });
                }
                n
            }
        };
        let mut out = ComplexMatrix::zeros(dim, dim);
        let mut e = vec![ZERO; dim];
        for j in 0..dim {
            e[j] = ONE;
            let col = self.apply(&e[..=j], dim);
            e[j] = ZERO;
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// First `out_len` coordinates of `T u`, where `u` is extended by zeros.
    ///
    /// On a finite space `u` and the output are padded or cut to `n`.
    pub fn apply(&self, u: &[C64], out_len: usize) -> Vec<C64> {
        let mut out = vec![ZERO; out_len];
        match &self.kind {
            OperatorKind::Matrix { entries } => {
                let n = entries.rows();
                for (i, o) in out.iter_mut().enumerate().take(n) {
                    *o = entries.row(i).iter().zip(u).map(|(a, b)| a * b).sum();
                }
            }
            OperatorKind::CompositionDifferentiation { rho } => {
                let mut w = 1.0;
                for (k, &uk) in u.iter().enumerate() {
                    if k + 1 >= out_len {
                        break;
                    }
                    out[k + 1] += uk * ((k + 1) as f64 * w);
                    w *= rho;
                }
            }
            OperatorKind::DirichletShift { rule } => {
                for (k, &uk) in u.iter().enumerate() {
                    if k + 1 >= out_len {
                        break;
                    }
                    let ratio = ((k + 2) as f64 / (k + 1) as f64).sqrt();
                    out[k + 1] += uk * rule.weight(k + 1) * ratio;
                }
            }
            OperatorKind::ToeplitzHarmonic { symbol } => {
                let len =
                    u.len().max(out_len) + symbol.analytic_degree() + symbol.coanalytic_degree();
                let c = self.space.kernel_coefficients(len).expect("disk space");
                for (k, &a) in symbol.analytic.coeffs.iter().enumerate() {
                    if a == ZERO {
                        continue;
                    }
                    for (n, &un) in u.iter().enumerate() {
                        if n + k >= out_len {
                            break;
                        }
                        out[n + k] += a * un * (c[n] / c[n + k]).sqrt();
                    }
                }
                for (i, &b) in symbol.coanalytic.coeffs.iter().enumerate() {
                    let k = i + 1;
                    if b == ZERO {
                        continue;
                    }
                    for n in 0..out_len {
                        if n + k >= u.len() {
                            break;
                        }
                        out[n] += b * u[n + k] * (c[n] / c[n + k]).sqrt();
                    }
                }
            }
            OperatorKind::FiniteRank { pairs } => {
                for p in pairs {
                    let ghat = onb_coefficients(&self.space, &p.g);
                    let hhat = onb_coefficients(&self.space, &p.h);
                    let s: C64 = ghat.iter().zip(u).map(|(g, x)| g.conj() * x).sum();
                    for (o, h) in out.iter_mut().zip(&hhat) {
                        *o += h * s;
                    }
                }
            }
            OperatorKind::Combination { terms, shift } => {
                for (c, t) in terms {
                    for (o, v) in out.iter_mut().zip(t.apply(u, out_len)) {
                        *o += c * v;
                    }
                }
                if *shift != ZERO {
                    for (o, x) in out.iter_mut().zip(u) {
                        *o += shift * x;
                    }
                }
            }
            OperatorKind::Product { left, right } => {
                let mid = out_len + left.bandwidths().1;
                let v = right.apply(u, mid);
                out = left.apply(&v, out_len);
            }
            OperatorKind::Adjoint { inner } => out = inner.apply_adjoint(u, out_len),
        }
        if let Some(n) = self.dimension() {
            out.iter_mut().skip(n).for_each(|z| *z = ZERO);
        }
        out
    }

    /// First `out_len` coordinates of `T* u`, where `u` is extended by zeros.
    pub fn apply_adjoint(&self, u: &[C64], out_len: usize) -> Vec<C64> {
        let mut out = vec![ZERO; out_len];
        match &self.kind {
            OperatorKind::Matrix { entries } => {
                let n = entries.rows();
                for (i, &ui) in u.iter().enumerate().take(n) {
                    for (j, o) in out.iter_mut().enumerate().take(n) {
                        *o += entries[(i, j)].conj() * ui;
                    }
                }
            }
            OperatorKind::CompositionDifferentiation { rho } => {
                let mut w = 1.0;
                for (k, o) in out.iter_mut().enumerate() {
                    if k + 1 >= u.len() {
                        break;
                    }
                    *o += u[k + 1] * ((k + 1) as f64 * w);
                    w *= rho;
                }
            }
            OperatorKind::DirichletShift { rule } => {
                for (k, o) in out.iter_mut().enumerate() {
                    if k + 1 >= u.len() {
                        break;
                    }
                    let ratio = ((k + 2) as f64 / (k + 1) as f64).sqrt();
                    *o += u[k + 1] * rule.weight(k + 1).conj() * ratio;
                }
            }
            OperatorKind::ToeplitzHarmonic { symbol } => {
                let conj_symbol = HarmonicSymbol::new(
                    Polynomial {
                        coeffs: std::iter::once(
                            symbol
                                .analytic
                                .coeffs
                                .first()
                                .copied()
                                .unwrap_or(ZERO)
                                .conj(),
                        )
                        .chain(symbol.coanalytic.coeffs.iter().map(|z| z.conj()))
                        .collect(),
                    },
                    Polynomial {
                        coeffs: symbol
                            .analytic
                            .coeffs
                            .iter()
                            .skip(1)
                            .map(|z| z.conj())
                            .collect(),
                    },
                );
                let adj = Self {
                    space: self.space,
                    kind: OperatorKind::ToeplitzHarmonic {
                        symbol: conj_symbol,
                    },
                };
                out = adj.apply(u, out_len);
            }
            OperatorKind::FiniteRank { pairs } => {
                for p in pairs {
                    let ghat = onb_coefficients(&self.space, &p.g);
                    let hhat = onb_coefficients(&self.space, &p.h);
                    let s: C64 = hhat.iter().zip(u).map(|(h, x)| h.conj() * x).sum();
                    for (o, g) in out.iter_mut().zip(&ghat) {
                        *o += g * s;
                    }
                }
            }
            OperatorKind::Combination { terms, shift } => {
                for (c, t) in terms {
                    for (o, v) in out.iter_mut().zip(t.apply_adjoint(u, out_len)) {
                        *o += c.conj() * v;
                    }
                }
                if *shift != ZERO {
                    for (o, x) in out.iter_mut().zip(u) {
                        *o += shift.conj() * x;
                    }
                }
            }
            OperatorKind::Product { left, right } => {
                // (AB)* = B* A*; B* has upper bandwidth equal to B's lower one
                let mid = out_len + right.bandwidths().0;
                let v = left.apply_adjoint(u, mid);
                out = right.apply_adjoint(&v, out_len);
            }
            OperatorKind::Adjoint { inner } => out = inner.apply(u, out_len),
        }
        if let Some(n) = self.dimension() {
            out.iter_mut().skip(n).for_each(|z| *z = ZERO);
        }
        out
    }

    /// Short human-readable description used in reports and file headers.
    pub fn digest(&self) -> String {
        match &self.kind {
            OperatorKind::Matrix { entries } => {
                format!("matrix{}x{}", entries.rows(), entries.cols())
            }
            OperatorKind::CompositionDifferentiation { rho } => format!("dphi(rho={rho})"),
            OperatorKind::ToeplitzHarmonic { symbol } => format!(
                "toeplitz(deg={}/{}, {})",
                symbol.analytic_degree(),
                symbol.coanalytic_degree(),
                self.space
            ),
            OperatorKind::DirichletShift { rule } => match rule {
                WeightRule::Constant { c } => format!("dirichlet_shift(constant {c})"),
                WeightRule::COverN { c } => format!("dirichlet_shift(c_over_n {c})"),
                _ => format!("dirichlet_shift(list of {})", rule.list_len().unwrap_or(0)),
            },
            OperatorKind::FiniteRank { pairs } => format!("finite_rank({})", pairs.len()),
            OperatorKind::Combination { terms, shift } => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(c, t)| format!("{c}*{}", t.digest()))
                    .collect();
                format!("({} + {shift}I)", parts.join(" + "))
            }
            OperatorKind::Product { left, right } => {
                format!("{}.{}", left.digest(), right.digest())
            }
            OperatorKind::Adjoint { inner } => format!("{}*", inner.digest()),
        }
    }
}

/// Coordinates of a polynomial in the orthonormal basis: `aₘ‖zᵐ‖`.
pub fn onb_coefficients(space: &KernelSpace, p: &Polynomial) -> Vec<C64> {
    let c = space
        .kernel_coefficients(p.coeffs.len())
        .expect("disk space");
    p.coeffs
        .iter()
        .zip(c)
        .map(|(a, cm)| a / cm.sqrt())
        .collect()
}
