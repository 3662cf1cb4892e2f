//! Numerical ranges, closed-form bounds for the composition-differentiation
//! operator, and sectorial classification.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::berezin::{sample_range, DiskGrid, SeriesPolicy};
use crate::error::{Error, Result};
use crate::numerics::{inner, max_eigenpair, max_eigenvalue, ComplexMatrix};
use crate::operators::OperatorModel;
use crate::optimize::golden_max;
use crate::par;
use crate::C64;

/// Default angle count for support-function sweeps.
pub const DEFAULT_ANGLES: usize = 720;
/// Default vertex tolerance for sector classification.
pub const SECTOR_TOL: f64 = 1e-10;

/// `ℜ(e^{−iφ}M) = (e^{−iφ}M + e^{iφ}M*)/2`.
pub fn rotated_real_part(m: &ComplexMatrix, phi: f64) -> ComplexMatrix {
    let n = m.rows();
    let w = C64::from_polar(1.0, -phi);
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = (w * m[(i, j)] + (w * m[(j, i)]).conj()) * 0.5;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
        h[(i, i)] = C64::new(h[(i, i)].re, 0.0);
    }
    h
}

/// Support function `h(φ) = max Re(e^{−iφ} W(M))`.
pub fn support(m: &ComplexMatrix, phi: f64) -> Result<f64> {
    max_eigenvalue(&rotated_real_part(m, phi))
}

fn require_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "numerical range needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

/// `K` boundary points of `W(M)` from the support-function sweep
/// `φ_k = 2πk/K`; the point for `φ_k` is `⟨Mv, v⟩` with `v` a top eigenvector
/// of `ℜ(e^{−iφ_k}M)`.
pub fn numerical_range_boundary(m: &ComplexMatrix, angles: usize) -> Result<Vec<C64>> {
    require_square(m)?;
    if angles < 8 {
        return Err(Error::InvalidParameter(format!(
            "need at least 8 angles, got {angles}"
        )));
    }
    par::try_map_indexed(angles, |k| {
        let phi = 2.0 * PI * k as f64 / angles as f64;
        let (_, v) = max_eigenpair(&rotated_real_part(m, phi))?;
        Ok(inner(&m.mul_vec(&v), &v))
    })
}

/// `w(M) = max_φ h(φ)` with the default sweep.
pub fn numerical_radius(m: &ComplexMatrix) -> Result<f64> {
    numerical_radius_with(m, DEFAULT_ANGLES)
}

/// `w(M)` from a `K`-angle sweep followed by golden-section polish within
/// `±2π/K` of the best angle.
pub fn numerical_radius_with(m: &ComplexMatrix, angles: usize) -> Result<f64> {
    require_square(m)?;
    if angles < 8 {
        return Err(Error::InvalidParameter(format!(
            "need at least 8 angles, got {angles}"
        )));
    }
    let step = 2.0 * PI / angles as f64;
    let vals = par::try_map_indexed(angles, |k| support(m, step * k as f64))?;
    let mut best = 0;
    for (k, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = k;
        }
    }
    let center = step * best as f64;
    let mut failure = None;
    let polished = golden_max(
        |phi| match support(m, phi) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        center - step,
        center + step,
        1e-10,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(polished.value.max(vals[best]).max(0.0))
}

/// Closed-form quantities for `D_φ`, `φ(z) = ρz`, on the Hardy space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DphiBounds {
    pub rho: f64,
    /// `‖D_φ‖ = m ρ^{m−1}`, `m = ⌊1/(1−ρ)⌋`.
    pub norm: f64,
    /// Reference Berezin-range radius `max_r (1−r²)ρr/(1−ρr²)²`; the supremum
    /// of `|D̃_φ|` itself is `berezin_radius`.
    pub r1: f64,
    /// `‖D_φ‖/2`, radius of a disk inside `W(D_φ)`.
    pub r2: f64,
    /// Reference outer radius `½(‖D_φ‖ + √p ρ^{p−½})`, `p = ⌊(1+ρ²)/(1−ρ²)⌋`.
    pub r3: f64,
    /// `‖Aluthge(D_φ)‖ = √(p(p+1)) ρ^{p−½}`.
    pub aluthge_norm: f64,
    /// `sup |D̃_φ| = max_r (1−r²)r/(1−ρr²)² = r1/ρ`.
    pub berezin_radius: f64,
    /// `½(‖D_φ‖ + ‖Aluthge(D_φ)‖)`, the outer radius with the full Aluthge norm.
    pub r3_aluthge: f64,
    pub checks: DphiChecks,
}

/// Independent numeric evaluations of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DphiChecks {
    /// Golden-section maximum of `(1−r²)ρr/(1−ρr²)²`.
    pub r1_numeric: f64,
    /// `max_{n ≤ 10⁴} nρ^{n−1}`.
    pub norm_numeric: f64,
    /// `max_{n ≤ 10⁴} √(w_n w_{n+1})`.
    pub aluthge_numeric: f64,
}

/// Closed form of `r₁(ρ) = max_r (1−r²)ρr/(1−ρr²)²`.
pub fn r1_closed(rho: f64) -> f64 {
    let s = (9.0 * rho * rho - 14.0 * rho + 9.0).sqrt();
    let num = (3.0 - s - rho) * (6.0 * rho + 2.0 * s - 6.0).sqrt();
    let den = rho.sqrt() * (3.0 * rho + s - 5.0).powi(2);
    num / den
}

/// `f(r) = (1−r²)ρr/(1−ρr²)²`.
pub fn r1_objective(rho: f64, r: f64) -> f64 {
    let d = 1.0 - rho * r * r;
    (1.0 - r * r) * rho * r / (d * d)
}

pub fn dphi_closed_bounds(rho: f64) -> Result<DphiBounds> {
    if !(1e-6..=1.0 - 1e-6).contains(&rho) {
        return Err(Error::OutOfDomain(format!(
            "rho = {rho} outside [1e-6, 1-1e-6]"
        )));
    }
    let m = (1.0 / (1.0 - rho)).floor();
    let norm = m * rho.powf(m - 1.0);
    let p = ((1.0 + rho * rho) / (1.0 - rho * rho)).floor();
    let aluthge_norm = (p * (p + 1.0)).sqrt() * rho.powf(p - 0.5);
    let r1 = r1_closed(rho);
    let r2 = norm / 2.0;
    let r3 = 0.5 * (norm + p.sqrt() * rho.powf(p - 0.5));

    let r1_numeric = golden_max(|r| r1_objective(rho, r), 0.0, 1.0, 1e-12).value;
    let mut norm_numeric: f64 = 0.0;
    let mut aluthge_numeric: f64 = 0.0;
    let weight = |n: f64| n * rho.powf(n - 1.0);
    for n in 1..=10_000 {
        let n = n as f64;
        norm_numeric = norm_numeric.max(weight(n));
        aluthge_numeric = aluthge_numeric.max((weight(n) * weight(n + 1.0)).sqrt());
    }
    Ok(DphiBounds {
        rho,
        norm,
        r1,
        r2,
        r3,
        aluthge_norm,
        berezin_radius: r1 / rho,
        r3_aluthge: 0.5 * (norm + aluthge_norm),
        checks: DphiChecks {
            r1_numeric,
            norm_numeric,
            aluthge_numeric,
        },
    })
}

/// Sectorial classification of a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    /// Semi-angle `θ*`, or `None` when the points leave every sector.
    pub index: Option<f64>,
    /// Point attaining `θ*`.
    pub witness: Option<C64>,
    /// Points with `Re ≤ −tol` or `|arg| ≥ π/2`.
    pub violations: Vec<C64>,
    /// Points within `tol` of the vertex, excluded from the angle.
    pub skipped: usize,
    pub total: usize,
}

impl SectorReport {
    pub fn is_sectorial(&self) -> bool {
        self.index.is_some()
    }

    /// `π/θ*`, the form in which sector indices are usually quoted.
    pub fn pi_over_index(&self) -> Option<f64> {
        self.index.map(|t| PI / t)
    }

    /// Whether the points lie in `S_θ` up to `slack`.
    pub fn within(&self, theta: f64, slack: f64) -> bool {
        self.index.map(|t| t <= theta + slack).unwrap_or(false)
    }
}

pub fn sector_index(points: &[C64], tol: f64) -> Result<SectorReport> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut best: Option<(f64, C64)> = None;
    let mut violations = Vec::new();
    let mut skipped = 0;
    for &z in points {
        if z.norm() <= tol {
            skipped += 1;
            continue;
        }
        let a = z.arg().abs();
        if z.re <= -tol || a >= PI / 2.0 {
            violations.push(z);
            continue;
        }
        match best {
            Some((b, _)) if a <= b => {}
            _ => best = Some((a, z)),
        }
    }
    let index = if violations.is_empty() {
        Some(best.map(|b| b.0).unwrap_or(0.0))
    } else {
        None
    };
    Ok(SectorReport {
        index,
        witness: if violations.is_empty() {
            best.map(|b| b.1)
        } else {
            None
        },
        violations,
        skipped,
        total: points.len(),
    })
}

/// Berezin and classical sectorial indices of one operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub berezin: SectorReport,
    /// From the numerical range of the `N`-truncation.
    pub classical: SectorReport,
    /// Same at `2N`.
    pub classical_doubled: SectorReport,
    pub truncation: usize,
    /// Numerical radius of the `N` and `2N` truncations.
    pub numerical_radius: f64,
    pub numerical_radius_doubled: f64,
    /// `|θ*(N) − θ*(2N)|`, or the numerical-radius drift when either fails.
    pub drift: f64,
    /// Berezin sectorial while the truncation is not sectorial.
    pub berezin_but_not_sectorial: bool,
}

pub fn classify(
    op: &OperatorModel,
    grid: &DiskGrid,
    truncation: usize,
    angles: usize,
) -> Result<Classification> {
    let sampling = sample_range(op, grid, SeriesPolicy::Fixed(truncation))?;
    let berezin = sector_index(&sampling.values(), SECTOR_TOL)?;
    let doubled = truncation.saturating_mul(2);
    let m1 = op.truncate(truncation)?;
    let m2 = op.truncate(doubled)?;
    let classical = sector_index(&numerical_range_boundary(&m1, angles)?, SECTOR_TOL)?;
    let classical_doubled = sector_index(&numerical_range_boundary(&m2, angles)?, SECTOR_TOL)?;
    let w1 = numerical_radius_with(&m1, angles)?;
    let w2 = numerical_radius_with(&m2, angles)?;
    let drift = match (classical.index, classical_doubled.index) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => (w1 - w2).abs(),
    };
    let berezin_but_not_sectorial = berezin.is_sectorial() && !classical.is_sectorial();
    Ok(Classification {
        berezin,
        classical,
        classical_doubled,
        truncation,
        numerical_radius: w1,
        numerical_radius_doubled: w2,
        drift,
        berezin_but_not_sectorial,
    })
}
