//! Berezin transforms, ranges, numbers and norms.
//!
//! `T̃(λ) = ⟨T k̂_λ, k̂_λ⟩`. Disk models with a closed form use it directly;
//! everything else goes through the kernel series in the orthonormal basis,
//! either with the truncation chosen from the kernel tail
//! ([`SeriesPolicy::Auto`]) or a fixed compression ([`SeriesPolicy::Fixed`]).
//! On `StandardFinite(n)` the kernels are the standard basis vectors, so the
//! transform at index `j` is the diagonal entry `M_jj`.

pub mod grid;
mod power;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{inner, norm_sq, ComplexMatrix};
use crate::operators::{OperatorKind, OperatorModel, WeightRule};
use crate::par;
use crate::rkhs::KernelSpace;
use crate::special::{dilog, neg_log1m};
use crate::C64;

pub use grid::DiskGrid;
pub use power::{power_class_check, PowerClassReport, PowerMargin, POWER_SLACK, SECTOR_SLACK};

/// Kernel index: a disk point, or a 1-based index on a finite space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Disk(C64),
    Index(usize),
}

impl Point {
    /// The point as a complex number (finite indices map to the real axis).
    pub fn as_complex(&self) -> C64 {
        match *self {
            Point::Disk(z) => z,
            Point::Index(j) => C64::new(j as f64, 0.0),
        }
    }
}

/// How non-closed-form transforms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SeriesPolicy {
    /// Truncate where the relative kernel tail drops below `1e−12` (cap 4096).
    #[default]
    Auto,
    /// Compress to the first `N` basis vectors.
    Fixed(usize),
}

/// Sampled Berezin range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeSampling {
    pub points: Vec<(Point, C64)>,
    pub space: KernelSpace,
    pub operator: String,
}

impl RangeSampling {
    pub fn values(&self) -> Vec<C64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

/// Whether the model has a closed-form Berezin transform.
pub fn has_closed_form(op: &OperatorModel) -> bool {
    match op.kind() {
        OperatorKind::Matrix { .. } | OperatorKind::Product { .. } => false,
        OperatorKind::CompositionDifferentiation { .. }
        | OperatorKind::ToeplitzHarmonic { .. }
        | OperatorKind::DirichletShift { .. }
        | OperatorKind::FiniteRank { .. } => true,
        OperatorKind::Combination { terms, .. } => terms.iter().all(|(_, t)| has_closed_form(t)),
        OperatorKind::Adjoint { inner } => has_closed_form(inner),
    }
}

fn closed_form(op: &OperatorModel, lambda: C64) -> C64 {
    let x = lambda.norm_sqr();
    match op.kind() {
        OperatorKind::CompositionDifferentiation { rho } => {
            let d = 1.0 - rho * x;
            lambda * ((1.0 - x) / (d * d))
        }
        OperatorKind::ToeplitzHarmonic { symbol } => symbol.eval(lambda),
        OperatorKind::DirichletShift { rule } => dirichlet_shift_transform(rule, lambda),
        OperatorKind::FiniteRank { pairs } => {
            let k2 = op.space().kernel_norm_sq(lambda).expect("checked point");
            let s: C64 = pairs
                .iter()
                .map(|p| p.g.eval(lambda).conj() * p.h.eval(lambda))
                .sum();
            s / k2
        }
        OperatorKind::Combination { terms, shift } => {
            terms
                .iter()
                .map(|(c, t)| c * closed_form(t, lambda))
                .sum::<C64>()
                + shift
        }
        OperatorKind::Adjoint { inner } => closed_form(inner, lambda).conj(),
        OperatorKind::Matrix { .. } | OperatorKind::Product { .. } => {
            unreachable!("no closed form")
        }
    }
}

/// `T̃(λ) = (x/L)·λ·Σ_{n≥0} β_{n+1} xⁿ/(n+1)` with `x = |λ|²`, `L = ln(1/(1−x))`.
fn dirichlet_shift_transform(rule: &WeightRule, lambda: C64) -> C64 {
    let x = lambda.norm_sqr();
    if x == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let l = neg_log1m(x);
    match rule {
        WeightRule::Constant { c } => c * lambda,
        WeightRule::COverN { c } => c * lambda * (dilog(x) / l),
        _ => {
            let m = rule.list_len().unwrap_or(0);
            let mut s = C64::new(0.0, 0.0);
            let mut pow = 1.0;
            for n in 0..m {
                s += rule.weight(n + 1) * (pow / (n + 1) as f64);
                pow *= x;
            }
            lambda * s * (x / l)
        }
    }
}

/// `⟨M u, u⟩/‖u‖²` for the kernel vector of length `N` using the
/// matrix-free action.
fn series_value(op: &OperatorModel, lambda: C64, n: usize) -> Result<C64> {
    let u = op.space().truncated_kernel_vector(lambda, n)?;
    let tu = op.apply(&u, n);
    Ok(inner(&tu, &u) / norm_sq(&u))
}

/// Berezin transform through the kernel series with the automatic
/// truncation, bypassing any closed form.
pub fn berezin_transform_series(op: &OperatorModel, lambda: C64) -> Result<C64> {
    let space = op.space();
    space.check_point(lambda)?;
    let n = space
        .truncation_for(lambda.norm())?
        .max(op.min_truncation());
    series_value(op, lambda, n)
}

/// Prepared evaluator; caches the dense compression for fixed policies.
pub struct Evaluator<'a> {
    op: &'a OperatorModel,
    mode: Mode,
}

enum Mode {
    Finite(ComplexMatrix),
    Closed,
    Auto,
    Dense { m: ComplexMatrix, sqrt_c: Vec<f64> },
}

impl<'a> Evaluator<'a> {
    pub fn new(op: &'a OperatorModel, policy: SeriesPolicy) -> Result<Self> {
        let space = op.space();
        let mode = if !space.is_disk() {
            Mode::Finite(op.truncate(1)?)
        } else if has_closed_form(op) {
            Mode::Closed
        } else {
            match policy {
                SeriesPolicy::Auto => Mode::Auto,
                SeriesPolicy::Fixed(n) => {
                    let m = op.truncate(n)?;
                    let sqrt_c = space
                        .kernel_coefficients(n)?
                        .iter()
                        .map(|c| c.sqrt())
                        .collect();
                    Mode::Dense { m, sqrt_c }
                }
            }
        };
        Ok(Self { op, mode })
    }

    pub fn operator(&self) -> &OperatorModel {
        self.op
    }

    /// Dense matrix used on finite spaces and for fixed compressions.
    pub fn matrix(&self) -> Option<&ComplexMatrix> {
        match &self.mode {
            Mode::Finite(m) | Mode::Dense { m, .. } => Some(m),
            _ => None,
        }
    }

    pub fn eval(&self, point: Point) -> Result<C64> {
        match (&self.mode, point) {
            (Mode::Finite(m), Point::Index(j)) => {
                if j == 0 || j > m.rows() {
                    return Err(Error::OutOfDomain(format!(
                        "index {j} outside 1..={}",
                        m.rows()
                    )));
                }
                Ok(m[(j - 1, j - 1)])
            }
            (Mode::Finite(_), Point::Disk(z)) => Err(Error::OutOfDomain(format!(
                "disk point {z} on {}",
                self.op.space()
            ))),
            (_, Point::Index(j)) => Err(Error::OutOfDomain(format!(
                "index {j} on {}",
                self.op.space()
            ))),
            (Mode::Closed, Point::Disk(z)) => {
                self.op.space().check_point(z)?;
                Ok(closed_form(self.op, z))
            }
            (Mode::Auto, Point::Disk(z)) => berezin_transform_series(self.op, z),
            (Mode::Dense { m, sqrt_c }, Point::Disk(z)) => {
                self.op.space().check_point(z)?;
                let u = kernel_from_sqrt(sqrt_c, z);
                let mu = m.mul_vec(&u);
                Ok(inner(&mu, &u) / norm_sq(&u))
            }
        }
    }

    pub fn eval_disk(&self, z: C64) -> Result<C64> {
        self.eval(Point::Disk(z))
    }
}

fn kernel_from_sqrt(sqrt_c: &[f64], z: C64) -> Vec<C64> {
    let zb = z.conj();
    let mut pow = C64::new(1.0, 0.0);
    sqrt_c
        .iter()
        .map(|&s| {
            let v = pow * s;
            pow *= zb;
            v
        })
        .collect()
}

/// `T̃(λ)` with the automatic series policy.
pub fn berezin_transform(op: &OperatorModel, point: Point) -> Result<C64> {
    Evaluator::new(op, SeriesPolicy::Auto)?.eval(point)
}

/// Compressed transform `⟨M_N u, u⟩/‖u‖²` with `u` the kernel truncated to `N`.
pub fn compressed_transform(op: &OperatorModel, lambda: C64, n: usize) -> Result<C64> {
    op.space().check_point(lambda)?;
    series_value(op, lambda, n)
}

/// Kernel indices sampled for `op`: the grid on the disk, all indices on a
/// finite space.
pub fn sample_points(space: KernelSpace, grid: &DiskGrid) -> Vec<Point> {
    match space.dimension() {
        Some(n) => (1..=n).map(Point::Index).collect(),
        None => grid.points().into_iter().map(Point::Disk).collect(),
    }
}

/// Evaluates the transform at every grid point, radial-major.
pub fn sample_range(
    op: &OperatorModel,
    grid: &DiskGrid,
    policy: SeriesPolicy,
) -> Result<RangeSampling> {
    let ev = Evaluator::new(op, policy)?;
    sample_with(&ev, grid)
}

pub fn sample_with(ev: &Evaluator<'_>, grid: &DiskGrid) -> Result<RangeSampling> {
    let pts = sample_points(ev.op.space(), grid);
    let values = par::try_map_indexed(pts.len(), |i| ev.eval(pts[i]))?;
    if let Some(bad) = values
        .iter()
        .position(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::OutOfDomain(format!(
            "non-finite transform at {:?}",
            pts[bad]
        )));
    }
    Ok(RangeSampling {
        points: pts.into_iter().zip(values).collect(),
        space: ev.op.space(),
        operator: ev.op.digest(),
    })
}

/// Result of a supremum search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub value: f64,
    pub argmax: Point,
}

/// Grid maximum of `f` followed by `refine` rounds of windowed refinement.
///
/// Ties go to the smallest grid index. The running maximum is kept, so the
/// value is nondecreasing in `refine`.
pub fn grid_sup<F>(f: F, grid: &DiskGrid, refine: usize) -> Result<SupResult>
where
    F: Fn(C64) -> Result<f64> + Sync + Send,
{
    let mut best: Option<(f64, C64, f64, f64)> = None;
    let mut g = *grid;
    for round in 0..=refine {
        let vals = par::try_map_indexed(g.len(), |i| f(g.point(i)))?;
        let mut k = 0;
        for (i, v) in vals.iter().enumerate() {
            if *v > vals[k] {
                k = i;
            }
        }
        let (r, z) = g.polar(k);
        match best {
            Some((v, ..)) if vals[k] <= v => {}
            _ => best = Some((vals[k], g.point(k), r, z)),
        }
        if round < refine {
            let (_, _, r, z) = best.expect("set above");
            g = g.refined_within(r, z, grid.r_hi);
        }
    }
    let (value, p, _, _) = best.expect("grid is nonempty");
    Ok(SupResult {
        value,
        argmax: Point::Disk(p),
    })
}

/// `ber(T) = sup |T̃|`: exact on finite spaces, grid plus refinement on the disk.
pub fn berezin_number(
    op: &OperatorModel,
    grid: &DiskGrid,
    refine: usize,
    policy: SeriesPolicy,
) -> Result<SupResult> {
    let ev = Evaluator::new(op, policy)?;
    berezin_number_with(&ev, grid, refine)
}

pub fn berezin_number_with(
    ev: &Evaluator<'_>,
    grid: &DiskGrid,
    refine: usize,
) -> Result<SupResult> {
    if let Mode::Finite(m) = &ev.mode {
        let mut best = 0;
        for j in 0..m.rows() {
            if m[(j, j)].norm() > m[(best, best)].norm() {
                best = j;
            }
        }
        return Ok(SupResult {
            value: m[(best, best)].norm(),
            argmax: Point::Index(best + 1),
        });
    }
    grid_sup(|z| ev.eval_disk(z).map(|v| v.norm()), grid, refine)
}

/// `‖T‖_ber = sup |⟨T k̂_λ, k̂_μ⟩|`.
///
/// Finite spaces give `max |M_ij|` exactly. On the disk the double supremum
/// runs over pairs from `grid` using the compression to `n` basis vectors, and
/// is a lower bound.
pub fn berezin_norm(op: &OperatorModel, grid: &DiskGrid, n: usize) -> Result<f64> {
    let space = op.space();
    if !space.is_disk() {
        return Ok(op.truncate(1)?.max_abs());
    }
    let m = op.truncate(n)?;
    berezin_norm_of_matrix(&m, space, grid)
}

/// Disk Berezin norm of an already compressed matrix.
pub fn berezin_norm_of_matrix(
    m: &ComplexMatrix,
    space: KernelSpace,
    grid: &DiskGrid,
) -> Result<f64> {
    let n = m.rows();
    let sqrt_c: Vec<f64> = space
        .kernel_coefficients(n)?
        .iter()
        .map(|c| c.sqrt())
        .collect();
    let pts = grid.points();
    let kernels: Vec<Vec<C64>> = pts
        .iter()
        .map(|&z| {
            let u = kernel_from_sqrt(&sqrt_c, z);
            let s = norm_sq(&u).sqrt();
            u.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let images: Vec<Vec<C64>> = par::map_indexed(kernels.len(), |i| m.mul_vec(&kernels[i]));
    let row_max = par::map_indexed(images.len(), |i| {
        kernels
            .iter()
            .map(|k| inner(&images[i], k).norm())
            .fold(0.0, f64::max)
    });
    Ok(row_max.into_iter().fold(0.0, f64::max))
}
