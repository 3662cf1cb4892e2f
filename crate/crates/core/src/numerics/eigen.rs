//! Hermitian eigenproblems.
//!
//! Two routes:
//! * [`hermitian_eigen`] runs cyclic complex Jacobi and returns the full
//!   decomposition.
//! * [`max_eigenpair`] / [`min_eigenpair`] reduce to a real symmetric
//!   tridiagonal matrix (Householder, then a diagonal phase scaling), locate
//!   the extreme eigenvalue by Sturm bisection and recover its eigenvector by
//!   inverse iteration. This is the workhorse of the support-function sweeps.

use crate::error::{Error, Result};
use crate::numerics::{tol, ComplexMatrix};
use crate::C64;

/// Full eigendecomposition `H = V diag(values) V*`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        &scaled * &self.vectors.adjoint()
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let dev = h.hermitian_deviation();
    if dev > tol::HERMITIAN * (1.0 + h.max_abs()) {
        return Err(Error::NonHermitian { deviation: dev });
    }
    Ok(())
}

/// Cyclic Jacobi with the default off-diagonal threshold.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eigen_tol(h, tol::JACOBI_OFF)
}

/// Cyclic Jacobi; stops once the off-diagonal Frobenius mass falls below
/// `off_tol` times the Frobenius norm of `h`.
pub fn hermitian_eigen_tol(h: &ComplexMatrix, off_tol: f64) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let n = h.rows();
    // symmetrize so that roundoff asymmetry does not leak into the rotations
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = C64::new(h[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = off_tol * scale;

    let mut converged = false;
    for _sweep in 0..tol::JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence {
            sweeps: tol::JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new)] = v[(r, old)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = b / babs;
    let theta = (aqq - app) / (2.0 * babs);
    let t = if theta.is_finite() {
        let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
        sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph = phase.conj();
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -ph * s;
    let g_qq = ph * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty() && off.len() + 1 == diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let (lo, hi) = self.gershgorin();
        let tiny = f64::EPSILON * (lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE));
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let b = self.off[i - 1];
                q = self.diag[i] - x - b * b / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th eigenvalue in ascending order (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1e-300);
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for an (approximate) eigenvalue `mu` by inverse iteration.
    pub fn eigenvector(&self, mu: f64) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let mut y: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        let mut shift = mu + 4.0 * f64::EPSILON * scale;
        for _attempt in 0..4 {
            let mut ok = true;
            let mut z = y.clone();
            for _ in 0..3 {
                self.solve_shifted(shift, &mut z, scale);
                let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !norm.is_finite() || norm == 0.0 {
                    ok = false;
                    break;
                }
                for x in &mut z {
                    *x /= norm;
                }
            }
            if ok {
                return z;
            }
            shift += 1e3 * f64::EPSILON * scale;
            y.iter_mut().for_each(|x| *x = 1.0);
        }
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    }

    /// Solves `(T - mu I) x = rhs` in place by pivoted tridiagonal elimination.
    fn solve_shifted(&self, mu: f64, rhs: &mut [f64], scale: f64) {
        let n = self.len();
        let pert = f64::EPSILON * scale;
        let mut d: Vec<f64> = self.diag.iter().map(|a| a - mu).collect();
        let mut dl = self.off.clone();
        let mut du = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = pert;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = pert;
        }
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = rhs[i];
                rhs[i] = rhs[i + 1];
                rhs[i + 1] = temp - dl[i] * rhs[i];
            } else {
                rhs[i + 1] -= dl[i] * rhs[i];
            }
        }
        rhs[n - 1] /= d[n - 1];
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
        }
    }
}

/// Unitary reduction `H = Q T Q*` with `T` real symmetric tridiagonal.
struct Reduction {
    tri: Tridiagonal,
    /// `None` when no Householder step was needed.
    q: Option<ComplexMatrix>,
    /// Diagonal phases mapping real tridiagonal eigenvectors back.
    phases: Vec<C64>,
}

impl Reduction {
    fn back_transform(&self, y: &[f64]) -> Vec<C64> {
        let x: Vec<C64> = y.iter().zip(&self.phases).map(|(&yi, &d)| d * yi).collect();
        match &self.q {
            Some(q) => q.mul_vec(&x),
            None => x,
        }
    }
}

fn is_tridiagonal(h: &ComplexMatrix) -> bool {
    let n = h.rows();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && h[(i, j)] != C64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

fn reduce(h: &ComplexMatrix) -> Reduction {
    let n = h.rows();
    let (a, q) = if is_tridiagonal(h) {
        (h.clone(), None)
    } else {
        let (a, q) = householder(h);
        (a, Some(q))
    };
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut phases = Vec::with_capacity(n);
    phases.push(C64::new(1.0, 0.0));
    for k in 0..n.saturating_sub(1) {
        // lower and upper entries agree up to conjugation; average them
        let e = (a[(k + 1, k)] + a[(k, k + 1)].conj()) * 0.5;
        let mag = e.norm();
        off.push(mag);
        let next = if mag > 0.0 {
            phases[k] * (e / mag)
        } else {
            phases[k]
        };
        phases.push(next);
    }
    Reduction {
        tri: Tridiagonal::new(diag, off),
        q,
        phases,
    }
}

fn householder(h: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = h.rows();
    let mut a = h.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm_sq;

        // trailing block update B <- H B H
        let mut p = vec![C64::new(0.0, 0.0); m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = a.row(k + 1 + i);
            let mut s = C64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                s += row[k + 1 + j] * vj;
            }
            *pi = s * tau;
        }
        let vp: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kk = vp.re * tau * 0.5;
        let qv: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * qv[j].conj() + qv[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] -= upd;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
            a[(k, i)] = C64::new(0.0, 0.0);
        }
        // Q <- Q H
        for r in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                s += q[(r, k + 1 + j)] * vj;
            }
            let s = s * tau;
            for (j, vj) in v.iter().enumerate() {
                q[(r, k + 1 + j)] -= s * vj.conj();
            }
        }
    }
    (a, q)
}

/// Largest eigenvalue with a unit eigenvector.
pub fn max_eigenpair(h: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    extreme_eigenpair(h, true)
}

/// Smallest eigenvalue with a unit eigenvector.
pub fn min_eigenpair(h: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    extreme_eigenpair(h, false)
}

/// Largest eigenvalue only.
pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    check_hermitian(h)?;
    let red = reduce(h);
    Ok(red.tri.eigenvalue(red.tri.len() - 1))
}

/// Smallest eigenvalue only.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    check_hermitian(h)?;
    Ok(reduce(h).tri.eigenvalue(0))
}

fn extreme_eigenpair(h: &ComplexMatrix, top: bool) -> Result<(f64, Vec<C64>)> {
    check_hermitian(h)?;
    let red = reduce(h);
    let k = if top { red.tri.len() - 1 } else { 0 };
    let lambda = red.tri.eigenvalue(k);
    let y = red.tri.eigenvector(lambda);
    let mut v = red.back_transform(&y);
    let norm = super::norm_sq(&v).sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    Ok((lambda, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn residual(h: &ComplexMatrix, e: &HermitianEigen) -> f64 {
        (&e.reconstruct() - h).max_abs()
    }

    #[test]
    fn diagonal_input() {
        let h = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = hermitian_eigen(&h).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors[(1, 0)], c(1.0, 0.0));
        assert_eq!(e.vectors[(2, 1)], c(1.0, 0.0));
        assert_eq!(e.vectors[(0, 2)], c(1.0, 0.0));
    }

    #[test]
    fn swap_matrix() {
        let h = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // (2 - x)^2 - 1 = 0
        let h = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        assert!(residual(&h, &e) < 1e-13);
        let (top, v) = max_eigenpair(&h).unwrap();
        assert!((top - 3.0).abs() < 1e-14);
        let hv = h.mul_vec(&v);
        for (a, b) in hv.iter().zip(&v) {
            assert!((a - b * 3.0).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            hermitian_eigen(&h),
            Err(Error::NonHermitian { .. })
        ));
        assert!(matches!(max_eigenpair(&h), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn tridiagonal_route_on_dense_input() {
        let n = 7;
        let mut h = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = c((i as f64).sin() * 3.0, 0.0);
            for j in i + 1..n {
                let z = c(((i * 7 + j) as f64).cos(), ((i + 3 * j) as f64).sin());
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let e = hermitian_eigen(&h).unwrap();
        assert!(residual(&h, &e) < 1e-12);
        let (top, v) = max_eigenpair(&h).unwrap();
        let (bottom, w) = min_eigenpair(&h).unwrap();
        assert!((top - e.values[n - 1]).abs() < 1e-12);
        assert!((bottom - e.values[0]).abs() < 1e-12);
        for (vec, lam) in [(v, top), (w, bottom)] {
            let hv = h.mul_vec(&vec);
            for (a, b) in hv.iter().zip(&vec) {
                assert!((a - b * lam).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn sturm_count() {
        let t = Tridiagonal::new(vec![2.0, 2.0, 2.0], vec![-1.0, -1.0]);
        // eigenvalues 2 - sqrt2, 2, 2 + sqrt2
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(1.0), 1);
        assert_eq!(t.count_below(3.0), 2);
        assert!((t.eigenvalue(2) - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }
}
