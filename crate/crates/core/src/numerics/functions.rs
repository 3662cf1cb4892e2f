//! Matrix functions built on the Hermitian eigensolvers.

use crate::error::{Error, Result};
use crate::numerics::eigen::{hermitian_eigen, max_eigenvalue};
use crate::numerics::{norm_sq, tol, ComplexMatrix};
use crate::C64;

/// Polar factors `A = U |A|` with `U` a partial isometry vanishing on `ker |A|`.
#[derive(Debug, Clone)]
pub struct Polar {
    pub u: ComplexMatrix,
    pub abs: ComplexMatrix,
    /// `|A|^{1/2}`, kept because the Aluthge transform needs it.
    pub abs_sqrt: ComplexMatrix,
}

fn require_square(a: &ComplexMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}

/// `V diag(f) V*`.
fn spectral(vectors: &ComplexMatrix, f: &[f64]) -> ComplexMatrix {
    let n = f.len();
    let mut scaled = vectors.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] *= f[j];
        }
    }
    let mut out = &scaled * &vectors.adjoint();
    // exact Hermitian symmetry
    for i in 0..n {
        out[(i, i)] = C64::new(out[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
    }
    out
}

/// Principal square root of a Hermitian PSD matrix.
pub fn psd_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = hermitian_eigen(p)?;
    let floor = tol::PSD_CLAMP * p.max_abs().max(1.0);
    let mut roots = Vec::with_capacity(e.values.len());
    for &lam in &e.values {
        if lam < floor {
            return Err(Error::NotPsd { eigenvalue: lam });
        }
        roots.push(lam.max(0.0).sqrt());
    }
    Ok(spectral(&e.vectors, &roots))
}

/// Polar decomposition through the eigendecomposition of `A*A`.
///
/// Singular values are recomputed as `‖A v_i‖`, which is accurate for the
/// small ones where `sqrt(eigenvalue)` is not.
pub fn polar_decompose(a: &ComplexMatrix) -> Result<Polar> {
    require_square(a)?;
    let n = a.rows();
    let gram = &a.adjoint() * a;
    let e = hermitian_eigen(&gram)?;
    let av = a * &e.vectors;
    let sigma: Vec<f64> = (0..n).map(|j| norm_sq(&av.column(j)).sqrt()).collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = 1e-11 * (1.0 + smax);
    let mut u = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        if sigma[j] <= cutoff {
            continue;
        }
        for r in 0..n {
            let left = av[(r, j)] / sigma[j];
            for c in 0..n {
                u[(r, c)] += left * e.vectors[(c, j)].conj();
            }
        }
    }
    let abs = spectral(&e.vectors, &sigma);
    let roots: Vec<f64> = sigma.iter().map(|s| s.sqrt()).collect();
    let abs_sqrt = spectral(&e.vectors, &roots);
    Ok(Polar { u, abs, abs_sqrt })
}

/// `|A|^{1/2} U |A|^{1/2}`.
pub fn aluthge(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = polar_decompose(a)?;
    Ok(&(&p.abs_sqrt * &p.u) * &p.abs_sqrt)
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = if a.rows() >= a.cols() {
        &a.adjoint() * a
    } else {
        a * &a.adjoint()
    };
    Ok(max_eigenvalue(&gram)?.max(0.0).sqrt())
}

/// Inverse by Gaussian elimination with partial pivoting.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a)?;
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .norm()
                    .total_cmp(&m[(j, col)].norm())
                    .then(j.cmp(&i))
            })
            .expect("non-empty range");
        if m[(pivot, col)].norm() == 0.0 {
            return Err(Error::Singular { sigma_min: 0.0 });
        }
        if pivot != col {
            for k in 0..n {
                let t = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = t;
                let t = inv[(col, k)];
                inv[(col, k)] = inv[(pivot, k)];
                inv[(pivot, k)] = t;
            }
        }
        let d = m[(col, col)];
        for k in 0..n {
            m[(col, k)] /= d;
            inv[(col, k)] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[(r, col)];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..n {
                let mk = m[(col, k)];
                let ik = inv[(col, k)];
                m[(r, k)] -= f * mk;
                inv[(r, k)] -= f * ik;
            }
        }
    }
    Ok(inv)
}

/// `1/σ_min(A)`, computed as `‖A⁻¹‖`.
pub fn inverse_norm(a: &ComplexMatrix) -> Result<f64> {
    let inv = inverse(a)?;
    let norm = operator_norm(&inv)?;
    let sigma_min = 1.0 / norm;
    if !norm.is_finite() || sigma_min <= tol::SINGULAR {
        return Err(Error::Singular {
            sigma_min: if norm.is_finite() { sigma_min } else { 0.0 },
        });
    }
    Ok(norm)
}

/// Hermitian parts `(A + A*)/2` and `(A - A*)/2i`.
pub fn cartesian_parts(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut re = ComplexMatrix::zeros(n, a.cols());
    let mut im = ComplexMatrix::zeros(n, a.cols());
    for i in 0..n {
        for j in 0..a.cols() {
            let x = a[(i, j)];
            let y = a[(j, i)].conj();
            re[(i, j)] = (x + y) * 0.5;
            im[(i, j)] = (x - y) * C64::new(0.0, -0.5);
        }
    }
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn m(rows: Vec<Vec<C64>>) -> ComplexMatrix {
        ComplexMatrix::from_rows(rows).unwrap()
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, eps: f64) -> bool {
        (a - b).max_abs() <= eps
    }

    #[test]
    fn sqrt_examples() {
        let id = ComplexMatrix::identity(3);
        assert!(close(&psd_sqrt(&id).unwrap(), &id, 1e-14));
        let d = ComplexMatrix::from_real_diag(&[4.0, 9.0]);
        assert!(close(
            &psd_sqrt(&d).unwrap(),
            &ComplexMatrix::from_real_diag(&[2.0, 3.0]),
            1e-14
        ));
        let a = m(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let p = &a.adjoint() * &a;
        let r = psd_sqrt(&p).unwrap();
        assert!(close(&(&r * &r), &p, 1e-8 * (1.0 + p.max_abs())));
    }

    #[test]
    fn sqrt_rejects_negative() {
        let d = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&d), Err(Error::NotPsd { .. })));
        let d = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        assert!(psd_sqrt(&d).is_ok());
    }

    #[test]
    fn polar_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let unitary = m(vec![vec![c(s, 0.0), c(0.0, s)], vec![c(0.0, s), c(s, 0.0)]]);
        let p = polar_decompose(&unitary).unwrap();
        assert!(close(&p.u, &unitary, 1e-12));
        assert!(close(&p.abs, &ComplexMatrix::identity(2), 1e-12));

        let d = ComplexMatrix::from_real_diag(&[2.0, -3.0]);
        let p = polar_decompose(&d).unwrap();
        assert!(close(
            &p.u,
            &ComplexMatrix::from_real_diag(&[1.0, -1.0]),
            1e-12
        ));
        assert!(close(
            &p.abs,
            &ComplexMatrix::from_real_diag(&[2.0, 3.0]),
            1e-12
        ));

        let shift = m(vec![
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let p = polar_decompose(&shift).unwrap();
        assert!(close(
            &p.abs,
            &ComplexMatrix::from_real_diag(&[1.0, 0.0]),
            1e-12
        ));
        assert!(close(&p.u, &shift, 1e-12));
        assert!(close(&(&p.u * &p.abs), &shift, 1e-12));
    }

    #[test]
    fn aluthge_examples() {
        let nil = m(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(aluthge(&nil).unwrap().max_abs() < 1e-12);

        let normal = m(vec![
            vec![c(1.0, 2.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-3.0, 0.5)],
        ]);
        assert!(close(&aluthge(&normal).unwrap(), &normal, 1e-12));

        // lower shift with weights w_1..w_4
        let w = [1.0, 2.0, 0.5, 3.0];
        let n = w.len() + 1;
        let mut a = ComplexMatrix::zeros(n, n);
        for (k, wk) in w.iter().enumerate() {
            a[(k + 1, k)] = c(*wk, 0.0);
        }
        let t = aluthge(&a).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j + 1 && j + 1 < w.len() {
                    (w[j] * w[j + 1]).sqrt()
                } else {
                    0.0
                };
                assert!((t[(i, j)] - c(expected, 0.0)).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn norms() {
        assert!((operator_norm(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::from_real_diag(&[1.0, -5.0]);
        assert!((operator_norm(&d).unwrap() - 5.0).abs() < 1e-14);
        let r = m(vec![
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!((operator_norm(&r).unwrap() - 2.0).abs() < 1e-14);

        assert!((inverse_norm(&ComplexMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::from_real_diag(&[2.0, 4.0]);
        assert!((inverse_norm(&d).unwrap() - 0.5).abs() < 1e-14);
        let d = ComplexMatrix::from_real_diag(&[1.0, 3.0]);
        assert!((inverse_norm(&d).unwrap() - 1.0).abs() < 1e-14);
        let s = ComplexMatrix::from_real_diag(&[1.0, 1e-13]);
        assert!(matches!(inverse_norm(&s), Err(Error::Singular { .. })));
        assert!(matches!(inverse_norm(&r), Err(Error::Singular { .. })));
    }

    #[test]
    fn cartesian_examples() {
        let h = m(vec![
            vec![c(1.0, 0.0), c(2.0, 1.0)],
            vec![c(2.0, -1.0), c(0.0, 0.0)],
        ]);
        let (re, im) = cartesian_parts(&h);
        assert!(close(&re, &h, 0.0));
        assert_eq!(im.max_abs(), 0.0);

        let ii = ComplexMatrix::identity(2).scale(c(0.0, 1.0));
        let (re, im) = cartesian_parts(&ii);
        assert_eq!(re.max_abs(), 0.0);
        assert!(close(&im, &ComplexMatrix::identity(2), 0.0));

        let (re, im) = cartesian_parts(&m(vec![vec![c(1.0, 2.0)]]));
        assert_eq!(re[(0, 0)], c(1.0, 0.0));
        assert_eq!(im[(0, 0)], c(2.0, 0.0));
    }
}
