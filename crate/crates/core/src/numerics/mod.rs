//! Dense complex linear algebra at desk scale.
//!
//! [`ComplexMatrix`] is a row-major matrix of [`C64`] entries. The eigen
//! routines in [`eigen`] and the matrix functions in [`functions`] are
//! self-contained: cyclic Jacobi for full Hermitian eigendecompositions and
//! Householder tridiagonalization with Sturm bisection where only the extreme
//! eigenpairs are needed.

pub mod eigen;
pub mod functions;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub use eigen::{
    hermitian_eigen, hermitian_eigen_tol, max_eigenpair, max_eigenvalue, min_eigenpair,
    min_eigenvalue, HermitianEigen, Tridiagonal,
};
pub use functions::{
    aluthge, cartesian_parts, inverse, inverse_norm, operator_norm, polar_decompose, psd_sqrt,
    Polar,
};

/// Tolerances shared by the numerics routines.
pub mod tol {
    /// Relative Hermiticity tolerance in the max-entry norm.
    pub const HERMITIAN: f64 = 1e-12;
    /// Off-diagonal Frobenius threshold for Jacobi convergence (relative).
    pub const JACOBI_OFF: f64 = 1e-13;
    /// Jacobi sweep budget.
    pub const JACOBI_SWEEPS: usize = 100;
    /// Eigenvalues above this are clamped to zero before a square root.
    pub const PSD_CLAMP: f64 = -1e-10;
    /// Singular values at or below this make a matrix singular.
    pub const SINGULAR: f64 = 1e-12;
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Builds a matrix from rows; rejects ragged, empty or non-finite input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if r == 0 || c == 0 {
            return Err(Error::EmptyInput);
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Builds a matrix from a flat row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `self + c·I`.
    pub fn shift_diagonal(&self, c: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] += c;
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// `max |A - A*|` over entries.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * (1.0 + self.max_abs())
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Product with the adjoint, `A* v`.
    pub fn adjoint_mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.rows, "vector length must equal row count");
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        out
    }

    /// Top-left `r x c` block.
    pub fn crop(&self, r: usize, c: usize) -> Self {
        assert!(r <= self.rows && c <= self.cols, "crop exceeds matrix");
        let mut out = Self::zeros(r, c);
        for i in 0..r {
            out.data[i * c..(i + 1) * c].copy_from_slice(&self.row(i)[..c]);
        }
        out
    }

    /// Zero-padded embedding into an `r x c` matrix (top-left aligned).
    pub fn pad(&self, r: usize, c: usize) -> Self {
        assert!(r >= self.rows && c >= self.cols, "pad must not shrink");
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            out.data[i * c..i * c + self.cols].copy_from_slice(self.row(i));
        }
        out
    }

    /// Commutator `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, n: u32) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hermitian inner product `<x, y> = sum x_i conj(y_i)`, linear in `x`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sq(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(0.0, -1.0), c(3.0, 2.0)],
        ])
        .unwrap();
        let b = a.adjoint();
        assert_eq!(b[(0, 1)], c(0.0, 1.0));
        let p = &a * &b;
        assert!(p.is_hermitian(1e-14));
        let v = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let direct = a.mul_vec(&v);
        assert_eq!(direct[0], c(1.0, 3.0));
        let adj = a.adjoint_mul_vec(&v);
        assert_eq!(adj, b.mul_vec(&v));
    }

    #[test]
    fn rejects_ragged_rows() {
        let r = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![]]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            ComplexMatrix::from_rows(vec![]),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn rejects_nan() {
        let r = ComplexMatrix::from_rows(vec![vec![c(f64::NAN, 0.0)]]);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn crop_pad_and_pow() {
        let a = ComplexMatrix::from_real_diag(&[2.0, 3.0]);
        let p = a.pad(3, 3);
        assert_eq!(p[(2, 2)], c(0.0, 0.0));
        assert_eq!(p.crop(2, 2), a);
        assert_eq!(a.pow(3)[(1, 1)], c(27.0, 0.0));
        assert_eq!(a.pow(0), ComplexMatrix::identity(2));
    }
}
