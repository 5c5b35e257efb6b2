//! Dense square complex matrices and their JSON file format.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense `n x n` complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexDenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails on wrong length or non-finite entries.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if let Some(z) = data.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite matrix entry {z}")));
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(n, data)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(v, 0.0);
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A*|` entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// Returns `NotHermitian` unless `max |A - A*| <= 1e-10 * (1 + max|A|)`.
    pub fn ensure_hermitian(&self) -> Result<()> {
        let tolerance = 1e-10 * (1.0 + self.max_abs());
        let residual = self.hermiticity_residual();
        if residual > tolerance {
            return Err(Error::NotHermitian {
                residual,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: Complex64, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for (l, &a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[l * n..(l + 1) * n];
                for (d, &b) in dst.iter_mut().zip(rrow) {
                    *d += a * b;
                }
            }
        }
        Self { n, data: out }
    }

    /// Product of a non-empty chain of matrices, left to right.
    pub fn chain_product<'a>(mut factors: impl Iterator<Item = &'a Self>) -> Option<Self> {
        let first = factors.next()?.clone();
        Some(factors.fold(first, |acc, m| acc.matmul(m)))
    }

    /// `[I, M, M^2, ..., M^max_power]`
    pub fn powers(&self, max_power: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(max_power + 1);
        out.push(Self::identity(self.n));
        for p in 1..=max_power {
            let next = out[p - 1].matmul(self);
            out.push(next);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn to_file(&self) -> MatrixFile {
        let n = self.n;
        let re = (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)].re).collect())
            .collect();
        let im = (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)].im).collect())
            .collect();
        MatrixFile { n, re, im }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("matrix serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(s)?;
        file.into_matrix()
    }
}

/// On-disk matrix format: `{"n": int, "re": [[...]], "im": [[...]]}`.
///
/// `im` may be omitted for real matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn into_matrix(self) -> Result<ComplexDenseMatrix> {
        let n = self.n;
        let shape_err = |what: &str| Error::Parse(format!("matrix `{what}` must be {n}x{n}"));
        if self.re.len() != n || self.re.iter().any(|r| r.len() != n) {
            return Err(shape_err("re"));
        }
        let has_im = !self.im.is_empty();
        if has_im && (self.im.len() != n || self.im.iter().any(|r| r.len() != n)) {
            return Err(shape_err("im"));
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let im = if has_im { self.im[i][j] } else { 0.0 };
                data.push(Complex64::new(self.re[i][j], im));
            }
        }
        ComplexDenseMatrix::from_row_major(n, data).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Index<(usize, usize)> for ComplexDenseMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexDenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &ComplexDenseMatrix {
    type Output = ComplexDenseMatrix;
    fn add(self, rhs: Self) -> ComplexDenseMatrix {
        assert_eq!(self.n, rhs.n);
        ComplexDenseMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexDenseMatrix {
    type Output = ComplexDenseMatrix;
    fn sub(self, rhs: Self) -> ComplexDenseMatrix {
        assert_eq!(self.n, rhs.n);
        ComplexDenseMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexDenseMatrix {
    type Output = ComplexDenseMatrix;
    fn mul(self, rhs: Self) -> ComplexDenseMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexDenseMatrix {
    type Output = ComplexDenseMatrix;
    fn neg(self) -> ComplexDenseMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexDenseMatrix> for ComplexDenseMatrix {
    fn add_assign(&mut self, rhs: &ComplexDenseMatrix) {
        assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexDenseMatrix> for ComplexDenseMatrix {
    fn sub_assign(&mut self, rhs: &ComplexDenseMatrix) {
        assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}
