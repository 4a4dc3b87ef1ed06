//! Dense complex matrices backing every operator in the toolkit.
//!
//! [`ComplexMatrix`] is a thin validated wrapper around a dense
//! column-major `nalgebra` matrix.  Public constructors enforce the type
//! invariants: at least one row and one column, and every entry finite.
//! Entry order in constructors and accessors is always row-major, which is
//! also the order used by the CSV and JSON serializations.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{OpfactorError, Result};

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(OpfactorError::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(OpfactorError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(OpfactorError::NonFinite);
        }
        // DMatrix::from_vec is column-major; go through from_fn instead.
        let inner = DMatrix::from_fn(rows, cols, |r, c| entries[r * cols + c]);
        Ok(Self { inner })
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real_vec(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        Self::from_vec(
            rows,
            cols,
            entries.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(OpfactorError::EmptyMatrix);
        }
        let inner = DMatrix::from_fn(rows, cols, f);
        let m = Self { inner };
        m.ensure_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "zeros: dimensions must be positive");
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity: dimension must be positive");
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Square diagonal matrix with real diagonal `d`.
    pub fn from_diag(d: &[f64]) -> Self {
        assert!(!d.is_empty(), "from_diag: diagonal must be non-empty");
        let n = d.len();
        Self {
            inner: DMatrix::from_fn(n, n, |r, c| {
                if r == c {
                    Complex64::new(d[r], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Column vector (n x 1).
    pub fn column(entries: &[Complex64]) -> Result<Self> {
        Self::from_vec(entries.len(), 1, entries.to_vec())
    }

    pub(crate) fn from_na(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }

    pub(crate) fn as_na(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.inner[(r, c)]
    }

    /// Entries in row-major order.
    pub fn to_vec(&self) -> Vec<Complex64> {
        let (rows, cols) = self.shape();
        let mut out = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                out.push(self.inner[(r, c)]);
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    /// Hermitian part `(A + A*)/2`.  Panics if the matrix is not square.
    pub fn hermitize(&self) -> Self {
        assert!(self.is_square(), "hermitize: matrix must be square");
        let adj = self.inner.adjoint();
        Self {
            inner: (&self.inner + adj).scale(0.5),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    pub fn fro_norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        if self.cols() == 0 {
            return 0.0;
        }
        self.inner
            .clone()
            .singular_values()
            .iter()
            .fold(0.0_f64, |a, &s| a.max(s))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
    }

    pub fn is_finite_matrix(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        if self.is_finite_matrix() {
            Ok(())
        } else {
            Err(OpfactorError::NonFinite)
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols(), v.len(), "mul_vec: length mismatch");
        let x = nalgebra::DVector::from_column_slice(v);
        let y = &self.inner * x;
        y.iter().copied().collect()
    }

    /// Largest entrywise difference against `other`; shapes must match.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff: shape mismatch");
        (&self.inner - &other.inner)
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.inner[idx]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        ComplexMatrix::from_na(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        ComplexMatrix::from_na(&self.inner - &rhs.inner)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "mul: inner dimension mismatch ({}x{} * {}x{})",
            self.rows(),
            self.cols(),
            rhs.rows(),
            rhs.cols()
        );
        ComplexMatrix::from_na(&self.inner * &rhs.inner)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_na(-&self.inner)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.rows(), self.cols())
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|c| {
                    let z = self.inner[(r, c)];
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inner product, linear in the first argument: `(x, y) = sum x_i conj(y_i)`.
pub fn vec_inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    assert_eq!(x.len(), y.len(), "vec_inner: length mismatch");
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| a * b.conj())
        .sum()
}
