//! Dense complex matrices and vectors.
//!
//! [`CMatrix`] is a thin validated wrapper around `ndarray::Array2<Complex64>`:
//! construction checks squareness and finiteness once, after which the
//! numerical routines can assume both.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex column vector.
pub type CVector = Array1<Complex64>;

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    data: Array2<Complex64>,
}

impl CMatrix {
    /// Wrap an array, checking that it is square and finite.
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyInput);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    /// n x n identity.
    pub fn identity(n: usize) -> Self {
        Self {
            data: Array2::eye(n),
        }
    }

    /// n x n zero matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            data: Array2::zeros((n, n)),
        }
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut data = Array2::zeros((n, n));
        for (k, z) in diag.iter().enumerate() {
            data[[k, k]] = *z;
        }
        Self { data }
    }

    /// Build from real row data, for small literal matrices in tests and demos.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, x) in row.iter().enumerate() {
                data[[i, j]] = Complex64::new(*x, 0.0);
            }
        }
        Self::new(data)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let n = self.dim();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = self.data[[j, i]].conj();
            }
        }
        CMatrix { data: out }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius asymmetry ||A - A'||_F relative to ||A||_F (0 for Hermitian A).
    pub fn hermiticity_defect(&self) -> f64 {
        let diff = self - &self.dagger();
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            0.0
        } else {
            diff.frobenius_norm() / norm
        }
    }

    pub fn matvec(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(self.data.dot(v))
    }

    /// Entrywise scaling by a complex factor.
    pub fn scaled(&self, z: Complex64) -> CMatrix {
        CMatrix {
            data: self.data.mapv(|w| w * z),
        }
    }

    pub(crate) fn from_array_unchecked(data: Array2<Complex64>) -> Self {
        Self { data }
    }
}

impl std::ops::Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: self.data.dot(&rhs.data),
        }
    }
}

/// Euclidean norm of a complex vector.
pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Plain Euclidean inner product, conjugate-linear in the first slot.
pub fn vector_dot(u: &CVector, v: &CVector) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}
