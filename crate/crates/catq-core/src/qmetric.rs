//! The metric operator Q and the inner product it defines.
//!
//! For a diagonalizable H = P D P^-1 the Hermitian positive-definite operator
//! Q = (P')^-1 P^-1 makes the eigenvectors of H orthonormal under
//! <u, v>_Q = u' Q v. All "proper" structure used elsewhere (adjoints,
//! Hermitian/anti-Hermitian splits, normalization) is defined relative to Q.
//!
//! Q and its inverse are stored explicitly: Q = (P^-1)' P^-1 and
//! Q^-1 = P P' are both exactly Hermitian by construction, and the adjoint
//! is applied in inner loops where repeated linear solves would hurt.

use ndarray_linalg::Cholesky;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, CVector};
use crate::rng;
use crate::spectral::Spectrum;

/// Hermitian positive-definite metric with its inverse.
#[derive(Debug, Clone)]
pub struct QMetric {
    pub q: CMatrix,
    pub q_inv: CMatrix,
    pub source_dim: usize,
}

impl QMetric {
    /// Build Q = (P')^-1 P^-1 and Q^-1 = P P' from a spectral decomposition.
    pub fn from_spectrum(s: &Spectrum) -> Result<Self> {
        let p = &s.diagonalizer;
        let p_inv = &s.inverse_diagonalizer;
        let q = &p_inv.dagger() * p_inv;
        let q_inv = p * &p.dagger();
        // Products of the form X' X round to near-Hermitian; symmetrize the
        // last bits so stored Q is Hermitian to the letter.
        let q = hermitize(&q);
        let q_inv = hermitize(&q_inv);
        // Positive definiteness check; fails only if the conditioning gate
        // upstream let something unusable through.
        q.as_array()
            .cholesky(ndarray_linalg::UPLO::Lower)
            .map_err(|_| {
                Error::NumericallySingular("metric is not positive definite".into())
            })?;
        Ok(Self {
            source_dim: p.dim(),
            q,
            q_inv,
        })
    }

    /// Identity metric (the Hermitian special case).
    pub fn identity(n: usize) -> Self {
        Self {
            q: CMatrix::identity(n),
            q_inv: CMatrix::identity(n),
            source_dim: n,
        }
    }

    pub fn dim(&self) -> usize {
        self.source_dim
    }

    /// <u, v>_Q = u' Q v; conjugate-linear in `u`, linear in `v`.
    pub fn inner(&self, u: &CVector, v: &CVector) -> Result<Complex64> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let qv = self.q.matvec(v)?;
        Ok(u.iter().zip(qv.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    /// Q-adjoint A -> Q^-1 A' Q. Involutive, and the adjoint with respect
    /// to the Q inner product.
    pub fn adjoint(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_len(a.dim())?;
        Ok(&(&self.q_inv * &a.dagger()) * &self.q)
    }

    /// Split H into Q-Hermitian and anti-Q-Hermitian parts,
    /// H = (H + H^+Q)/2 + (H - H^+Q)/2.
    pub fn decompose_h(&self, h: &CMatrix) -> Result<(CMatrix, CMatrix)> {
        let adj = self.adjoint(h)?;
        let half = Complex64::new(0.5, 0.0);
        let h_qh = (h + &adj).scaled(half);
        let h_qa = (h - &adj).scaled(half);
        Ok((h_qh, h_qa))
    }

    /// ||H H^+Q - H^+Q H||_F / ||H||_F^2; zero when H is normal under Q.
    pub fn normality_residual(&self, h: &CMatrix) -> Result<f64> {
        let adj = self.adjoint(h)?;
        let comm = &(h * &adj) - &(&adj * h);
        let h_norm = h.frobenius_norm();
        Ok(if h_norm == 0.0 {
            comm.frobenius_norm()
        } else {
            comm.frobenius_norm() / (h_norm * h_norm)
        })
    }

    /// v / sqrt(<v, v>_Q). The square root is of a positive real because Q
    /// is positive definite.
    pub fn normalize(&self, v: &CVector) -> Result<CVector> {
        let norm_sq = self.inner(v, v)?.re;
        if norm_sq <= 0.0 {
            return Err(Error::ZeroVector);
        }
        let scale = 1.0 / norm_sq.sqrt();
        Ok(v.mapv(|z| z * scale))
    }

    /// Seeded random Q-Hermitian operator, O = Q^-1 M with M Hermitian.
    pub fn random_q_hermitian(&self, seed: u64) -> CMatrix {
        let n = self.source_dim;
        let mut rng = rng::rng_for(seed);
        let g = CMatrix::from_array_unchecked(rng::complex_gaussian_matrix(&mut rng, n));
        let m = (&g + &g.dagger()).scaled(Complex64::new(0.5, 0.0));
        &self.q_inv * &m
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                got: len,
            });
        }
        Ok(())
    }
}

fn hermitize(a: &CMatrix) -> CMatrix {
    (a + &a.dagger()).scaled(Complex64::new(0.5, 0.0))
}
