//! Eigendecomposition of general complex matrices.
//!
//! The decomposition H = P D P^-1 is the entry point for everything else in
//! this crate: the metric operator, the two-sided evolution and the
//! maximization principle all work in the eigenbasis. Diagonalizability is
//! decided numerically through cond(P); near-defective inputs are rejected
//! because the metric (P')^-1 P^-1 becomes meaningless for them.
//!
//! Conventions, fixed so that repeated runs produce identical output:
//! - eigenvalues sorted by descending imaginary part, ties by descending
//!   real part;
//! - eigenvectors have unit Euclidean norm;
//! - the largest-magnitude component of each eigenvector is made real
//!   positive (first index wins on exact ties);
//! - eigenvectors of (numerically) degenerate eigenvalues are orthonormalized
//!   within their eigenspace.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{Eig, Inverse, Solve, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{vector_norm, CMatrix};

/// Default upper limit on cond(P) before an input is treated as defective.
pub const DEFAULT_COND_LIMIT: f64 = 1e8;

/// Residual tolerance ||H P - P D||_F <= EPS_SPEC * ||H||_F enforced on output.
pub const EPS_SPEC: f64 = 1e-10;

/// Relative eigenvalue distance below which two eigenvalues are treated as
/// degenerate and their eigenvectors orthonormalized.
const DEGENERACY_RTOL: f64 = 1e-9;

/// Spectral decomposition of a diagonalizable complex matrix.
///
/// `diagonalizer` holds the eigenvectors as columns; `inverse_diagonalizer`
/// is its explicitly computed (and Newton-refined) inverse, whose rows are
/// the metric-dual bra vectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub diagonalizer: CMatrix,
    pub inverse_diagonalizer: CMatrix,
    pub cond_p: f64,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The k-th eigenvector (column of the diagonalizer).
    pub fn eigenvector(&self, k: usize) -> Array1<Complex64> {
        self.diagonalizer.as_array().column(k).to_owned()
    }
}

/// Decompose `h` as P D P^-1 with the crate-wide sorting, normalization and
/// phase conventions, rejecting inputs whose eigenvector basis is worse
/// conditioned than `cond_limit`.
pub fn eigendecompose(h: &CMatrix, cond_limit: f64) -> Result<Spectrum> {
    if !(cond_limit >= 1.0) {
        return Err(Error::InvalidArgument("cond_limit must be >= 1"));
    }
    let n = h.dim();
    let h_norm = h.frobenius_norm();

    let (raw_vals, raw_vecs) = h
        .as_array()
        .eig()
        .map_err(|e| Error::EigenSolver(format!("{e}")))?;

    // Sort by (Im desc, Re desc).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (raw_vals[a], raw_vals[b]);
        lb.im
            .partial_cmp(&la.im)
            .unwrap()
            .then(lb.re.partial_cmp(&la.re).unwrap())
    });

    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| raw_vals[k]).collect();
    let mut p = Array2::<Complex64>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        p.column_mut(dst).assign(&raw_vecs.column(src));
    }

    orthonormalize_degenerate(&eigenvalues, &mut p, h_norm);
    normalize_and_fix_phases(&mut p);

    let mut residual = decomposition_residual(h.as_array(), &eigenvalues, &p);
    if residual > 0.5 * EPS_SPEC * h_norm {
        refine_eigenvectors(h.as_array(), &eigenvalues, &mut p, h_norm)?;
        normalize_and_fix_phases(&mut p);
        residual = decomposition_residual(h.as_array(), &eigenvalues, &p);
    }
    if residual > EPS_SPEC * h_norm {
        return Err(Error::NumericallySingular(format!(
            "eigenvector residual {residual:.3e} exceeds {:.3e}",
            EPS_SPEC * h_norm
        )));
    }

    let cond_p = condition_number(&p)?;
    if !cond_p.is_finite() || cond_p > cond_limit {
        return Err(Error::Defective {
            cond: cond_p,
            limit: cond_limit,
        });
    }

    let p_inv = refined_inverse(&p)?;

    Ok(Spectrum {
        eigenvalues,
        diagonalizer: CMatrix::from_array_unchecked(p),
        inverse_diagonalizer: CMatrix::from_array_unchecked(p_inv),
        cond_p,
    })
}

/// Decompose with the default conditioning limit.
pub fn eigendecompose_default(h: &CMatrix) -> Result<Spectrum> {
    eigendecompose(h, DEFAULT_COND_LIMIT)
}

/// Diagnostic: ||H P - P D||_F / ||H||_F for an arbitrary (H, Spectrum) pair.
pub fn spectral_residual(h: &CMatrix, s: &Spectrum) -> Result<f64> {
    if h.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: h.dim(),
        });
    }
    let num = decomposition_residual(h.as_array(), &s.eigenvalues, s.diagonalizer.as_array());
    let h_norm = h.frobenius_norm();
    Ok(if h_norm == 0.0 { num } else { num / h_norm })
}

fn decomposition_residual(
    h: &Array2<Complex64>,
    vals: &[Complex64],
    p: &Array2<Complex64>,
) -> f64 {
    let hp = h.dot(p);
    let mut acc = 0.0;
    for (j, lam) in vals.iter().enumerate() {
        for i in 0..h.nrows() {
            acc += (hp[[i, j]] - p[[i, j]] * lam).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Orthonormalize (modified Gram-Schmidt, Euclidean) eigenvector columns
/// belonging to eigenvalues closer than DEGENERACY_RTOL * ||H||.
fn orthonormalize_degenerate(vals: &[Complex64], p: &mut Array2<Complex64>, h_norm: f64) {
    let n = vals.len();
    let tol = DEGENERACY_RTOL * h_norm;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end] - vals[end - 1]).norm() <= tol {
            end += 1;
        }
        if end - start > 1 {
            for j in start..end {
                for k in start..j {
                    let proj: Complex64 = p
                        .column(k)
                        .iter()
                        .zip(p.column(j).iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    let prev = p.column(k).to_owned();
                    let mut col = p.column_mut(j);
                    col.zip_mut_with(&prev, |c, q| *c -= proj * q);
                }
                let norm = vector_norm(&p.column(j).to_owned());
                if norm > 0.0 {
                    p.column_mut(j).mapv_inplace(|z| z / norm);
                }
            }
        }
        start = end;
    }
}

/// Unit Euclidean norm, then rotate each column so its largest-magnitude
/// component is real positive (deterministic phase convention).
fn normalize_and_fix_phases(p: &mut Array2<Complex64>) {
    for mut col in p.axis_iter_mut(Axis(1)) {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            col.mapv_inplace(|z| z / norm);
        }
        let mut k_max = 0;
        let mut best = -1.0;
        for (k, z) in col.iter().enumerate() {
            let mag = z.norm();
            if mag > best {
                best = mag;
                k_max = k;
            }
        }
        let pivot = col[k_max];
        if pivot.norm() > 0.0 {
            let phase = pivot / pivot.norm();
            col.mapv_inplace(|z| z / phase);
        }
    }
}

/// One pass of shifted inverse iteration on columns whose individual residual
/// is out of tolerance. Rarely triggered; LAPACK residuals are usually at
/// machine level already.
fn refine_eigenvectors(
    h: &Array2<Complex64>,
    vals: &[Complex64],
    p: &mut Array2<Complex64>,
    h_norm: f64,
) -> Result<()> {
    let n = vals.len();
    let shift = Complex64::new(1e-13 * h_norm.max(1.0), 0.0);
    for (j, lam) in vals.iter().enumerate() {
        let col = p.column(j).to_owned();
        let res = {
            let hv = h.dot(&col);
            let mut acc = 0.0;
            for i in 0..n {
                acc += (hv[i] - col[i] * lam).norm_sqr();
            }
            acc.sqrt()
        };
        if res <= 0.5 * EPS_SPEC * h_norm / (n as f64).sqrt() {
            continue;
        }
        let mut shifted = h.to_owned();
        for i in 0..n {
            shifted[[i, i]] -= lam + shift;
        }
        let refined = shifted
            .solve(&col)
            .map_err(|e| Error::NumericallySingular(format!("inverse iteration: {e}")))?;
        let norm = vector_norm(&refined);
        if norm > 0.0 {
            p.column_mut(j).assign(&refined.mapv(|z| z / norm));
        }
    }
    Ok(())
}

/// cond_2(P) from the singular value spread.
fn condition_number(p: &Array2<Complex64>) -> Result<f64> {
    let (_, sigma, _) = p
        .svd(false, false)
        .map_err(|e| Error::EigenSolver(format!("svd: {e}")))?;
    let s_max = sigma.iter().cloned().fold(0.0_f64, f64::max);
    let s_min = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    if s_min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s_max / s_min)
}

/// Refined inverse of an explicit basis matrix, for assembling models.
pub(crate) fn eigen_inverse(p: &CMatrix) -> Result<CMatrix> {
    refined_inverse(p.as_array()).map(CMatrix::from_array_unchecked)
}

/// LU inverse plus Newton polishing until ||P X - 1||_F <= 1e-12.
fn refined_inverse(p: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = p.nrows();
    let mut x = p
        .inv()
        .map_err(|e| Error::NumericallySingular(format!("inverse: {e}")))?;
    let eye = Array2::<Complex64>::eye(n);
    for _ in 0..3 {
        let r = &eye - &p.dot(&x);
        let defect = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if defect <= 1e-12 {
            return Ok(x);
        }
        x = &x + &x.dot(&r);
    }
    let defect = {
        let r = &eye - &p.dot(&x);
        r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    };
    if defect <= 1e-12 {
        Ok(x)
    } else {
        Err(Error::NumericallySingular(format!(
            "inverse defect {defect:.3e} after refinement"
        )))
    }
}
