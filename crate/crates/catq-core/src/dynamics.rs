//! Two-sided time evolution in the eigenbasis.
//!
//! The forward state evolves under H, the backward state under the Q-adjoint
//! H^+Q, and the reduced (tilde) state under the Q-Hermitian part of H. All
//! propagation happens on eigenbasis coefficients with exact scalar
//! exponentials; dense matrix exponentials exist only as test oracles.
//!
//! Coefficient laws, with boundary data a_i(T_A) and b_i(T_B):
//!   a_i(t) = a_i(T_A) exp(-i lambda_i (t - T_A) / hbar)
//!   b_i(t) = b_i(T_B) exp(-i conj(lambda_i) (t - T_B) / hbar)
//! so the Q-overlap <B(t), A(t)>_Q is independent of t.

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, CVector};
use crate::spectral::{eigendecompose_default, Spectrum};

/// Boundary coefficients for the two-sided problem: the forward state is
/// pinned at `t_a`, the backward state at `t_b`.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub a_coeffs: CVector,
    pub b_coeffs: CVector,
    pub t_a: f64,
    pub t_b: f64,
    pub hbar: f64,
}

impl BoundaryData {
    pub fn new(
        a_coeffs: CVector,
        b_coeffs: CVector,
        t_a: f64,
        t_b: f64,
        hbar: f64,
    ) -> Result<Self> {
        if b_coeffs.len() != a_coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: a_coeffs.len(),
                got: b_coeffs.len(),
            });
        }
        if !(t_b >= t_a) {
            return Err(Error::TimeOrder { t_a, t_b });
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument("hbar must be positive"));
        }
        Ok(Self {
            a_coeffs,
            b_coeffs,
            t_a,
            t_b,
            hbar,
        })
    }

    /// Total window length T = t_b - t_a.
    pub fn window(&self) -> f64 {
        self.t_b - self.t_a
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let slack = 1e-9 * (1.0 + self.t_a.abs() + self.t_b.abs());
        if t < self.t_a - slack || t > self.t_b + slack {
            return Err(Error::TimeOutOfRange {
                t,
                t_a: self.t_a,
                t_b: self.t_b,
            });
        }
        Ok(())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.a_coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.a_coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Eigenbasis coefficients of `v`: c = P^-1 v, i.e. the metric-dual pairings
/// of `v` with each eigenvector.
pub fn expand(s: &Spectrum, v: &CVector) -> Result<CVector> {
    s.inverse_diagonalizer.matvec(v)
}

/// Forward state at time t: sum_i a_i(t) |lambda_i>.
pub fn evolve_a(s: &Spectrum, bd: &BoundaryData, t: f64) -> Result<CVector> {
    bd.check_time(t)?;
    bd.check_dim(s.dim())?;
    let tau = t - bd.t_a;
    let coeffs = phase_evolved(&bd.a_coeffs, &s.eigenvalues, tau, bd.hbar, false);
    s.diagonalizer.matvec(&coeffs)
}

/// Backward state at time t: sum_i b_i(t) |lambda_i>, with the
/// conjugate-eigenvalue law coming from the Q-adjoint Hamiltonian.
pub fn evolve_b(s: &Spectrum, bd: &BoundaryData, t: f64) -> Result<CVector> {
    bd.check_time(t)?;
    bd.check_dim(s.dim())?;
    let tau = t - bd.t_b;
    let coeffs = phase_evolved(&bd.b_coeffs, &s.eigenvalues, tau, bd.hbar, true);
    s.diagonalizer.matvec(&coeffs)
}

fn phase_evolved(
    coeffs: &CVector,
    eigenvalues: &[Complex64],
    tau: f64,
    hbar: f64,
    conjugate: bool,
) -> CVector {
    let mut out = Array1::zeros(coeffs.len());
    for (k, c) in coeffs.iter().enumerate() {
        let lam = if conjugate {
            eigenvalues[k].conj()
        } else {
            eigenvalues[k]
        };
        let factor = (-Complex64::i() * lam * tau / hbar).exp();
        out[k] = c * factor;
    }
    out
}

/// One-shot propagation of `v` by exp(-i h_qh dt / hbar).
///
/// Decomposes `h_qh` internally; for repeated stepping at a fixed dt build a
/// [`QhPropagator`] instead.
pub fn evolve_qh(h_qh: &CMatrix, v: &CVector, dt: f64, hbar: f64) -> Result<CVector> {
    let prop = QhPropagator::new(h_qh, dt, hbar)?;
    prop.step(v)
}

/// Precomputed dense one-step propagator exp(-i h_qh dt / hbar).
///
/// The generator is diagonalized once; each step is then a single
/// matrix-vector product. When the generator is Q-Hermitian the step
/// preserves the Q-norm.
#[derive(Debug, Clone)]
pub struct QhPropagator {
    step_matrix: CMatrix,
}

impl QhPropagator {
    pub fn new(h_qh: &CMatrix, dt: f64, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument("hbar must be positive"));
        }
        let s = eigendecompose_default(h_qh)?;
        Ok(Self {
            step_matrix: propagator_from_spectrum(&s, dt, hbar),
        })
    }

    pub fn dim(&self) -> usize {
        self.step_matrix.dim()
    }

    pub fn step(&self, v: &CVector) -> Result<CVector> {
        self.step_matrix.matvec(v)
    }

    pub fn step_matrix(&self) -> &CMatrix {
        &self.step_matrix
    }
}

/// Dense exp(-i H dt / hbar) assembled in the eigenbasis of H.
pub(crate) fn propagator_from_spectrum(s: &Spectrum, dt: f64, hbar: f64) -> CMatrix {
    let phases: Vec<Complex64> = s
        .eigenvalues
        .iter()
        .map(|lam| (-Complex64::i() * lam * dt / hbar).exp())
        .collect();
    let d = CMatrix::from_diagonal(&phases);
    &(&s.diagonalizer * &d) * &s.inverse_diagonalizer
}

/// Heisenberg-picture operator exp(+i h_qh dt/hbar) O exp(-i h_qh dt/hbar).
pub fn heisenberg_op(h_qh: &CMatrix, o: &CMatrix, dt: f64, hbar: f64) -> Result<CMatrix> {
    if o.dim() != h_qh.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_qh.dim(),
            got: o.dim(),
        });
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument("hbar must be positive"));
    }
    let s = eigendecompose_default(h_qh)?;
    let forward = propagator_from_spectrum(&s, dt, hbar);
    let backward = propagator_from_spectrum(&s, -dt, hbar);
    Ok(&(&backward * o) * &forward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmetric::QMetric;
    use crate::spectral::eigendecompose_default;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expand_recovers_eigenbasis_coordinates() {
        let h = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
        let s = eigendecompose_default(&h).unwrap();
        // A single eigenvector expands to a coordinate vector.
        let c0 = expand(&s, &s.eigenvector(0)).unwrap();
        assert!((c0[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(c0[1].norm() < 1e-12);
        // Sum of the two eigenvectors expands to (1, 1).
        let v = &s.eigenvector(0) + &s.eigenvector(1);
        let cv = expand(&s, &v).unwrap();
        assert!((cv[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((cv[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn evolve_a_at_initial_time_is_reconstruction() {
        let h = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
        let s = eigendecompose_default(&h).unwrap();
        let a = array![c(0.6, 0.1), c(-0.3, 0.8)];
        let bd = BoundaryData::new(a.clone(), a.clone(), 0.0, 1.0, 1.0).unwrap();
        let v = evolve_a(&s, &bd, 0.0).unwrap();
        let direct = s.diagonalizer.matvec(&a).unwrap();
        for k in 0..2 {
            assert!((v[k] - direct[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn single_decaying_mode_magnitude() {
        // lambda = -i: |a(t)| shrinks by e^{-1} after unit time.
        let h = CMatrix::from_diagonal(&[c(0.0, -1.0)]);
        let s = eigendecompose_default(&h).unwrap();
        let bd =
            BoundaryData::new(array![c(1.0, 0.0)], array![c(1.0, 0.0)], 0.0, 1.0, 1.0).unwrap();
        let v = evolve_a(&s, &bd, 1.0).unwrap();
        let expected = (-1.0_f64).exp();
        assert!((v[0].norm() - expected).abs() < 1e-12);
    }

    #[test]
    fn evolve_b_at_final_time_is_reconstruction() {
        let h = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
        let s = eigendecompose_default(&h).unwrap();
        let b = array![c(0.2, -0.4), c(0.9, 0.3)];
        let bd = BoundaryData::new(b.clone(), b.clone(), 0.0, 2.0, 1.0).unwrap();
        let v = evolve_b(&s, &bd, 2.0).unwrap();
        let direct = s.diagonalizer.matvec(&b).unwrap();
        for k in 0..2 {
            assert!((v[k] - direct[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn backward_mode_magnitudes_follow_conjugate_law() {
        // For lambda = i the backward coefficient grows to e^{+1} one unit
        // before t_b (the overlap with the forward state stays constant);
        // for lambda = -i it decays to e^{-1}.
        for (im, expected) in [(1.0, 1.0_f64.exp()), (-1.0, (-1.0_f64).exp())] {
            let h = CMatrix::from_diagonal(&[c(0.0, im)]);
            let s = eigendecompose_default(&h).unwrap();
            let bd = BoundaryData::new(
                array![c(1.0, 0.0)],
                array![c(1.0, 0.0)],
                0.0,
                1.0,
                1.0,
            )
            .unwrap();
            let v = evolve_b(&s, &bd, 0.0).unwrap();
            assert!(
                (v[0].norm() - expected).abs() < 1e-12,
                "Im lambda = {im}: got {}, expected {expected}",
                v[0].norm()
            );
        }
    }

    #[test]
    fn hermitian_evolution_preserves_euclidean_norm() {
        let h = CMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, -0.7]]).unwrap();
        let s = eigendecompose_default(&h).unwrap();
        let a = array![c(0.3, 0.4), c(-0.8, 0.1)];
        let norm0 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let bd = BoundaryData::new(expand(&s, &a).unwrap(), expand(&s, &a).unwrap(), 0.0, 3.0, 1.0)
            .unwrap();
        for t in [0.0, 0.7, 1.9, 3.0] {
            let v = evolve_a(&s, &bd, t).unwrap();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - norm0).abs() < 1e-12);
        }
    }

    #[test]
    fn time_window_enforced() {
        let h = CMatrix::identity(1);
        let s = eigendecompose_default(&h).unwrap();
        let bd =
            BoundaryData::new(array![c(1.0, 0.0)], array![c(1.0, 0.0)], 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            evolve_a(&s, &bd, 1.5),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(matches!(
            evolve_b(&s, &bd, -0.5),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn evolve_qh_identity_at_zero_dt() {
        let h = CMatrix::from_real_rows(&[&[1.0, 0.3], &[0.3, 2.0]]).unwrap();
        let v = array![c(0.2, 0.5), c(-0.7, 0.1)];
        let out = evolve_qh(&h, &v, 0.0, 1.0).unwrap();
        for k in 0..2 {
            assert!((out[k] - v[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn evolve_qh_scalar_phase() {
        let h = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let v = array![c(1.0, 0.0), c(0.0, 0.0)];
        let out = evolve_qh(&h, &v, std::f64::consts::PI, 1.0).unwrap();
        assert!((out[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(out[1].norm() < 1e-12);
    }

    #[test]
    fn evolve_qh_preserves_q_norm() {
        let h = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
        let s = eigendecompose_default(&h).unwrap();
        let m = QMetric::from_spectrum(&s).unwrap();
        let (h_qh, _) = m.decompose_h(&h).unwrap();
        let v = m.normalize(&array![c(0.4, 0.2), c(-0.6, 0.9)]).unwrap();
        let out = evolve_qh(&h_qh, &v, 0.37, 1.0).unwrap();
        let norm = m.inner(&out, &out).unwrap();
        assert!((norm.re - 1.0).abs() < 1e-10, "Q-norm {}", norm.re);
        assert!(norm.im.abs() < 1e-12);
    }

    #[test]
    fn heisenberg_fixed_points() {
        let h = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        // O commuting with H (both diagonal) is untouched.
        let o = CMatrix::from_diagonal(&[c(3.0, 0.0), c(-1.0, 0.0)]);
        let moved = heisenberg_op(&h, &o, 0.83, 1.0).unwrap();
        assert!((&moved - &o).frobenius_norm() < 1e-12);
        // dt = 0 is the identity map for any O.
        let o2 = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let still = heisenberg_op(&h, &o2, 0.0, 1.0).unwrap();
        assert!((&still - &o2).frobenius_norm() < 1e-13);
    }

    #[test]
    fn boundary_data_rejects_bad_window() {
        let a = array![c(1.0, 0.0)];
        assert!(matches!(
            BoundaryData::new(a.clone(), a.clone(), 1.0, 0.0, 1.0),
            Err(Error::TimeOrder { .. })
        ));
    }
}
