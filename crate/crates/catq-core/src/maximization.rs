//! The maximization principle.
//!
//! Over Q-normalized boundary states, the modulus of the two-sided overlap
//! |<B(t), A(t)>_Q| is bounded by exp(B T / hbar) with B the largest
//! imaginary part of the spectrum, and the bound is attained exactly when
//! both states live on the dominant eigenmodes with matched magnitudes and
//! locked relative phases. [`build_max_pair`] constructs such a pair in
//! closed form; [`oracle_maximize`] climbs the same objective numerically
//! and independently, as a cross-check.

use ndarray::Array1;
use num_complex::Complex64;

use crate::dynamics::{evolve_a, evolve_b, propagator_from_spectrum, BoundaryData};
use crate::error::{Error, Result};
use crate::matrix::CVector;
use crate::qmetric::QMetric;
use crate::rng;
use crate::spectral::Spectrum;

/// Default relative tolerance for tying imaginary parts into the dominant set.
pub const DEFAULT_DOMINANT_RTOL: f64 = 1e-9;

/// Closed-form description of a maximizing boundary pair.
///
/// Magnitudes and phases are indexed by `dominant_set`; coefficients outside
/// the dominant set vanish identically.
#[derive(Debug, Clone)]
pub struct MaxSolution {
    pub dominant_set: Vec<usize>,
    pub bound_b: f64,
    pub theta_c: f64,
    pub a_magnitudes: Vec<f64>,
    pub a_phases: Vec<f64>,
    pub b_magnitudes: Vec<f64>,
    pub b_phases: Vec<f64>,
    pub attained: f64,
}

/// Indices whose imaginary part ties (within `rel_tol` of the natural scale)
/// with the spectral bound B = max Im lambda; returns (indices, B).
pub fn dominant_set(eigenvalues: &[Complex64], rel_tol: f64) -> Result<(Vec<usize>, f64)> {
    if eigenvalues.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(rel_tol >= 0.0) {
        return Err(Error::InvalidArgument("rel_tol must be non-negative"));
    }
    let bound = eigenvalues.iter().map(|l| l.im).fold(f64::NEG_INFINITY, f64::max);
    let min_im = eigenvalues.iter().map(|l| l.im).fold(f64::INFINITY, f64::min);
    let max_abs = eigenvalues.iter().map(|l| l.im.abs()).fold(0.0_f64, f64::max);
    // Scale against which "tied" is judged: the spread when it is the larger
    // feature, otherwise the overall magnitude of the imaginary parts.
    let scale = (bound - min_im).max(max_abs);
    let threshold = bound - rel_tol * scale;
    let indices = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.im >= threshold)
        .map(|(i, _)| i)
        .collect();
    Ok((indices, bound))
}

/// Construct a maximizing boundary pair for the window [t_a, t_b].
///
/// The maximizer is not unique when the dominant set has more than one
/// element: the weight distribution over the set, the forward phases and the
/// common phase `theta_c` are all free. Defaults are uniform weights, zero
/// phases and `theta_c = 0`; every admissible choice attains the same bound.
///
/// Returns the solution data together with the boundary states A(t_a) and
/// B(t_b) as grid vectors.
pub fn build_max_pair(
    s: &Spectrum,
    m: &QMetric,
    t_a: f64,
    t_b: f64,
    hbar: f64,
    weights: Option<&[f64]>,
    theta_c: f64,
    a_phases: Option<&[f64]>,
) -> Result<(MaxSolution, CVector, CVector)> {
    if !(t_b > t_a) {
        return Err(Error::TimeOrder { t_a, t_b });
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument("hbar must be positive"));
    }
    let (dominant, bound_b) = dominant_set(&s.eigenvalues, DEFAULT_DOMINANT_RTOL)?;
    let k = dominant.len();

    let a_magnitudes: Vec<f64> = match weights {
        None => vec![1.0 / (k as f64).sqrt(); k],
        Some(w) => {
            if w.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: w.len(),
                });
            }
            if w.iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidArgument("weights must be non-negative"));
            }
            let total: f64 = w.iter().sum();
            if total <= 0.0 {
                return Err(Error::DegenerateWeights);
            }
            w.iter().map(|&x| (x / total).sqrt()).collect()
        }
    };
    let a_phases: Vec<f64> = match a_phases {
        None => vec![0.0; k],
        Some(p) => {
            if p.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: p.len(),
                });
            }
            p.to_vec()
        }
    };

    // Matched magnitudes and phases locked so every dominant mode carries the
    // common phase theta_c in the overlap.
    let window = t_b - t_a;
    let b_magnitudes = a_magnitudes.clone();
    let b_phases: Vec<f64> = dominant
        .iter()
        .zip(a_phases.iter())
        .map(|(&i, &th_a)| th_a - window / hbar * s.eigenvalues[i].re - theta_c)
        .collect();

    let n = s.dim();
    let mut a_coeffs: CVector = Array1::zeros(n);
    let mut b_coeffs: CVector = Array1::zeros(n);
    for (slot, &i) in dominant.iter().enumerate() {
        a_coeffs[i] =
            Complex64::from_polar(a_magnitudes[slot], a_phases[slot]);
        b_coeffs[i] =
            Complex64::from_polar(b_magnitudes[slot], b_phases[slot]);
    }

    let a_state = s.diagonalizer.matvec(&a_coeffs)?;
    let b_state = s.diagonalizer.matvec(&b_coeffs)?;

    // Evaluate the attained overlap once; it is time-independent.
    let bd = BoundaryData::new(a_coeffs, b_coeffs, t_a, t_b, hbar)?;
    let a_t = evolve_a(s, &bd, t_a)?;
    let b_t = evolve_b(s, &bd, t_a)?;
    let attained = m.inner(&b_t, &a_t)?.norm();

    Ok((
        MaxSolution {
            dominant_set: dominant,
            bound_b,
            theta_c,
            a_magnitudes,
            a_phases,
            b_magnitudes,
            b_phases,
            attained,
        },
        a_state,
        b_state,
    ))
}

/// The two-sided transition amplitude <B(t), A(t)>_Q.
pub fn transition_amplitude(
    m: &QMetric,
    b_state_t: &CVector,
    a_state_t: &CVector,
) -> Result<Complex64> {
    m.inner(b_state_t, a_state_t)
}

/// Outcome of the numeric maximization oracle.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub best_value: f64,
    pub best_a: CVector,
    pub best_b: CVector,
    pub converged: bool,
}

/// Projected-gradient ascent of |<B(t_b), U A(t_a)>_Q|^2 over the product of
/// two Q-normalized spheres, with seeded random restarts.
///
/// This route never looks at the closed-form maximizer: it treats the window
/// propagator as a black-box linear map and climbs the raw objective, so it
/// serves as an independent check of [`build_max_pair`]. Non-convergence on
/// some restart is not an error; the best value found is returned together
/// with a convergence flag.
pub fn oracle_maximize(
    s: &Spectrum,
    m: &QMetric,
    t_a: f64,
    t_b: f64,
    hbar: f64,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<OracleOutcome> {
    if !(t_b > t_a) {
        return Err(Error::TimeOrder { t_a, t_b });
    }
    if restarts == 0 || iters == 0 {
        return Err(Error::InvalidArgument("restarts and iters must be positive"));
    }
    let n = s.dim();
    let u_prop = propagator_from_spectrum(s, t_b - t_a, hbar);
    let u_dag = u_prop.dagger();

    let mut best_sq = f64::NEG_INFINITY;
    let mut best_a: CVector = Array1::zeros(n);
    let mut best_b: CVector = Array1::zeros(n);
    let mut best_converged = false;

    for r in 0..restarts {
        let mut stream = rng::rng_for(rng::derive_seed(seed, r as u64));
        let a0 = rng::complex_gaussian_vector(&mut stream, n);
        let b0 = rng::complex_gaussian_vector(&mut stream, n);
        let mut a = m.normalize(&a0)?;
        let mut b = m.normalize(&b0)?;

        let overlap = |a: &CVector, b: &CVector| -> Result<Complex64> {
            let ua = u_prop.matvec(a)?;
            m.inner(b, &ua)
        };

        // Riemannian gradient on the Q-sphere: precondition the Euclidean
        // gradient with Q^-1 and project onto the tangent space
        // { d : Re <x, d>_Q = 0 }.
        let tangent_grad = |x: &CVector, euclid: &CVector| -> Result<CVector> {
            let riem = m.q_inv.matvec(euclid)?;
            let radial = m.inner(x, &riem)?.re;
            Ok(&riem - &x.mapv(|z| z * radial))
        };

        let mut f = overlap(&a, &b)?.norm_sqr();
        let mut eta = 1.0;
        let mut converged = false;
        let mut quiet_streak = 0u32;
        for _ in 0..iters {
            let ua = u_prop.matvec(&a)?;
            let sval = m.inner(&b, &ua)?;
            let qb = m.q.matvec(&b)?;
            let grad_a = u_dag.matvec(&qb)?.mapv(|z| z * sval);
            let qua = m.q.matvec(&ua)?;
            let grad_b = qua.mapv(|z| z * sval.conj());
            let dir_a = tangent_grad(&a, &grad_a)?;
            let dir_b = tangent_grad(&b, &grad_b)?;
            let slope = m.inner(&dir_a, &dir_a)?.re + m.inner(&dir_b, &dir_b)?.re;
            if slope <= 1e-30 * f.max(1.0) {
                converged = true;
                break;
            }
            // Normalized step so eta measures arc length, not gradient scale.
            let inv_len = 1.0 / slope.sqrt();

            let mut accepted = false;
            for _ in 0..50 {
                let a_try =
                    m.normalize(&(&a + &dir_a.mapv(|z| z * (eta * inv_len))))?;
                let b_try =
                    m.normalize(&(&b + &dir_b.mapv(|z| z * (eta * inv_len))))?;
                let f_try = overlap(&a_try, &b_try)?.norm_sqr();
                if f_try > f {
                    let gain = f_try - f;
                    a = a_try;
                    b = b_try;
                    f = f_try;
                    eta = (eta * 1.3).min(4.0);
                    accepted = true;
                    if gain <= 1e-13 * f.max(1.0) {
                        quiet_streak += 1;
                    } else {
                        quiet_streak = 0;
                    }
                    break;
                }
                eta *= 0.5;
            }
            if !accepted || quiet_streak >= 8 {
                converged = true;
                break;
            }
        }

        if f > best_sq {
            best_sq = f;
            best_a = a;
            best_b = b;
            best_converged = converged;
        }
    }

    Ok(OracleOutcome {
        best_value: best_sq.max(0.0).sqrt(),
        best_a,
        best_b,
        converged: best_converged,
    })
}
