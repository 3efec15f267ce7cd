//! Normalized two-sided matrix elements and their reality diagnostics.
//!
//! For a maximizing boundary pair, the two-sided average of any Q-Hermitian
//! operator collapses to an ordinary Q-expectation in a single reduced state
//! and is therefore real. The functions here compute both sides of that
//! identity plus the commutator form of its time derivative; `reality_sweep`
//! drives the whole check over seeded operators and times.

use num_complex::Complex64;

use crate::dynamics::{evolve_a, evolve_b, BoundaryData};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, CVector};
use crate::maximization::build_max_pair;
use crate::qmetric::QMetric;
use crate::rng;
use crate::spectral::Spectrum;

/// Which average a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageKind {
    /// <B(t)|_Q O |A(t)> / <B(t)|_Q A(t)> with independent boundary states.
    TwoSided,
    /// <X(t)|_Q O |X(t)> in a single Q-normalized state.
    Tilde,
}

/// A computed average with its scale-aware imaginary residual.
#[derive(Debug, Clone)]
pub struct AverageReport {
    pub value: Complex64,
    /// |Im value| / max(|value|, 1); vanishes for Q-Hermitian observables
    /// over a maximizing boundary pair.
    pub imag_residual: f64,
    pub t: f64,
    pub kind: AverageKind,
}

impl AverageReport {
    fn new(value: Complex64, t: f64, kind: AverageKind) -> Self {
        let imag_residual = value.im.abs() / value.norm().max(1.0);
        Self {
            value,
            imag_residual,
            t,
            kind,
        }
    }
}

/// Threshold below which the two-sided overlap counts as vanished; the
/// maximizing pair guarantees exp(B T / hbar) > 0, so anything near zero
/// signals misuse rather than physics.
const OVERLAP_FLOOR: f64 = 1e-300;

/// Two-sided normalized matrix element at time `t`:
/// <B_t, O A_t>_Q / <B_t, A_t>_Q.
pub fn normalized_matrix_element(
    m: &QMetric,
    b_t: &CVector,
    o: &CMatrix,
    a_t: &CVector,
    t: f64,
) -> Result<AverageReport> {
    let denom = m.inner(b_t, a_t)?;
    if denom.norm() <= OVERLAP_FLOOR {
        return Err(Error::VanishingOverlap(denom.norm()));
    }
    let oa = o.matvec(a_t)?;
    let numer = m.inner(b_t, &oa)?;
    Ok(AverageReport::new(numer / denom, t, AverageKind::TwoSided))
}

/// Reduced average <X, O X>_Q for a Q-normalized state.
pub fn tilde_average(
    m: &QMetric,
    tilde_a_t: &CVector,
    o: &CMatrix,
    t: f64,
) -> Result<AverageReport> {
    let norm = m.inner(tilde_a_t, tilde_a_t)?.re;
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    let oa = o.matvec(tilde_a_t)?;
    let value = m.inner(tilde_a_t, &oa)?;
    Ok(AverageReport::new(value, t, AverageKind::Tilde))
}

/// Right-hand side of the reduced average's equation of motion:
/// (i/hbar) <X, [h_qh, O] X>_Q.
pub fn ehrenfest_rhs(
    m: &QMetric,
    tilde_a_t: &CVector,
    o: &CMatrix,
    h_qh: &CMatrix,
    hbar: f64,
) -> Result<Complex64> {
    let norm = m.inner(tilde_a_t, tilde_a_t)?.re;
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    let comm = &(h_qh * o) - &(o * h_qh);
    let cv = comm.matvec(tilde_a_t)?;
    let expect = m.inner(tilde_a_t, &cv)?;
    Ok(Complex64::i() / hbar * expect)
}

/// Build the maximizing pair for the window, then sweep seeded Q-Hermitian
/// observables over sampled interior times; returns the largest imaginary
/// residual seen across the whole grid.
pub fn reality_sweep(
    s: &Spectrum,
    m: &QMetric,
    t_a: f64,
    t_b: f64,
    hbar: f64,
    n_observables: usize,
    n_times: usize,
    seed: u64,
) -> Result<f64> {
    if n_observables == 0 || n_times == 0 {
        return Err(Error::InvalidArgument(
            "need at least one observable and one time",
        ));
    }
    let (sol, a_state, b_state) =
        build_max_pair(s, m, t_a, t_b, hbar, None, 0.0, None)?;
    debug_assert!(!sol.dominant_set.is_empty());

    let a_coeffs = crate::dynamics::expand(s, &a_state)?;
    let b_coeffs = crate::dynamics::expand(s, &b_state)?;
    let bd = BoundaryData::new(a_coeffs, b_coeffs, t_a, t_b, hbar)?;

    let times: Vec<f64> = if n_times == 1 {
        vec![0.5 * (t_a + t_b)]
    } else {
        (0..n_times)
            .map(|j| t_a + (t_b - t_a) * j as f64 / (n_times - 1) as f64)
            .collect()
    };

    let mut worst = 0.0_f64;
    for k in 0..n_observables {
        let o = m.random_q_hermitian(rng::derive_seed(seed, k as u64));
        for &t in &times {
            let a_t = evolve_a(s, &bd, t)?;
            let b_t = evolve_b(s, &bd, t)?;
            let report = normalized_matrix_element(m, &b_t, &o, &a_t, t)?;
            worst = worst.max(report.imag_residual);
        }
    }
    Ok(worst)
}
