//! Density, current and the continuity equation for grid wavefunctions
//! evolved by the exact propagator of the Hermitian grid oscillator.

use catq_core::dynamics::QhPropagator;
use catq_core::matrix::CVector;
use catq_core::models::{oscillator_hamiltonian, OscillatorSpec};
use catq_core::probability::{continuity_residual, gaussian_packet, GridWavefunction};
use catq_core::spectral::eigendecompose_default;
use num_complex::Complex64;

fn coherent_state(spec: &OscillatorSpec, t: f64) -> GridWavefunction {
    let (_, dq) = spec.grid();
    gaussian_packet(spec.grid_min(), dq, spec.n_points, 1.0, 1.0, t, 1.0, 1.0).unwrap()
}

fn snapshot(samples: CVector, template: &GridWavefunction, t: f64) -> GridWavefunction {
    GridWavefunction::new(
        samples,
        template.q_min(),
        template.dq(),
        t,
        template.mass(),
        template.hbar(),
    )
    .unwrap()
}

fn residual_at(dq_half_steps: u32) -> f64 {
    // dq = 0.05 / 2^k on [-8, 8]; dt = 1e-3 / 2^k.
    let factor = 2u32.pow(dq_half_steps) as f64;
    let n = (320.0 * factor) as usize + 1;
    let dt = 1e-3 / factor;
    let one = Complex64::new(1.0, 0.0);
    let spec = OscillatorSpec::new(one, one, 1.0, 8.0, n).unwrap();
    let h = oscillator_hamiltonian(&spec).unwrap();

    let psi0 = coherent_state(&spec, 0.0);
    // March to t = 0.3 with the exact propagator, then take one more step.
    let warm = QhPropagator::new(&h, 0.3, 1.0).unwrap();
    let at_t = warm.step(psi0.samples()).unwrap();
    let stepper = QhPropagator::new(&h, dt, 1.0).unwrap();
    let after = stepper.step(&at_t).unwrap();

    let before = snapshot(at_t, &psi0, 0.3);
    let after = snapshot(after, &psi0, 0.3 + dt);
    continuity_residual(&before, &after).unwrap()
}

#[test]
fn coherent_state_continuity_residual() {
    let coarse = residual_at(0);
    assert!(coarse <= 1e-3, "residual {coarse:.3e}");
    let fine = residual_at(1);
    assert!(
        coarse >= 3.0 * fine,
        "halving dq and dt improved only {:.2}x ({coarse:.3e} -> {fine:.3e})",
        coarse / fine
    );
}

#[test]
fn stationary_state_has_static_density_and_current() {
    let one = Complex64::new(1.0, 0.0);
    let spec = OscillatorSpec::new(one, one, 1.0, 8.0, 321).unwrap();
    let h = oscillator_hamiltonian(&spec).unwrap();
    let s = eigendecompose_default(&h).unwrap();
    // Ground state of the grid Hamiltonian: the lowest-energy eigenvector.
    let ground_idx = (0..s.dim())
        .min_by(|&a, &b| {
            s.eigenvalues[a]
                .re
                .partial_cmp(&s.eigenvalues[b].re)
                .unwrap()
        })
        .unwrap();
    let (_, dq) = spec.grid();
    let col = s.eigenvector(ground_idx);
    let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>() * dq;
    let ground = col.mapv(|z| z / norm.sqrt());

    let dt = 1e-3;
    let stepper = QhPropagator::new(&h, dt, 1.0).unwrap();
    let after = stepper.step(&ground).unwrap();
    let psi0 = GridWavefunction::new(ground, spec.grid_min(), dq, 0.0, 1.0, 1.0).unwrap();
    let psi1 = snapshot(after, &psi0, dt);
    let residual = continuity_residual(&psi0, &psi1).unwrap();
    assert!(residual <= 1e-8, "stationary residual {residual:.3e}");
    // The eigenstate of a real symmetric matrix is real up to phase: no flow.
    let peak_current = psi0
        .current()
        .iter()
        .map(|j| j.abs())
        .fold(0.0_f64, f64::max);
    assert!(peak_current <= 1e-12);
}

#[test]
fn probability_is_conserved_over_a_thousand_steps() {
    let one = Complex64::new(1.0, 0.0);
    let spec = OscillatorSpec::new(one, one, 1.0, 8.0, 321).unwrap();
    let h = oscillator_hamiltonian(&spec).unwrap();
    let psi0 = coherent_state(&spec, 0.0);
    let stepper = QhPropagator::new(&h, 1e-3, 1.0).unwrap();

    let mut samples = psi0.samples().clone();
    for _ in 0..1000 {
        samples = stepper.step(&samples).unwrap();
    }
    let last = snapshot(samples, &psi0, 1.0);
    let drift = (last.total_probability() - 1.0).abs();
    assert!(drift <= 1e-8, "probability drift {drift:.3e}");
}
