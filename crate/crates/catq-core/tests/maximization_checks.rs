//! The analytic maximizer against the independent gradient-ascent oracle,
//! plus the overlap bound itself.

mod common;

use catq_core::dynamics::{evolve_a, evolve_b, expand, BoundaryData};
use catq_core::matrix::CMatrix;
use catq_core::maximization::{build_max_pair, oracle_maximize, transition_amplitude};
use catq_core::models::{random_nonnormal, RandomSpec};
use catq_core::qmetric::QMetric;
use catq_core::spectral::eigendecompose_default;
use common::{c, random_vector, seeded_rng};
use proptest::prelude::*;

fn canonical_2x2() -> (catq_core::Spectrum, QMetric) {
    let h = CMatrix::new(ndarray::array![
        [c(0.0, 1.0), c(1.0, 0.0)],
        [c(0.0, 0.0), c(0.0, -1.0)]
    ])
    .unwrap();
    let s = eigendecompose_default(&h).unwrap();
    let m = QMetric::from_spectrum(&s).unwrap();
    (s, m)
}

#[test]
fn oracle_reaches_the_analytic_value_on_the_canonical_case() {
    let (s, m) = canonical_2x2();
    let (sol, _, _) = build_max_pair(&s, &m, 0.0, 1.0, 1.0, None, 0.0, None).unwrap();
    let outcome = oracle_maximize(&s, &m, 0.0, 1.0, 1.0, 24, 400, 11).unwrap();
    let e = 1.0_f64.exp();
    assert!((sol.attained - e).abs() / e <= 1e-10);
    let rel = (outcome.best_value - e).abs() / e;
    assert!(rel <= 1e-4, "oracle off by {rel:.3e}");
    assert!(outcome.best_value <= e * (1.0 + 1e-9), "bound exceeded");
}

#[test]
fn oracle_on_hermitian_input_saturates_at_one() {
    let h = CMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, -0.3]]).unwrap();
    let s = eigendecompose_default(&h).unwrap();
    let m = QMetric::from_spectrum(&s).unwrap();
    let outcome = oracle_maximize(&s, &m, 0.0, 2.0, 1.0, 16, 300, 5).unwrap();
    assert!(
        (outcome.best_value - 1.0).abs() <= 1e-6,
        "best {}",
        outcome.best_value
    );
}

#[test]
fn oracle_concentrates_on_the_dominant_mode() {
    // Distinct imaginary parts: the maximizer must align with the top mode.
    let h = random_nonnormal(
        &RandomSpec::new(4, 23)
            .with_im_upper(0.6)
            .with_im_spread(0.8)
            .with_cond_target(10.0),
    )
    .unwrap();
    let s = eigendecompose_default(&h).unwrap();
    let m = QMetric::from_spectrum(&s).unwrap();
    let outcome = oracle_maximize(&s, &m, 0.0, 2.0, 1.0, 32, 500, 7).unwrap();
    // |<lambda_max, A_best>_Q| with both sides Q-normalized.
    let top = m.normalize(&s.eigenvector(0)).unwrap();
    let overlap = m.inner(&top, &outcome.best_a).unwrap().norm();
    assert!(overlap >= 0.999, "dominant-mode overlap {overlap}");
}

#[test]
fn maximizer_freedom_is_degenerate() {
    // Two modes pinned at the same imaginary part: any admissible weight
    // vector and phase choice attains the same value.
    let basis_src = random_nonnormal(&RandomSpec::new(4, 71).with_cond_target(25.0)).unwrap();
    let basis = eigendecompose_default(&basis_src).unwrap().diagonalizer;
    let eigenvalues = vec![c(0.4, 0.3), c(-1.1, 0.3), c(0.2, -0.2), c(1.5, -0.9)];
    let h = catq_core::models::assemble(&eigenvalues, &basis).unwrap();
    let s = eigendecompose_default(&h).unwrap();
    let m = QMetric::from_spectrum(&s).unwrap();

    let cases: [(Option<Vec<f64>>, f64, Option<Vec<f64>>); 4] = [
        (None, 0.0, None),
        (Some(vec![0.8, 0.2]), 0.0, None),
        (Some(vec![0.5, 0.5]), 1.2, Some(vec![0.3, -0.9])),
        (Some(vec![0.05, 0.95]), -2.0, Some(vec![1.0, 1.0])),
    ];
    let mut attained = Vec::new();
    for (w, theta_c, phases) in &cases {
        let (sol, _, _) = build_max_pair(
            &s,
            &m,
            0.0,
            1.4,
            1.0,
            w.as_deref(),
            *theta_c,
            phases.as_deref(),
        )
        .unwrap();
        assert_eq!(sol.dominant_set.len(), 2);
        attained.push(sol.attained);
    }
    let reference = attained[0];
    for a in &attained {
        assert!(
            (a - reference).abs() <= 1e-12 * reference,
            "attained values spread: {attained:?}"
        );
    }
}

#[test]
fn overlap_phase_carries_theta_c() {
    let (s, m) = canonical_2x2();
    let theta_c = 0.9;
    let (sol, a_state, b_state) =
        build_max_pair(&s, &m, 0.0, 1.0, 1.0, None, theta_c, None).unwrap();
    let bd = BoundaryData::new(
        expand(&s, &a_state).unwrap(),
        expand(&s, &b_state).unwrap(),
        0.0,
        1.0,
        1.0,
    )
    .unwrap();
    for t in [0.0, 0.35, 1.0] {
        let a_t = evolve_a(&s, &bd, t).unwrap();
        let b_t = evolve_b(&s, &bd, t).unwrap();
        let amp = transition_amplitude(&m, &b_t, &a_t).unwrap();
        let expected = num_complex::Complex64::from_polar(sol.attained, theta_c);
        assert!(
            (amp - expected).norm() <= 1e-10 * sol.attained,
            "t {t}: amplitude {amp} vs {expected}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn no_q_normalized_pair_beats_the_bound(seed in 0u64..10_000) {
        let dim = 2 + (seed % 5) as usize;
        let h = random_nonnormal(
            &RandomSpec::new(dim, seed)
                .with_im_upper(0.4)
                .with_cond_target(40.0),
        )
        .unwrap();
        let s = eigendecompose_default(&h).unwrap();
        let m = QMetric::from_spectrum(&s).unwrap();
        let window = 1.7;
        let bound = {
            let b = s.eigenvalues.iter().map(|l| l.im).fold(f64::MIN, f64::max);
            (b * window).exp()
        };

        let mut rng = seeded_rng(seed ^ 0x5EED);
        let a0 = m.normalize(&random_vector(&mut rng, dim)).unwrap();
        let b0 = m.normalize(&random_vector(&mut rng, dim)).unwrap();
        let bd = BoundaryData::new(
            expand(&s, &a0).unwrap(),
            expand(&s, &b0).unwrap(),
            0.0,
            window,
            1.0,
        )
        .unwrap();
        for j in 0..=4 {
            let t = window * j as f64 / 4.0;
            let a_t = evolve_a(&s, &bd, t).unwrap();
            let b_t = evolve_b(&s, &bd, t).unwrap();
            let amp = m.inner(&b_t, &a_t).unwrap().norm();
            prop_assert!(
                amp <= bound * (1.0 + 1e-9),
                "amplitude {amp} above bound {bound}"
            );
        }
    }
}

#[test]
fn saturation_for_admissible_parameter_choices() {
    let (s, m) = canonical_2x2();
    // Single dominant mode: theta_c and the (trivial) weight still saturate.
    for theta_c in [0.0, 0.5, -1.3] {
        let (sol, _, _) =
            build_max_pair(&s, &m, 0.0, 1.0, 1.0, Some(&[3.0]), theta_c, Some(&[0.4]))
                .unwrap();
        let e = 1.0_f64.exp();
        assert!((sol.attained - e).abs() / e <= 1e-10);
    }
}
