//! Independent numerical oracles for the integration tests.
//!
//! Nothing here goes through the crate's spectral decomposition: the matrix
//! exponential is plain scaling-and-squaring on a Taylor series, and the ODE
//! integrator is classical RK4. Agreement between these and the eigenbasis
//! routes is what the oracle tests assert.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// exp(A) by scaling-and-squaring: scale until ||A/2^k||_1 < 1/4, run the
/// Taylor series to order 24 (remainder far below machine precision at that
/// norm), then square k times.
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[[i, j]].norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let k = if norm1 <= 0.25 {
        0
    } else {
        (norm1 / 0.25).log2().ceil() as u32
    };
    let scale = 2.0_f64.powi(k as i32);
    let a_small = a.mapv(|z| z / scale);

    let mut result = Array2::<Complex64>::eye(n);
    let mut term = Array2::<Complex64>::eye(n);
    for order in 1..=24 {
        term = term.dot(&a_small).mapv(|z| z / order as f64);
        result = &result + &term;
    }
    for _ in 0..k {
        result = result.dot(&result);
    }
    result
}

/// Integrate dv/dt = -i/hbar H v from 0 to `total_time` with `steps` RK4 steps.
pub fn rk4_schrodinger(
    h: &Array2<Complex64>,
    v0: &Array1<Complex64>,
    total_time: f64,
    steps: usize,
    hbar: f64,
) -> Array1<Complex64> {
    let dt = total_time / steps as f64;
    let rhs = |v: &Array1<Complex64>| -> Array1<Complex64> {
        h.dot(v).mapv(|z| -Complex64::i() / hbar * z)
    };
    let mut v = v0.clone();
    for _ in 0..steps {
        let k1 = rhs(&v);
        let k2 = rhs(&(&v + &k1.mapv(|z| z * 0.5 * dt)));
        let k3 = rhs(&(&v + &k2.mapv(|z| z * 0.5 * dt)));
        let k4 = rhs(&(&v + &k3.mapv(|z| z * dt)));
        v = &v
            + &(&(&k1 + &k4) + &(&k2 + &k3).mapv(|z| z * 2.0))
                .mapv(|z| z * dt / 6.0);
    }
    v
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Array1<Complex64> {
    Array1::from_iter((0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Array2<Complex64> {
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    out
}

pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn vec_diff_norm(a: &Array1<Complex64>, b: &Array1<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
