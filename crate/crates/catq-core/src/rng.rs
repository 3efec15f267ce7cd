//! Seeded random complex data, shared by the model generators and the
//! observable samplers. ChaCha keeps streams identical across platforms.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a sub-stream seed, so sweeps can hand out independent streams.
pub(crate) fn derive_seed(base: u64, index: u64) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index)
}

pub(crate) fn complex_gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> Array2<Complex64> {
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            out[[i, j]] = Complex64::new(re, im);
        }
    }
    out
}

pub(crate) fn complex_gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Array1<Complex64> {
    let mut out = Array1::zeros(n);
    for k in 0..n {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        out[k] = Complex64::new(re, im);
    }
    out
}
