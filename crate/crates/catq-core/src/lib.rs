//! Numerical machinery for non-normal but diagonalizable Hamiltonians.
//!
//! A diagonalizable H = P D P^-1 that fails to be normal still becomes
//! normal — and its eigenvectors orthonormal — under the inner product
//! defined by the Hermitian positive-definite metric Q = (P')^-1 P^-1. On
//! top of that metric this crate builds:
//!
//! - the Q-adjoint, the Q-Hermitian/anti-Q-Hermitian split of H, and
//!   normality diagnostics ([`spectral`], [`qmetric`]);
//! - exact two-sided evolution: a forward state under H, a backward state
//!   under H^+Q, and the reduced state under the Q-Hermitian part
//!   ([`dynamics`]);
//! - boundary pairs maximizing the two-sided overlap, whose normalized
//!   matrix elements of Q-Hermitian observables are real and evolve under
//!   the Q-Hermitian part of H ([`maximization`], [`observables`]);
//! - model generators, including the complex-frequency harmonic oscillator
//!   on a grid with its scaled-coordinate relations ([`models`]);
//! - densities, currents and continuity-equation residuals for grid
//!   wavefunctions ([`probability`]).

extern crate blas_src;

pub mod dynamics;
pub mod error;
pub mod matrix;
pub mod maximization;
pub mod models;
pub mod observables;
pub mod probability;
pub mod qmetric;
mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{CMatrix, CVector};
pub use maximization::{MaxSolution, OracleOutcome};
pub use models::{OscillatorSpec, QqResiduals, RandomSpec};
pub use observables::{AverageKind, AverageReport};
pub use probability::GridWavefunction;
pub use qmetric::QMetric;
pub use spectral::Spectrum;
