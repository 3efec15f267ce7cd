//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// The matrix is treated as non-diagonalizable: cond(P) exceeded the limit.
    #[error("matrix treated as defective: cond(P) = {cond:.3e} exceeds limit {limit:.3e}")]
    Defective { cond: f64, limit: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerically singular: {0}")]
    NumericallySingular(String),

    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("time {t} outside the evolution window [{t_a}, {t_b}]")]
    TimeOutOfRange { t: f64, t_a: f64, t_b: f64 },

    #[error("weights are all zero")]
    DegenerateWeights,

    #[error("final time must be strictly later than initial time (t_a = {t_a}, t_b = {t_b})")]
    TimeOrder { t_a: f64, t_b: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("two-sided overlap vanishes (|overlap| = {0:.3e})")]
    VanishingOverlap(f64),

    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("grid too coarse: {0} points (need at least 16)")]
    GridTooCoarse(usize),

    #[error("wavefunction has not decayed at the grid edges (edge/max = {0:.3e})")]
    EdgeNotDecayed(f64),

    #[error("grids are incompatible: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
