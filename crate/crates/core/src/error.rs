use thiserror::Error;

use crate::rng::SeedSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: matrices need at least one row")]
    InvalidDimension(usize),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("sampler for law `{law}` exceeded {attempts} rejection attempts for one variate")]
    SamplerMisconfigured { law: String, attempts: usize },

    #[error("entry law `{law}`: {reason}")]
    InvalidLaw { law: String, reason: String },

    #[error("expression parse error at byte {pos}: {msg}")]
    Expression { pos: usize, msg: String },

    #[error("eigensolver failed to converge (LAPACK info = {info}, seed = {seed:?})")]
    EigensolverFailure { info: i32, seed: Option<SeedSpec> },

    #[error("a 1x1 matrix has no minor")]
    NoMinor,

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("eigenvalue {index} is not simple (gap {gap:e} below {required:e})")]
    NoGradient { index: usize, gap: f64, required: f64 },

    #[error("block split L = {l} is invalid for N = {n}")]
    InvalidSplit { l: usize, n: usize },

    #[error("energy {energy} lies on the eigenvalue {eigenvalue} (eta = 0)")]
    Pole { energy: f64, eigenvalue: f64 },

    #[error("dense solve failed: matrix is singular (LAPACK info = {0})")]
    SingularSystem(i32),
}
