use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped by what went wrong rather than by module, since
/// several modules share the same failure modes (pole proximity, capacity).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q = {q} is outside the admissible range {range}")]
    Domain { q: f64, range: &'static str },

    #[error("invalid partition {parts:?}: {reason}")]
    InvalidPartition { parts: Vec<u32>, reason: &'static str },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid standard tableau: {0}")]
    InvalidTableau(String),

    #[error("interlacing violated: {0}")]
    Interlacing(String),

    #[error("capacity exceeded: {what} = {value} > limit {limit}")]
    Capacity {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("x = {x} is within {margin} of the support [{lo}, {hi}]")]
    InsideSupport { x: f64, lo: f64, hi: f64, margin: f64 },

    #[error("x = {x} is too close to the pole at {pole}")]
    PoleProximity { x: f64, pole: f64 },

    #[error("q-moment overflow: n * |s| * ln(1/q) = {exponent} > 700")]
    MomentOverflow { exponent: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration too coarse: Richardson error estimate {estimate:.3e} > {tolerance:.1e} with {steps} steps")]
    StepsTooFew {
        steps: usize,
        estimate: f64,
        tolerance: f64,
    },

    #[error("no root on the physical branch at x = {x}, q = {q}: bracket [{lo}, {hi}]")]
    NoRoot { x: f64, q: f64, lo: f64, hi: f64 },

    #[error("series extraction ill-conditioned: residual {residual:.3e}")]
    IllConditioned { residual: f64 },

    #[error("finite-difference step {step:e} degenerate: {reason}")]
    StepDegenerate { step: f64, reason: &'static str },

    #[error("deformation parameter t = {t} too large: {reason}")]
    DeformationTooLarge { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
