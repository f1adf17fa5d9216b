use thiserror::Error;

/// Errors raised by the radial numerics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("weighted integral diverges: tail exponent {exponent} must exceed {needed}")]
    DivergentTail { exponent: f64, needed: f64 },

    #[error(
        "potential undefined in dimension {dim}: total mass {mass:e} exceeds tolerance {tol:e} \
         (the H^-1 norm is infinite unless the integral vanishes)"
    )]
    NonzeroMass { dim: usize, mass: f64, tol: f64 },

    #[error("profile is not nonnegative and radially non-increasing; use the projected solver")]
    NotMonotone,

    #[error("no root found in [{lo}, {hi}]")]
    RootNotFound { lo: f64, hi: f64 },

    #[error("solver hit iteration cap {iterations} with KKT residual {residual:e}")]
    IterationCap { iterations: usize, residual: f64 },

    #[error("m(c) < 1 for every c up to {c_max:e}; rescale the profile up")]
    ProfileTooSmall { c_max: f64 },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("cross-check failed for {what}: {got} vs {expected} (relative error {rel:e})")]
    CrossCheck {
        what: &'static str,
        got: f64,
        expected: f64,
        rel: f64,
    },

    #[error(
        "neither consistency variant solves the Euler-Lagrange equation \
         (relative residuals: printed {printed:e}, rederived {rederived:e})"
    )]
    VariantTripwire { printed: f64, rederived: f64 },

    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
