use thiserror::Error;

/// Errors produced by the calculus, planner and simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible-ratio: dominant ratio {eta} must lie strictly inside (0, 1)")]
    InfeasibleRatio { eta: f64 },

    #[error(
        "infeasible-service: {s_bits} bits cannot be delivered at {speed} m/s \
         (station total is {max_bits} bits)"
    )]
    InfeasibleService { s_bits: f64, speed: f64, max_bits: f64 },

    #[error("quadrature-failure: error estimate {abs_err:e} above tolerance after {subdivisions} subdivisions")]
    QuadratureFailure { abs_err: f64, subdivisions: usize },

    #[error("solver-failure: {0}")]
    SolverFailure(String),

    #[error("invalid-config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
