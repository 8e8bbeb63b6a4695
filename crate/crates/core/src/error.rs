use thiserror::Error;

use crate::power::FeasibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} elements, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(
        "power split infeasible: S2 = {:e} does not exceed the required {:e}",
        .0.s2_actual,
        .0.s2_required
    )]
    InfeasiblePowerSplit(FeasibilityReport),

    #[error("amplitude problem infeasible: target {q:e} is not below the attainable {cap:e}")]
    InfeasibleAmplitude { q: f64, cap: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("grid oracle handles at most 3 elements, got {0}")]
    OracleScope(usize),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
