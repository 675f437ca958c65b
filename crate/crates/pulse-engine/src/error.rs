use nv_model::ModelError;
use thiserror::Error;

/// Errors produced while scheduling pulses or iterating measurement cycles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    /// The underlying seven-level model rejected its inputs or blew up.
    #[error(transparent)]
    Model(#[from] ModelError),

    /// A pulse sequence violated a structural rule, e.g. an RF drive during
    /// the laser phase or a negative duration.
    #[error("invalid pulse sequence: {field} = {value}")]
    InvalidSequence { field: &'static str, value: f64 },

    /// An iteration control parameter (tolerance, cycle cap) was unusable.
    #[error("invalid iteration parameter: {field} = {value}")]
    InvalidIteration { field: &'static str, value: f64 },

    /// Cycle iteration hit the cycle cap before successive cycle-final
    /// states agreed to tolerance.
    #[error("no steady cycle after {cycles} cycles (last residual {residual:e})")]
    NoConvergence { cycles: usize, residual: f64 },

    /// The reference (RF-off) sequence produced zero integrated PL, so
    /// contrast is undefined.
    #[error("reference sequence produced zero integrated PL; contrast undefined")]
    ZeroReference,

    /// A sweep was requested over an empty τ grid.
    #[error("τ list is empty")]
    EmptyTauList,

    /// The τ grid must be finite, non-negative, and strictly ascending.
    #[error("τ list invalid at index {index}: {value}")]
    InvalidTau { index: usize, value: f64 },
}
