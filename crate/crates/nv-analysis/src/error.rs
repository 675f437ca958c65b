use nv_model::ModelError;
use pulse_engine::EngineError;
use thiserror::Error;

/// Errors from the fitting and spectral-analysis layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    /// Simulation input (rates, drives) rejected by the model layer.
    #[error(transparent)]
    Model(#[from] ModelError),

    /// Simulation failure while producing data for an analysis operation.
    #[error(transparent)]
    Engine(#[from] EngineError),

    /// Input arrays were unusable: too short, mismatched, or non-finite.
    #[error("invalid input data: {reason}")]
    InvalidInput { reason: &'static str },

    /// τ samples must be uniformly spaced for the FFT estimate.
    #[error("non-uniform sample spacing at index {index} (relative deviation {deviation:e})")]
    NonUniformSpacing { index: usize, deviation: f64 },

    /// The spectrum carries no energy outside the DC bin.
    #[error("no spectral peak: signal has no oscillating component")]
    NoSpectralPeak,

    /// The fit hit its iteration cap. Carries the best parameters seen so
    /// they can be inspected; they are NOT a valid fit result.
    #[error(
        "fit did not converge after {iterations} iterations \
         (best-so-far parameters {best:?} are not valid, residual RMS {residual_rms:e})"
    )]
    FitNonConvergence {
        iterations: usize,
        best: Vec<f64>,
        residual_rms: f64,
    },

    /// The data cannot determine the parameters: the Jacobian columns are
    /// (numerically) collinear, e.g. a saturation scan confined to its
    /// linear regime.
    #[error("fit is ill-conditioned: {reason}")]
    IllConditioned { reason: &'static str },

    /// The fitted parameters violate the model's validity constraints
    /// (negative decay time, non-positive saturation rate, ...).
    #[error("fit produced out-of-domain parameters: {reason}")]
    InvalidFit { reason: &'static str },

    /// A simulated relaxation never crossed the requested threshold within
    /// the time horizon.
    #[error("threshold {threshold} not reached within {horizon:e} s")]
    ThresholdNotReached { threshold: f64, horizon: f64 },
}
