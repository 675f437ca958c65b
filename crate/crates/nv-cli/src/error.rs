use nv_analysis::AnalysisError;
use nv_model::ModelError;
use pulse_engine::EngineError;
use thiserror::Error;

/// Process exit code: input/configuration problem.
pub const EXIT_INPUT: i32 = 2;
/// Process exit code: the simulation itself failed numerically.
pub const EXIT_NUMERICAL: i32 = 3;
/// Process exit code: a requested fit did not produce a valid result.
pub const EXIT_FIT: i32 = 4;

/// Top-level CLI failure, bucketed by the exit-code contract:
/// 0 success, 2 input error, 3 numerical failure, 4 fit non-convergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Numerical(String),

    #[error("{0}")]
    FitFailure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::FitFailure(_) => EXIT_FIT,
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            // Bad rates/drives/steps are configuration problems; a state
            // blowing up mid-run or a singular stationary solve is not.
            ModelError::InvalidRate { .. }
            | ModelError::InvalidDrive { .. }
            | ModelError::InvalidState { .. }
            | ModelError::InvalidStep { .. }
            | ModelError::DriveInSteadyState { .. } => CliError::Input(e.to_string()),
            ModelError::NonFiniteState { .. } | ModelError::DegenerateRates { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Model(m) => m.into(),
            EngineError::InvalidSequence { .. }
            | EngineError::InvalidIteration { .. }
            | EngineError::EmptyTauList
            | EngineError::InvalidTau { .. } => CliError::Input(e.to_string()),
            EngineError::NoConvergence { .. } | EngineError::ZeroReference => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Model(m) => m.into(),
            AnalysisError::Engine(en) => en.into(),
            AnalysisError::InvalidInput { .. } | AnalysisError::NonUniformSpacing { .. } => {
                CliError::Input(e.to_string())
            }
            AnalysisError::ThresholdNotReached { .. } => CliError::Numerical(e.to_string()),
            AnalysisError::NoSpectralPeak
            | AnalysisError::FitNonConvergence { .. }
            | AnalysisError::IllConditioned { .. }
            | AnalysisError::InvalidFit { .. } => CliError::FitFailure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
