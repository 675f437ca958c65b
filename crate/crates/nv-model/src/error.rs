use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("transition rate {name} = {value} must be finite and non-negative")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("drive parameter {name} = {value} must be finite and non-negative")]
    InvalidDrive { name: &'static str, value: f64 },

    #[error("state entry {name} = {value} is not finite")]
    InvalidState { name: &'static str, value: f64 },

    #[error("integration step dt = {dt} s must be positive and no larger than the duration {duration} s")]
    InvalidStep { dt: f64, duration: f64 },

    #[error("state became non-finite at integration step {step}")]
    NonFiniteState { step: usize },

    #[error("stationary solve requires the RF drive off (omega_r = {omega_r})")]
    DriveInSteadyState { omega_r: f64 },

    #[error("rate matrix is degenerate (pivot {pivot:.3e}); stationary state undetermined")]
    DegenerateRates { pivot: f64 },
}
