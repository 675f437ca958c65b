use nv_model::TransitionRates;
use rayon::prelude::*;

use crate::cycle::contrast_at_tau;
use crate::error::EngineError;
use crate::sequence::PulseSequence;

/// Settings a sweep was run with, kept alongside the data so downstream
/// fits and file writers can report them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetadata {
    /// The sequence template; its `rf_duration` is overridden per point.
    pub sequence: PulseSequence,
    /// Integrator step in seconds.
    pub dt: f64,
    /// Cycle-convergence tolerance.
    pub tol: f64,
    /// Cycle cap per point.
    pub max_cycles: usize,
}

/// Contrast versus RF duration.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiCurve {
    /// RF durations in seconds, strictly ascending.
    pub tau_values: Vec<f64>,
    /// Contrast at each τ, same length as `tau_values`.
    pub contrast_values: Vec<f64>,
    /// How the sweep was produced.
    pub metadata: SweepMetadata,
}

/// Sweep the RF duration and measure contrast at every point.
///
/// Each τ is an independent steady-cycle computation (signal and its own
/// RF-off reference), so points are evaluated in parallel. Results are
/// ordered exactly like `taus` and are bit-identical regardless of how many
/// worker threads run the sweep.
pub fn simulate_rabi_sweep(
    seq_template: &PulseSequence,
    rates: &TransitionRates,
    taus: &[f64],
    dt: f64,
    tol: f64,
    max_cycles: usize,
) -> Result<RabiCurve, EngineError> {
    seq_template.validate()?;
    if taus.is_empty() {
        return Err(EngineError::EmptyTauList);
    }
    for (index, &value) in taus.iter().enumerate() {
        let ascending = index == 0 || taus[index - 1] < value;
        if !value.is_finite() || value < 0.0 || !ascending {
            return Err(EngineError::InvalidTau { index, value });
        }
    }

    let contrast_values = taus
        .par_iter()
        .map(|&tau| contrast_at_tau(&seq_template.with_rf_duration(tau), rates, dt, tol, max_cycles))
        .collect::<Result<Vec<f64>, EngineError>>()?;

    Ok(RabiCurve {
        tau_values: taus.to_vec(),
        contrast_values,
        metadata: SweepMetadata {
            sequence: seq_template.clone(),
            dt,
            tol,
            max_cycles,
        },
    })
}
