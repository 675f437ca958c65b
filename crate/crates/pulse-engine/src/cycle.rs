use nv_model::{integrate_with, SystemState, Trace, TransitionRates};

use crate::error::EngineError;
use crate::sequence::PulseSequence;

/// Populations this small in magnitude at a phase boundary are integrator
/// noise, not physics; they get clamped to zero between phases.
const BOUNDARY_CLAMP: f64 = 1e-9;

/// What [`iterate_to_steady_cycle`] should record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// No sampled states; fastest.
    Off,
    /// Keep the sampled states of the converged (final) cycle, with times
    /// relative to that cycle's start.
    LastCycle,
    /// Keep every cycle's samples concatenated on an absolute time axis.
    AllCycles,
}

/// Outcome of a single laser → wait → RF cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    /// State at the end of the RF phase.
    pub final_state: SystemState,
    /// Photoluminescence integrated over the laser phase (trapezoidal rule
    /// on the excited-state population at every integrator step).
    pub integrated_pl: f64,
    /// State right after the laser pulse ends.
    pub post_laser_state: SystemState,
    /// State right after the wait, i.e. just before the RF pulse.
    pub post_wait_state: SystemState,
    /// Sampled states, when requested.
    pub trace: Option<Trace>,
}

/// A converged cycle along with how the iteration got there.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyCycle {
    /// The last cycle run — the one whose start and end states agree with
    /// the previous cycle to tolerance.
    pub result: CycleResult,
    /// Number of cycles executed, including the converged one.
    pub cycles: usize,
    /// Max-norm difference between the final states of the last two cycles.
    pub residual: f64,
}

fn run_cycle_impl(
    start: &SystemState,
    seq: &PulseSequence,
    rates: &TransitionRates,
    dt: f64,
    want_trace: bool,
) -> Result<CycleResult, EngineError> {
    seq.validate()?;
    let mut trace = if want_trace { Some(Trace::new()) } else { None };
    let mut pl = 0.0;

    // Laser phase: pump, and integrate PL(t) ∝ n_E(t) with the trapezoidal
    // rule over the observer samples (one per integrator step).
    let mut state = {
        let mut trace = trace.as_mut();
        let mut prev: Option<(f64, f64)> = None;
        integrate_with(
            *start,
            rates,
            &seq.laser_phase,
            seq.laser_duration,
            dt,
            |t, s| {
                let ne = s.excited_population();
                if let Some((t0, ne0)) = prev {
                    pl += 0.5 * (ne0 + ne) * (t - t0);
                }
                prev = Some((t, ne));
                if let Some(tr) = trace.as_deref_mut() {
                    tr.push(t, *s);
                }
            },
        )?
    };
    state.clamp_tiny_negatives(BOUNDARY_CLAMP);
    let post_laser_state = state;

    // Wait phase: dark relaxation. Skip the first sample when the trace
    // already ends at this time, so phase boundaries appear once.
    let offset = seq.laser_duration;
    state = {
        let mut trace = trace.as_mut();
        integrate_with(
            state,
            rates,
            &seq.wait_phase,
            seq.wait_duration,
            dt,
            |t, s| {
                if let Some(tr) = trace.as_deref_mut() {
                    if t > 0.0 || tr.is_empty() {
                        tr.push(offset + t, *s);
                    }
                }
            },
        )?
    };
    state.clamp_tiny_negatives(BOUNDARY_CLAMP);
    let post_wait_state = state;

    // RF phase: spin drive only.
    let offset = seq.laser_duration + seq.wait_duration;
    state = {
        let mut trace = trace.as_mut();
        integrate_with(
            state,
            rates,
            &seq.rf_phase,
            seq.rf_duration,
            dt,
            |t, s| {
                if let Some(tr) = trace.as_deref_mut() {
                    if t > 0.0 || tr.is_empty() {
                        tr.push(offset + t, *s);
                    }
                }
            },
        )?
    };
    state.clamp_tiny_negatives(BOUNDARY_CLAMP);

    Ok(CycleResult {
        final_state: state,
        integrated_pl: pl,
        post_laser_state,
        post_wait_state,
        trace,
    })
}

/// Run one measurement cycle from `start`.
///
/// Zero-length phases are skipped; a sequence with all durations zero
/// returns the input state and zero PL.
pub fn run_cycle(
    start: &SystemState,
    seq: &PulseSequence,
    rates: &TransitionRates,
    dt: f64,
) -> Result<CycleResult, EngineError> {
    run_cycle_impl(start, seq, rates, dt, false)
}

/// Like [`run_cycle`], but the result carries every sampled state of the
/// cycle (times relative to the cycle start).
pub fn run_cycle_traced(
    start: &SystemState,
    seq: &PulseSequence,
    rates: &TransitionRates,
    dt: f64,
) -> Result<CycleResult, EngineError> {
    run_cycle_impl(start, seq, rates, dt, true)
}

/// Repeat the cycle from thermal equilibrium until the cycle-final state
/// reproduces itself.
///
/// Convergence is the max-norm difference over all seven populations and
/// the coherence between the final states of two successive cycles dropping
/// below `tol`. The returned [`SteadyCycle`] holds the converged cycle's
/// result (so its `integrated_pl` is the steady-exposure PL) together with
/// the cycle count and the final residual. Exceeding `max_cycles` is an
/// error carrying the last residual.
pub fn iterate_to_steady_cycle(
    seq: &PulseSequence,
    rates: &TransitionRates,
    dt: f64,
    tol: f64,
    max_cycles: usize,
    trace_mode: TraceMode,
) -> Result<SteadyCycle, EngineError> {
    seq.validate()?;
    if !(tol > 0.0) {
        return Err(EngineError::InvalidIteration {
            field: "tol",
            value: tol,
        });
    }
    if max_cycles == 0 {
        return Err(EngineError::InvalidIteration {
            field: "max_cycles",
            value: 0.0,
        });
    }

    let want_trace = !matches!(trace_mode, TraceMode::Off);
    let cycle_len = seq.cycle_duration();
    let mut all_cycles_trace = matches!(trace_mode, TraceMode::AllCycles).then(Trace::new);

    let mut state = SystemState::thermal();
    let mut prev_final: Option<SystemState> = None;
    let mut residual = f64::INFINITY;

    for cycle in 1..=max_cycles {
        let mut result = run_cycle_impl(&state, seq, rates, dt, want_trace)?;
        state = result.final_state;

        if let (Some(master), Some(tr)) = (all_cycles_trace.as_mut(), result.trace.as_ref()) {
            let offset = (cycle - 1) as f64 * cycle_len;
            for (t, s) in tr.iter() {
                master.push(offset + t, *s);
            }
        }

        if let Some(prev) = prev_final {
            residual = state.max_abs_difference(&prev);
            if residual < tol {
                if let Some(master) = all_cycles_trace {
                    result.trace = Some(master);
                }
                return Ok(SteadyCycle {
                    result,
                    cycles: cycle,
                    residual,
                });
            }
        }
        prev_final = Some(state);
    }

    Err(EngineError::NoConvergence {
        cycles: max_cycles,
        residual,
    })
}

/// Contrast at a single RF duration.
///
/// Both the signal sequence and its RF-off reference are iterated to their
/// own steady cycles; contrast is (PL_ref − PL_sig) / PL_ref. The reference
/// keeps the full timing — its RF phase still lasts `rf_duration`, only the
/// drive amplitude is zero — so signal and reference see identical duty
/// cycles. A sequence whose RF drive is already off yields exactly 0.
pub fn contrast_at_tau(
    seq: &PulseSequence,
    rates: &TransitionRates,
    dt: f64,
    tol: f64,
    max_cycles: usize,
) -> Result<f64, EngineError> {
    let signal = iterate_to_steady_cycle(seq, rates, dt, tol, max_cycles, TraceMode::Off)?;
    let reference_seq = seq.reference();
    let reference =
        iterate_to_steady_cycle(&reference_seq, rates, dt, tol, max_cycles, TraceMode::Off)?;

    let pl_ref = reference.result.integrated_pl;
    if pl_ref == 0.0 {
        return Err(EngineError::ZeroReference);
    }
    Ok((pl_ref - signal.result.integrated_pl) / pl_ref)
}
