use nv_model::{integrate_with, steady_state, DriveParams, PhysicalConstants, SystemState, TransitionRates};

use crate::error::AnalysisError;
use crate::lsq;

/// Saturation-law fit of the stationary excited-state population:
/// n_E(W_p) = a_p · W_p / (W_p + W_p^Sat).
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationFit {
    /// Proportionality constant (the n_E asymptote at full saturation).
    pub a_p: f64,
    /// Saturation pump rate in s⁻¹, > 0.
    pub w_p_sat: f64,
    /// Root-mean-square of the fit residuals.
    pub residual_rms: f64,
}

/// |correlation| of the two Jacobian columns above which the scan cannot
/// separate amplitude from saturation rate. A scan confined to the linear
/// regime sits at ≈ 0.9997; one spanning [0.01, 10]·W_p^Sat at ≈ 0.83.
const COLLINEARITY_LIMIT: f64 = 0.999;

/// Integrator step used by the simulated timescale measurements.
const TIME_STEP: f64 = 1e-9;
/// Horizon beyond which a threshold search gives up.
const HORIZON: f64 = 100e-6;

/// Stationary excited-state population for each pump rate in `w_p_list`.
///
/// Each point solves the stationary rate equations directly (no time
/// integration). W_p = 0 gives the thermal ground state, hence n_E = 0.
pub fn saturation_scan(
    rates: &TransitionRates,
    w_p_list: &[f64],
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if w_p_list.is_empty() {
        return Err(AnalysisError::InvalidInput {
            reason: "pump-rate list is empty",
        });
    }
    w_p_list
        .iter()
        .map(|&w_p| {
            let drive = DriveParams {
                w_p,
                omega_r: 0.0,
                gamma_2: 0.0,
            };
            let state = steady_state(rates, &drive)?;
            Ok((w_p, state.excited_population()))
        })
        .collect()
}

/// Fit the saturation law to a (W_p, n_E) scan.
///
/// A scan that never leaves the linear regime (all W_p ≪ W_p^Sat) makes
/// amplitude and saturation rate collinear; that case is detected from the
/// Jacobian correlation at the solution and reported as ill-conditioned
/// rather than returning an arbitrary parameter split.
pub fn fit_saturation(scan: &[(f64, f64)]) -> Result<SaturationFit, AnalysisError> {
    if scan.len() < 3 {
        return Err(AnalysisError::InvalidInput {
            reason: "need at least 3 scan points",
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = scan.iter().copied().unzip();
    if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidInput {
            reason: "scan values must be finite",
        });
    }
    let ne_max = ys.iter().fold(0.0_f64, |a, &b| a.max(b));
    if ne_max <= 0.0 {
        return Err(AnalysisError::InvalidInput {
            reason: "scan has no nonzero excited-state population",
        });
    }
    // Half-saturation estimate: the first pump rate whose n_E reaches half
    // the largest observed value.
    let w_half = xs
        .iter()
        .zip(&ys)
        .find(|(_, &ne)| ne >= 0.5 * ne_max)
        .map(|(&w, _)| w)
        .unwrap_or(xs[xs.len() - 1])
        .max(f64::MIN_POSITIVE);

    let starts: Vec<[f64; 2]> = [0.3, 1.0, 3.0]
        .iter()
        .map(|&k| [1.1 * ne_max, k * w_half])
        .collect();

    let model = |w: f64, p: &[f64; 2]| {
        let denom = w + p[1];
        let value = p[0] * w / denom;
        (value, [w / denom, -p[0] * w / (denom * denom)])
    };

    let outcome = lsq::fit_multi_start(&xs, &ys, &starts, model);
    if !outcome.converged {
        return Err(AnalysisError::FitNonConvergence {
            iterations: outcome.iterations,
            best: outcome.params.to_vec(),
            residual_rms: outcome.residual_rms,
        });
    }
    if outcome.jacobian_correlation[0][1].abs() > COLLINEARITY_LIMIT {
        return Err(AnalysisError::IllConditioned {
            reason: "scan does not constrain the saturation rate (linear regime)",
        });
    }
    let [a_p, w_p_sat] = outcome.params;
    if !(w_p_sat > 0.0) || !w_p_sat.is_finite() {
        return Err(AnalysisError::InvalidFit {
            reason: "non-positive saturation rate",
        });
    }
    Ok(SaturationFit {
        a_p,
        w_p_sat,
        residual_rms: outcome.residual_rms,
    })
}

/// Saturation intensity in W·m⁻²: the optical intensity at which the pump
/// rate equals `w_p_sat`, i.e. W_p^Sat · (photon energy) / absorption
/// cross-section: I^Sat = W_p^Sat·h·c/(σ·λ).
pub fn saturation_intensity(w_p_sat: f64, constants: &PhysicalConstants) -> f64 {
    w_p_sat * constants.planck_h * constants.light_c / (constants.sigma * constants.lambda)
}

/// Saturation power in W for a Gaussian beam of 1/e² radius `w0` (m):
/// P^Sat = (π·w0²/2)·I^Sat.
pub fn saturation_power(i_sat: f64, w0: f64) -> f64 {
    std::f64::consts::PI * w0 * w0 / 2.0 * i_sat
}

/// Saturation parameter s = P/P^Sat.
pub fn saturation_parameter(p: f64, p_sat: f64) -> f64 {
    p / p_sat
}

/// Integrate from `start` under `drive`, watching `metric`, and return the
/// linearly interpolated time of the first crossing of `target` (downward
/// when `downward`, upward otherwise) within [`HORIZON`].
fn first_crossing_time(
    start: &SystemState,
    rates: &TransitionRates,
    drive: &DriveParams,
    target: f64,
    downward: bool,
    metric: impl Fn(&SystemState) -> f64,
) -> Result<Option<f64>, AnalysisError> {
    let mut crossing: Option<f64> = None;
    let mut prev: Option<(f64, f64)> = None;
    integrate_with(*start, rates, drive, HORIZON, TIME_STEP, |t, s| {
        if crossing.is_some() {
            return;
        }
        let m = metric(s);
        let crossed = if downward { m <= target } else { m >= target };
        if crossed {
            crossing = Some(match prev {
                // Interpolate inside the step that crossed the threshold.
                Some((t0, m0)) if m0 != m => t0 + (target - m0) / (m - m0) * (t - t0),
                _ => t,
            });
        }
        prev = Some((t, m));
    })?;
    Ok(crossing)
}

/// 1/e depletion time of the metastable level after the laser switches off,
/// starting from the pumped stationary state at saturation parameter
/// `s_param`.
///
/// The metastable population decays as a single exponential with rate
/// k71 + k72 + k73 regardless of how it was prepared, so the result is a
/// property of the rates alone; the pump level only sets the initial value.
pub fn depletion_time_at(rates: &TransitionRates, s_param: f64) -> Result<f64, AnalysisError> {
    if !(s_param > 0.0) || !s_param.is_finite() {
        return Err(AnalysisError::InvalidInput {
            reason: "saturation parameter must be positive",
        });
    }
    let constants = PhysicalConstants::default();
    let pump = DriveParams {
        w_p: constants.pump_rate(s_param),
        omega_r: 0.0,
        gamma_2: 0.0,
    };
    let pumped = steady_state(rates, &pump)?;
    let n7_initial = pumped.populations[6];
    if n7_initial <= 0.0 {
        return Err(AnalysisError::InvalidInput {
            reason: "no metastable population to deplete",
        });
    }

    let dark = DriveParams {
        w_p: 0.0,
        omega_r: 0.0,
        gamma_2: 0.0,
    };
    let target = n7_initial / std::f64::consts::E;
    first_crossing_time(&pumped, rates, &dark, target, true, |s| s.populations[6])?.ok_or(
        AnalysisError::ThresholdNotReached {
            threshold: target,
            horizon: HORIZON,
        },
    )
}

/// [`depletion_time_at`] at the reference pump level s = 0.1.
pub fn depletion_time(rates: &TransitionRates) -> Result<f64, AnalysisError> {
    depletion_time_at(rates, 0.1)
}

/// Time for the ground-state polarization n1/(n1+n2+n3) to first reach
/// `threshold` × its stationary value under continuous pumping at
/// saturation parameter `s_param`, starting from thermal equilibrium.
pub fn polarization_time(
    rates: &TransitionRates,
    s_param: f64,
    threshold: f64,
) -> Result<f64, AnalysisError> {
    if !(s_param > 0.0) || !s_param.is_finite() {
        return Err(AnalysisError::InvalidInput {
            reason: "saturation parameter must be positive",
        });
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(AnalysisError::InvalidInput {
            reason: "threshold must lie in (0, 1]",
        });
    }
    let constants = PhysicalConstants::default();
    let drive = DriveParams {
        w_p: constants.pump_rate(s_param),
        omega_r: 0.0,
        gamma_2: constants.gamma_c(s_param),
    };
    let asymptote = steady_state(rates, &drive)?.ground_polarization();
    let target = threshold * asymptote;

    let thermal = SystemState::thermal();
    first_crossing_time(&thermal, rates, &drive, target, false, |s| {
        s.ground_polarization()
    })?
    .ok_or(AnalysisError::ThresholdNotReached {
        threshold: target,
        horizon: HORIZON,
    })
}
