use pulse_engine::RabiCurve;

use crate::error::AnalysisError;
use crate::lsq::{self, FitOutcome};
use crate::spectrum::{fft_rabi_frequency, half_spectrum, uniform_spacing};

/// Damped-cosine fit of a contrast curve:
/// C(τ) = a_R · (1 − e^{−τ/b_R} · cos(c_R·τ + d_R)).
#[derive(Debug, Clone, PartialEq)]
pub struct RabiFit {
    /// Contrast amplitude (dimensionless), ≥ 0.
    pub a_r: f64,
    /// Decay time in seconds, > 0.
    pub b_r: f64,
    /// Angular frequency in rad·s⁻¹, ≥ 0.
    pub c_r: f64,
    /// Phase in rad, wrapped to (−π, π].
    pub d_r: f64,
    /// Root-mean-square of the fit residuals.
    pub residual_rms: f64,
    /// Parameter covariance (order a, b, c, d) from the linearized problem.
    pub covariance: [[f64; 4]; 4],
}

fn model(tau: f64, p: &[f64; 4]) -> (f64, [f64; 4]) {
    let [a, b, c, d] = *p;
    let e = (-tau / b).exp();
    let (sin, cos) = (c * tau + d).sin_cos();
    let value = a * (1.0 - e * cos);
    let grad = [
        1.0 - e * cos,
        -a * cos * e * tau / (b * b),
        a * e * sin * tau,
        a * e * sin,
    ];
    (value, grad)
}

fn wrap_phase(d: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = d.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Map an arbitrary parameter vector onto the canonical branch using the
/// exact model symmetry cos(−cτ − d) = cos(cτ + d), then wrap the phase.
fn canonicalize(mut p: [f64; 4]) -> [f64; 4] {
    if p[2] < 0.0 {
        p[2] = -p[2];
        p[3] = -p[3];
    }
    p[3] = wrap_phase(p[3]);
    p
}

fn outcome_to_fit(outcome: &FitOutcome<4>) -> Result<RabiFit, AnalysisError> {
    if !outcome.converged {
        return Err(AnalysisError::FitNonConvergence {
            iterations: outcome.iterations,
            best: outcome.params.to_vec(),
            residual_rms: outcome.residual_rms,
        });
    }
    let p = canonicalize(outcome.params);
    if p[0] < 0.0 {
        return Err(AnalysisError::InvalidFit {
            reason: "negative amplitude",
        });
    }
    if !(p[1] > 0.0) {
        return Err(AnalysisError::InvalidFit {
            reason: "non-positive decay time",
        });
    }
    Ok(RabiFit {
        a_r: p[0],
        b_r: p[1],
        c_r: p[2],
        d_r: p[3],
        residual_rms: outcome.residual_rms,
        covariance: outcome.covariance,
    })
}

/// Fit the damped-cosine model to raw (τ, contrast) arrays.
///
/// With no guess, starting values are derived from the data: amplitude from
/// the mean, frequency from the FFT peak, decay from the sweep span, and
/// phase from inverting the model at the first sample. The phase inversion
/// has a sign ambiguity and the decay guess is crude, so the solver is
/// restarted over a small deterministic grid of (decay, phase) variants and
/// the best converged result wins. A constant curve has no FFT peak and is
/// rejected rather than fitted.
///
/// With a caller-supplied guess exactly one start is used, making the
/// result a deterministic function of data and guess alone.
pub fn fit_rabi_points(
    taus: &[f64],
    contrasts: &[f64],
    initial_guess: Option<[f64; 4]>,
) -> Result<RabiFit, AnalysisError> {
    if taus.len() != contrasts.len() {
        return Err(AnalysisError::InvalidInput {
            reason: "τ and contrast arrays differ in length",
        });
    }
    if taus.len() < 8 {
        return Err(AnalysisError::InvalidInput {
            reason: "need at least 8 samples to fit four parameters",
        });
    }
    if taus.iter().chain(contrasts).any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidInput {
            reason: "τ and contrast values must be finite",
        });
    }
    let span = taus[taus.len() - 1] - taus[0];
    if !(span > 0.0) {
        return Err(AnalysisError::InvalidInput {
            reason: "τ values must be ascending",
        });
    }

    let starts: Vec<[f64; 4]> = match initial_guess {
        Some(guess) => vec![guess],
        None => {
            let a0 = contrasts.iter().sum::<f64>() / contrasts.len() as f64;
            if a0 == 0.0 {
                return Err(AnalysisError::NoSpectralPeak);
            }
            let c0 = 2.0 * std::f64::consts::PI * fft_rabi_frequency(taus, contrasts)?;
            if c0 * span < 2.0 * std::f64::consts::PI {
                return Err(AnalysisError::InvalidInput {
                    reason: "samples span less than one oscillation period",
                });
            }
            let b0 = span / 2.0;
            // Invert C(τ₀) = a(1 − e^{−τ₀/b}cos(cτ₀ + d)) for d; cos is
            // even, so ±d0 both explain the first sample.
            let v = ((1.0 - contrasts[0] / a0) * (taus[0] / b0).exp()).clamp(-1.0, 1.0);
            let d0 = wrap_phase(v.acos() - c0 * taus[0]);
            let mut grid = Vec::with_capacity(9);
            for b in [b0, span / 8.0, span * 2.0] {
                for d in [d0, -d0, 0.0] {
                    grid.push([a0, b, c0, d]);
                }
            }
            grid
        }
    };

    let outcome = lsq::fit_multi_start(taus, contrasts, &starts, model);
    outcome_to_fit(&outcome)
}

/// Fit the damped-cosine model to a simulated sweep.
pub fn fit_rabi(curve: &RabiCurve, initial_guess: Option<[f64; 4]>) -> Result<RabiFit, AnalysisError> {
    fit_rabi_points(&curve.tau_values, &curve.contrast_values, initial_guess)
}

/// Second-harmonic residual: how much structure the damped-cosine model
/// leaves behind at twice the oscillation frequency.
///
/// The fit residuals are transformed and the RMS of their component in the
/// band [1.5, 2.5]·(c_R/2π) is returned, normalized by the fit amplitude.
/// A perfectly symmetric oscillation scores ~0; a waveform whose minima are
/// reshaped relative to its maxima leaves second-harmonic energy the model
/// cannot absorb, so larger values mean a more asymmetric oscillation.
pub fn second_harmonic_residual(
    taus: &[f64],
    contrasts: &[f64],
    fit: &RabiFit,
) -> Result<f64, AnalysisError> {
    if taus.len() != contrasts.len() {
        return Err(AnalysisError::InvalidInput {
            reason: "τ and contrast arrays differ in length",
        });
    }
    if fit.a_r <= 0.0 {
        return Err(AnalysisError::InvalidInput {
            reason: "fit amplitude must be positive to normalize residuals",
        });
    }
    let dt = uniform_spacing(taus)?;
    let n = taus.len();

    let p = [fit.a_r, fit.b_r, fit.c_r, fit.d_r];
    let residuals: Vec<f64> = taus
        .iter()
        .zip(contrasts)
        .map(|(&tau, &c)| c - model(tau, &p).0)
        .collect();

    let mags = half_spectrum(&residuals);
    let nu_fit = fit.c_r / (2.0 * std::f64::consts::PI);
    let (lo, hi) = (1.5 * nu_fit, 2.5 * nu_fit);
    let bin_hz = 1.0 / (n as f64 * dt);

    let mut band_power = 0.0;
    let mut band_bins = 0usize;
    for (k, mag) in mags.iter().enumerate().skip(1) {
        let f = k as f64 * bin_hz;
        if f >= lo && f <= hi {
            // One-sided spectrum: bins below Nyquist represent themselves
            // and their mirror image.
            let sides = if n % 2 == 0 && k == n / 2 { 1.0 } else { 2.0 };
            band_power += sides * mag * mag;
            band_bins += 1;
        }
    }
    if band_bins == 0 {
        return Err(AnalysisError::InvalidInput {
            reason: "second-harmonic band contains no spectral bins",
        });
    }
    Ok(band_power.sqrt() / n as f64 / fit.a_r)
}
