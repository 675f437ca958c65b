use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::AnalysisError;

/// Minimum number of samples for a meaningful spectral estimate.
const MIN_SAMPLES: usize = 16;
/// Allowed relative deviation of any τ increment from the mean increment.
const SPACING_TOL: f64 = 1e-3;

/// Check that `taus` is uniformly spaced and return the mean increment.
pub(crate) fn uniform_spacing(taus: &[f64]) -> Result<f64, AnalysisError> {
    if taus.len() < 2 {
        return Err(AnalysisError::InvalidInput {
            reason: "need at least two samples to define a spacing",
        });
    }
    let span = taus[taus.len() - 1] - taus[0];
    let dt = span / (taus.len() - 1) as f64;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(AnalysisError::InvalidInput {
            reason: "τ values must be finite and ascending",
        });
    }
    for (index, pair) in taus.windows(2).enumerate() {
        let deviation = ((pair[1] - pair[0]) - dt).abs() / dt;
        if deviation > SPACING_TOL {
            return Err(AnalysisError::NonUniformSpacing {
                index: index + 1,
                deviation,
            });
        }
    }
    Ok(dt)
}

/// Magnitude spectrum (bins 0..=n/2) of the mean-subtracted signal.
pub(crate) fn half_spectrum(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..=n / 2].iter().map(|c| c.norm()).collect()
}

/// Dominant oscillation frequency of a uniformly sampled curve, in Hz.
///
/// The signal is mean-subtracted (removing DC), transformed, and the
/// largest-magnitude bin below Nyquist is refined by fitting a parabola
/// through it and its two neighbours. A signal with no energy outside DC —
/// a constant, up to rounding — is reported as having no spectral peak
/// rather than returning bin noise.
pub fn fft_rabi_frequency(taus: &[f64], values: &[f64]) -> Result<f64, AnalysisError> {
    if taus.len() != values.len() {
        return Err(AnalysisError::InvalidInput {
            reason: "τ and value arrays differ in length",
        });
    }
    if taus.len() < MIN_SAMPLES {
        return Err(AnalysisError::InvalidInput {
            reason: "need at least 16 samples for a spectral estimate",
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidInput {
            reason: "values must be finite",
        });
    }
    let dt = uniform_spacing(taus)?;

    let n = values.len();
    let mags = half_spectrum(values);

    // Peak over non-DC bins.
    let peak = (1..mags.len())
        .max_by(|&i, &j| mags[i].total_cmp(&mags[j]))
        .expect("at least one non-DC bin");

    // A pure-rounding spectrum: the largest bin is indistinguishable from
    // the numerical noise floor of the mean subtraction.
    let scale = values.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    if mags[peak] <= n as f64 * 1e-12 * scale {
        return Err(AnalysisError::NoSpectralPeak);
    }

    // Parabolic refinement of the peak position; falls back to the raw bin
    // at the spectrum edges or on a flat top.
    let delta = if peak + 1 < mags.len() {
        let (a, b, c) = (mags[peak - 1], mags[peak], mags[peak + 1]);
        let denom = a - 2.0 * b + c;
        if denom == 0.0 {
            0.0
        } else {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        }
    } else {
        0.0
    };

    Ok((peak as f64 + delta) / (n as f64 * dt))
}

/// Driving-field amplitude, in mT, for a Rabi frequency in Hz.
///
/// For a linearly polarized field resonant with one transition, the field
/// amplitude is √2·ν/γ with γ = 28 MHz·mT⁻¹ the gyromagnetic ratio. Exactly
/// linear in ν.
pub fn b_field_from_rabi(nu_hz: f64) -> f64 {
    let gamma_hz_per_mt = nv_model::PhysicalConstants::default().gamma_gyro;
    std::f64::consts::SQRT_2 * nu_hz / gamma_hz_per_mt
}
