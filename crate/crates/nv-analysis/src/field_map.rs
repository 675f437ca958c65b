use rayon::prelude::*;

use crate::error::AnalysisError;
use crate::lsq;
use crate::spectrum::{b_field_from_rabi, fft_rabi_frequency};

/// A stack of contrast curves on a spatial grid: one Rabi curve per (x, y)
/// pixel, stored x-major (x, then y, then τ).
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastStack {
    /// Pixel x positions in µm, ascending.
    pub x_positions: Vec<f64>,
    /// Pixel y positions in µm, ascending.
    pub y_positions: Vec<f64>,
    /// RF durations in seconds, ascending.
    pub tau_values: Vec<f64>,
    /// Contrast values, length nx·ny·nτ; NaN marks a dead pixel sample.
    pub contrast: Vec<f64>,
}

impl ContrastStack {
    pub fn new(
        x_positions: Vec<f64>,
        y_positions: Vec<f64>,
        tau_values: Vec<f64>,
        contrast: Vec<f64>,
    ) -> Result<Self, AnalysisError> {
        let stack = ContrastStack {
            x_positions,
            y_positions,
            tau_values,
            contrast,
        };
        stack.validate()?;
        Ok(stack)
    }

    pub fn nx(&self) -> usize {
        self.x_positions.len()
    }

    pub fn ny(&self) -> usize {
        self.y_positions.len()
    }

    pub fn ntau(&self) -> usize {
        self.tau_values.len()
    }

    /// Contrast at pixel (ix, iy) for τ index `it`.
    pub fn at(&self, ix: usize, iy: usize, it: usize) -> f64 {
        self.contrast[(ix * self.ny() + iy) * self.ntau() + it]
    }

    /// The full contrast curve of one pixel.
    pub fn pixel_curve(&self, ix: usize, iy: usize) -> &[f64] {
        let ntau = self.ntau();
        let start = (ix * self.ny() + iy) * ntau;
        &self.contrast[start..start + ntau]
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.x_positions.is_empty() || self.y_positions.is_empty() || self.tau_values.is_empty()
        {
            return Err(AnalysisError::InvalidInput {
                reason: "stack dimensions must all be nonzero",
            });
        }
        if self.contrast.len() != self.nx() * self.ny() * self.ntau() {
            return Err(AnalysisError::InvalidInput {
                reason: "contrast length does not match nx·ny·nτ",
            });
        }
        if self.tau_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AnalysisError::InvalidInput {
                reason: "τ values must be strictly ascending",
            });
        }
        Ok(())
    }
}

/// Driving-field amplitude along the x axis. Entries are NaN where the
/// frequency could not be determined (dead rows, no spectral peak).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    /// Pixel x positions in µm.
    pub x_positions: Vec<f64>,
    /// Rabi frequency per x, in Hz; NaN = missing.
    pub nu_r: Vec<f64>,
    /// Field amplitude per x, in mT: √2·ν_R/γ elementwise; NaN = missing.
    pub b_r: Vec<f64>,
}

/// Inverse-distance fit of a field profile:
/// B(x) = a_W / (x + b_W − c_W).
#[derive(Debug, Clone, PartialEq)]
pub struct WireFit {
    /// Field-amplitude scale (mT·µm).
    pub a_w: f64,
    /// Offset radius in µm.
    pub b_w: f64,
    /// Fit origin in µm, fixed input (not fitted).
    pub c_w: f64,
    /// Root-mean-square of the fit residuals.
    pub residual_rms: f64,
}

/// Collapse a contrast stack into a field profile along x.
///
/// For each x, contrast is averaged over the `y_window` pixels centred on
/// `y_center` (NaN samples are excluded per τ), the Rabi frequency of the
/// averaged curve is estimated spectrally, and converted to a field value.
/// A window with more than 50% NaN samples, or any τ slot left without a
/// single valid sample, or a curve without a spectral peak produces a NaN
/// profile point instead of failing the whole map.
pub fn map_field_profile(
    stack: &ContrastStack,
    y_center: usize,
    y_window: usize,
) -> Result<FieldProfile, AnalysisError> {
    stack.validate()?;
    if y_window == 0 {
        return Err(AnalysisError::InvalidInput {
            reason: "y window must contain at least one pixel",
        });
    }
    // Window [y_center − w/2, y_center − w/2 + w) must lie inside the grid.
    let half = y_window / 2;
    if y_center < half || y_center - half + y_window > stack.ny() {
        return Err(AnalysisError::InvalidInput {
            reason: "y window extends outside the stack",
        });
    }
    let y0 = y_center - half;
    let ntau = stack.ntau();

    let per_x: Vec<(f64, f64)> = (0..stack.nx())
        .into_par_iter()
        .map(|ix| {
            let mut averaged = vec![0.0; ntau];
            let mut nan_total = 0usize;
            let mut usable = true;
            for (it, avg) in averaged.iter_mut().enumerate() {
                let mut sum = 0.0;
                let mut count = 0usize;
                for iy in y0..y0 + y_window {
                    let v = stack.at(ix, iy, it);
                    if v.is_nan() {
                        nan_total += 1;
                    } else {
                        sum += v;
                        count += 1;
                    }
                }
                if count == 0 {
                    usable = false;
                } else {
                    *avg = sum / count as f64;
                }
            }
            if 2 * nan_total > y_window * ntau {
                usable = false;
            }
            if !usable {
                return (f64::NAN, f64::NAN);
            }
            match fft_rabi_frequency(&stack.tau_values, &averaged) {
                Ok(nu) => (nu, b_field_from_rabi(nu)),
                Err(_) => (f64::NAN, f64::NAN),
            }
        })
        .collect();

    Ok(FieldProfile {
        x_positions: stack.x_positions.clone(),
        nu_r: per_x.iter().map(|&(nu, _)| nu).collect(),
        b_r: per_x.iter().map(|&(_, b)| b).collect(),
    })
}

/// Fit the inverse-distance law to a field profile with the origin `c_w`
/// held fixed (both in µm). NaN profile points are skipped.
///
/// The fitted curve must stay positive-definite over the data
/// (x + b_W − c_W > 0); a fit that collapses or runs away (a constant
/// profile pushes b_W → ∞) is reported as non-convergent.
pub fn fit_wire_decay(profile: &FieldProfile, c_w: f64) -> Result<WireFit, AnalysisError> {
    if profile.x_positions.len() != profile.b_r.len() {
        return Err(AnalysisError::InvalidInput {
            reason: "profile arrays differ in length",
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = profile
        .x_positions
        .iter()
        .zip(&profile.b_r)
        .filter(|(x, b)| x.is_finite() && b.is_finite())
        .map(|(&x, &b)| (x, b))
        .unzip();
    if xs.len() < 5 {
        return Err(AnalysisError::InvalidInput {
            reason: "need at least 5 valid profile points",
        });
    }

    let x_min = xs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let x_max = xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let span = (x_max - x_min).max(1.0);

    // Starting offsets keep x + b − c strictly positive over the data; the
    // amplitude start matches the first sample exactly.
    let starts: Vec<[f64; 2]> = [0.25, 0.5, 1.0]
        .iter()
        .map(|&frac| {
            let b0 = c_w - x_min + frac * span;
            let a0 = ys[0] * (xs[0] + b0 - c_w);
            [a0, b0]
        })
        .collect();

    let model = |x: f64, p: &[f64; 2]| {
        let denom = x + p[1] - c_w;
        let value = p[0] / denom;
        (value, [1.0 / denom, -p[0] / (denom * denom)])
    };

    let outcome = lsq::fit_multi_start(&xs, &ys, &starts, model);
    if !outcome.converged {
        return Err(AnalysisError::FitNonConvergence {
            iterations: outcome.iterations,
            best: outcome.params.to_vec(),
            residual_rms: outcome.residual_rms,
        });
    }
    let [a_w, b_w] = outcome.params;
    if xs.iter().any(|&x| x + b_w - c_w <= 0.0) {
        return Err(AnalysisError::InvalidFit {
            reason: "fitted curve has a pole inside the data range",
        });
    }
    Ok(WireFit {
        a_w,
        b_w,
        c_w,
        residual_rms: outcome.residual_rms,
    })
}
