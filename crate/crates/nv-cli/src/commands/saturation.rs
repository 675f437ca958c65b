//! `saturation`: stationary excited-state population versus pump rate, the
//! saturation-law fit, and the derived optical scales.

use std::path::Path;

use nv_analysis::{
    fit_saturation, saturation_intensity, saturation_parameter, saturation_power,
    saturation_scan,
};

use crate::config::RunConfig;
use crate::csv_io;
use crate::error::CliError;

pub const COLUMNS: [&str; 2] = ["w_p_per_s", "n_e"];

/// Scan-range and reporting options. Unset range fields default to
/// [0.01, 10]× the configured saturation pump rate, which brackets the knee
/// well enough for an unambiguous fit.
#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    pub w_min: Option<f64>,
    pub w_max: Option<f64>,
    pub points: Option<usize>,
    /// Gaussian beam waist used to convert intensity to power, µm.
    pub w0_um: f64,
    /// Laser powers (mW) to report saturation parameters for.
    pub powers_mw: Vec<f64>,
}

pub fn run(config_path: &Path, output: &Path, opts: &ScanOptions) -> Result<(), CliError> {
    let cfg = RunConfig::load(config_path)?;
    cfg.write_effective_beside(output)?;

    let w_min = opts.w_min.unwrap_or(0.01 * cfg.constants.w_p_sat);
    let w_max = opts.w_max.unwrap_or(10.0 * cfg.constants.w_p_sat);
    let points = opts.points.unwrap_or(25);
    if !w_min.is_finite() || w_min <= 0.0 {
        return Err(CliError::input(format!(
            "--w-min = {w_min} must be positive (the scan grid is log-spaced)"
        )));
    }
    if !w_max.is_finite() || w_max <= w_min {
        return Err(CliError::input(format!(
            "--w-max = {w_max} must exceed --w-min = {w_min}"
        )));
    }
    if points < 3 {
        return Err(CliError::input(format!(
            "--points = {points}: need at least 3 scan points to fit two parameters"
        )));
    }
    if !opts.w0_um.is_finite() || opts.w0_um <= 0.0 {
        return Err(CliError::input(format!(
            "--w0-um = {} must be positive",
            opts.w0_um
        )));
    }

    let ratio = w_max / w_min;
    let grid: Vec<f64> = (0..points)
        .map(|i| w_min * ratio.powf(i as f64 / (points - 1) as f64))
        .collect();

    let scan = saturation_scan(&cfg.rates, &grid)?;
    csv_io::write_csv(output, &COLUMNS, scan.iter().map(|&(w, ne)| [w, ne]))?;

    let f = fit_saturation(&scan)?;
    let i_sat = saturation_intensity(f.w_p_sat, &cfg.constants);
    let p_sat = saturation_power(i_sat, opts.w0_um * 1e-6);

    let powers = if opts.powers_mw.is_empty() {
        vec![75.0, 150.0, 250.0]
    } else {
        opts.powers_mw.clone()
    };
    let s_values: Vec<serde_json::Value> = powers
        .iter()
        .map(|&p_mw| {
            serde_json::json!({
                "power_mw": p_mw,
                "s": saturation_parameter(p_mw * 1e-3, p_sat),
            })
        })
        .collect();

    let report = serde_json::json!({
        "a_p": f.a_p,
        "w_p_sat_per_s": f.w_p_sat,
        "i_sat_w_per_m2": i_sat,
        "i_sat_mw_per_um2": i_sat * 1e-9,
        "p_sat_w": p_sat,
        "w0_um": opts.w0_um,
        "residual_rms": f.residual_rms,
        "saturation_parameters": s_values,
    });
    super::emit_report(output, "saturation", &report)?;
    Ok(())
}
