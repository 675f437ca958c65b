//! `simulate-rabi`: contrast versus RF duration over the configured τ grid,
//! optionally followed by the damped-cosine fit.

use std::path::Path;

use pulse_engine::simulate_rabi_sweep;

use crate::config::RunConfig;
use crate::csv_io;
use crate::error::CliError;

pub const COLUMNS: [&str; 2] = ["tau_s", "contrast"];

pub fn run(config_path: &Path, output: &Path, fit: bool) -> Result<(), CliError> {
    let cfg = RunConfig::load(config_path)?;
    cfg.write_effective_beside(output)?;

    let taus = cfg.tau_values();
    let curve = simulate_rabi_sweep(
        &cfg.sequence(),
        &cfg.rates,
        &taus,
        cfg.dt_s,
        cfg.tol,
        cfg.max_cycles,
    )?;

    let rows = curve
        .tau_values
        .iter()
        .zip(&curve.contrast_values)
        .map(|(&tau, &c)| [tau, c]);
    csv_io::write_csv(output, &COLUMNS, rows)?;

    if fit {
        let f = nv_analysis::fit_rabi(&curve, None)?;
        let report = serde_json::json!({
            "a_r": f.a_r,
            "b_r_s": f.b_r,
            "c_r_rad_per_s": f.c_r,
            "d_r_rad": f.d_r,
            "residual_rms": f.residual_rms,
        });
        super::emit_report(output, "fit", &report)?;
    }
    Ok(())
}
