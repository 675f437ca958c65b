//! `map-rf`: collapse a contrast stack into a Rabi-frequency / field profile
//! along x, with an optional inverse-distance wire fit.

use std::path::Path;

use nv_analysis::{fit_wire_decay, map_field_profile, FieldProfile};

use crate::csv_io;
use crate::error::CliError;
use crate::stack_file;

pub const COLUMNS: [&str; 3] = ["x_um", "nu_R_Hz", "B_R_mT"];

/// Wire-fit options. `c_w_um` switches the fit on; the x-range bounds trim
/// the profile to the region where the inverse-distance law holds (e.g. to
/// one side of the wire).
#[derive(Debug, Clone, Default)]
pub struct WireOptions {
    pub c_w_um: Option<f64>,
    pub x_min_um: Option<f64>,
    pub x_max_um: Option<f64>,
}

pub fn run(
    stack_path: &Path,
    y_center: usize,
    window: usize,
    output: &Path,
    wire: &WireOptions,
) -> Result<(), CliError> {
    if wire.c_w_um.is_none() && (wire.x_min_um.is_some() || wire.x_max_um.is_some()) {
        return Err(CliError::input(
            "--x-min-um/--x-max-um restrict the wire fit; they need --c-w-um",
        ));
    }

    let (header, payload) = stack_file::read_stack(stack_path)?;
    let stack = stack_file::to_contrast_stack(&header, &payload);
    let profile = map_field_profile(&stack, y_center, window)?;

    let rows = profile
        .x_positions
        .iter()
        .zip(profile.nu_r.iter().zip(&profile.b_r))
        .map(|(&x, (&nu, &b))| [x, nu, b]);
    csv_io::write_csv(output, &COLUMNS, rows)?;

    if let Some(c_w) = wire.c_w_um {
        let lo = wire.x_min_um.unwrap_or(f64::NEG_INFINITY);
        let hi = wire.x_max_um.unwrap_or(f64::INFINITY);
        if lo >= hi {
            return Err(CliError::input(format!(
                "--x-min-um = {lo} must be below --x-max-um = {hi}"
            )));
        }
        let sub = restrict_profile(&profile, lo, hi);
        let wf = fit_wire_decay(&sub, c_w)?;
        let report = serde_json::json!({
            "a_w_mt_um": wf.a_w,
            "b_w_um": wf.b_w,
            "c_w_um": wf.c_w,
            "residual_rms": wf.residual_rms,
        });
        super::emit_report(output, "wirefit", &report)?;
    }
    Ok(())
}

fn restrict_profile(profile: &FieldProfile, lo: f64, hi: f64) -> FieldProfile {
    let mut out = FieldProfile {
        x_positions: Vec::new(),
        nu_r: Vec::new(),
        b_r: Vec::new(),
    };
    for ((&x, &nu), &b) in profile
        .x_positions
        .iter()
        .zip(&profile.nu_r)
        .zip(&profile.b_r)
    {
        if x >= lo && x <= hi {
            out.x_positions.push(x);
            out.nu_r.push(nu);
            out.b_r.push(b);
        }
    }
    out
}
