//! `fit-rabi`: damped-cosine fit of an existing contrast curve CSV.

use std::path::Path;

use crate::csv_io;
use crate::error::CliError;

/// Fit the curve in `input` (columns `tau_s, contrast`). `guess` supplies
/// explicit starting parameters (a, b, c, d): all four or none.
pub fn run(input: &Path, guess: [Option<f64>; 4]) -> Result<(), CliError> {
    let initial = match guess {
        [Some(a), Some(b), Some(c), Some(d)] => Some([a, b, c, d]),
        [None, None, None, None] => None,
        _ => {
            return Err(CliError::input(
                "starting parameters are all-or-nothing: give every one of \
                 --guess-a/--guess-b-s/--guess-c/--guess-d, or none",
            ))
        }
    };

    let rows = csv_io::read_csv(input, &crate::commands::simulate_rabi::COLUMNS)?;
    let taus: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let contrasts: Vec<f64> = rows.iter().map(|r| r[1]).collect();

    let f = nv_analysis::fit_rabi_points(&taus, &contrasts, initial)?;
    let report = serde_json::json!({
        "a_r": f.a_r,
        "b_r_s": f.b_r,
        "c_r_rad_per_s": f.c_r,
        "d_r_rad": f.d_r,
        "residual_rms": f.residual_rms,
    });
    println!("{report:#}");
    Ok(())
}
