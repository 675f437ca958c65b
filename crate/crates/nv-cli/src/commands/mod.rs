//! Subcommand implementations. Each takes already-parsed arguments, does its
//! work through the library crates, and reports through files plus stdout.

pub mod fit_rabi;
pub mod map_rf;
pub mod saturation;
pub mod simulate_populations;
pub mod simulate_rabi;

use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Print a report to stdout and drop a companion copy next to the output
/// file as `<output stem>.<kind>.json`. Keys are emitted in sorted order, so
/// reports are byte-stable run to run.
pub(crate) fn emit_report(
    output: &Path,
    kind: &str,
    report: &serde_json::Value,
) -> Result<PathBuf, CliError> {
    let text = format!("{report:#}\n");
    print!("{text}");
    let path = output.with_extension(format!("{kind}.json"));
    std::fs::write(&path, &text)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
