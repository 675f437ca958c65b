//! The CSV dialect used by every command: UTF-8, LF line endings, comma
//! separator, '.' decimal point, mandatory header row, and floats written in
//! scientific notation with shortest-round-trip precision so that
//! write-then-read returns bit-identical values.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::CliError;

/// Format one float the way every output file does. `{:e}` emits the fewest
/// digits that parse back to the identical bits (NaN and infinities keep
/// their textual names).
pub fn format_value(value: f64) -> String {
    format!("{value:e}")
}

/// Write a header row plus one row per item. Each row must have exactly one
/// value per header column.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let file = File::create(path)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", header.join(",")).map_err(CliError::from)?;
    for row in rows {
        let row = row.as_ref();
        debug_assert_eq!(row.len(), header.len());
        let mut line = String::with_capacity(row.len() * 24);
        for (i, value) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format_value(*value));
        }
        writeln!(out, "{line}").map_err(CliError::from)?;
    }
    out.flush().map_err(CliError::from)?;
    Ok(())
}

/// Read a CSV whose header must match `expected_header` exactly. Returns the
/// data rows (possibly none). Lines are tolerant of a trailing CR so files
/// that passed through Windows tooling still load; everything else is
/// strict.
pub fn read_csv(path: &Path, expected_header: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));

    let header = lines
        .next()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| CliError::input(format!("{}: empty CSV, missing header row", path.display())))?;
    let expected = expected_header.join(",");
    if header != expected {
        return Err(CliError::input(format!(
            "{}: expected header '{expected}', found '{header}'",
            path.display()
        )));
    }

    let mut rows = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_header.len() {
            return Err(CliError::input(format!(
                "{}: line {} has {} fields, expected {}",
                path.display(),
                line_no + 2,
                fields.len(),
                expected_header.len()
            )));
        }
        let mut row = Vec::with_capacity(fields.len());
        for field in fields {
            let value: f64 = field.trim().parse().map_err(|_| {
                CliError::input(format!(
                    "{}: line {}: '{field}' is not a number",
                    path.display(),
                    line_no + 2
                ))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}
