//! The contrast-stack interchange format: a small self-describing binary
//! container for camera contrast data C(x, y, τ).
//!
//! Layout — eight ASCII header lines, then the raw payload:
//!
//! ```text
//! NVSTACK1
//! nx <pixels along x>
//! ny <pixels along y>
//! ntau <RF-duration samples>
//! um_per_px <pixel pitch in µm>
//! tau_start_s <first RF duration in s>
//! tau_step_s <RF-duration step in s>
//! byte_order <LE | BE>
//! <nx·ny·ntau IEEE-754 binary32 values>
//! ```
//!
//! The payload is ordered x-major: all τ for (x0, y0), then (x0, y1), …
//! advancing y before x. The canonical byte order is little-endian; the
//! header field exists so files produced on big-endian hardware remain
//! readable, and both reader and writer honor it. Payload length must be
//! exactly 4·nx·ny·ntau bytes.

use std::path::Path;

use nv_analysis::ContrastStack;

use crate::error::CliError;

pub const MAGIC: &[u8; 8] = b"NVSTACK1";
const HEADER_LINES: usize = 8;

/// Parsed header of a stack file.
#[derive(Debug, Clone, PartialEq)]
pub struct StackHeader {
    pub nx: usize,
    pub ny: usize,
    pub ntau: usize,
    pub um_per_px: f64,
    pub tau_start_s: f64,
    pub tau_step_s: f64,
    pub big_endian: bool,
}

impl StackHeader {
    pub fn payload_values(&self) -> usize {
        self.nx * self.ny * self.ntau
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (key, value) in [("nx", self.nx), ("ny", self.ny), ("ntau", self.ntau)] {
            if value == 0 {
                return Err(CliError::input(format!(
                    "stack header: {key} must be positive, found 0"
                )));
            }
        }
        for (key, value) in [
            ("um_per_px", self.um_per_px),
            ("tau_step_s", self.tau_step_s),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(CliError::input(format!(
                    "stack header: {key} = {value} must be finite and positive"
                )));
            }
        }
        if !self.tau_start_s.is_finite() || self.tau_start_s < 0.0 {
            return Err(CliError::input(format!(
                "stack header: tau_start_s = {} must be finite and non-negative",
                self.tau_start_s
            )));
        }
        Ok(())
    }

    /// Pixel-centre x coordinates in µm.
    pub fn x_positions(&self) -> Vec<f64> {
        (0..self.nx).map(|i| i as f64 * self.um_per_px).collect()
    }

    /// Pixel-centre y coordinates in µm.
    pub fn y_positions(&self) -> Vec<f64> {
        (0..self.ny).map(|i| i as f64 * self.um_per_px).collect()
    }

    /// The RF-duration grid in s.
    pub fn tau_values(&self) -> Vec<f64> {
        (0..self.ntau)
            .map(|i| self.tau_start_s + i as f64 * self.tau_step_s)
            .collect()
    }
}

/// Serialize a stack. The payload is written in the byte order the header
/// declares (the canonical choice being little-endian).
pub fn write_stack(path: &Path, header: &StackHeader, payload: &[f32]) -> Result<(), CliError> {
    header.validate()?;
    if payload.len() != header.payload_values() {
        return Err(CliError::input(format!(
            "payload has {} values, header declares {}",
            payload.len(),
            header.payload_values()
        )));
    }
    let mut bytes = Vec::with_capacity(128 + 4 * payload.len());
    bytes.extend_from_slice(MAGIC);
    bytes.push(b'\n');
    let order = if header.big_endian { "BE" } else { "LE" };
    bytes.extend_from_slice(
        format!(
            "nx {}\nny {}\nntau {}\num_per_px {:e}\ntau_start_s {:e}\ntau_step_s {:e}\nbyte_order {}\n",
            header.nx, header.ny, header.ntau, header.um_per_px, header.tau_start_s,
            header.tau_step_s, order
        )
        .as_bytes(),
    );
    for &value in payload {
        let raw = if header.big_endian {
            value.to_be_bytes()
        } else {
            value.to_le_bytes()
        };
        bytes.extend_from_slice(&raw);
    }
    std::fs::write(path, bytes)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Deserialize a stack, honoring the declared byte order and checking the
/// payload length to the byte.
pub fn read_stack(path: &Path) -> Result<(StackHeader, Vec<f32>), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_stack(&bytes)
}

/// Parse stack bytes. Split out from the file reader so malformed-input
/// handling is testable without touching the filesystem.
pub fn parse_stack(bytes: &[u8]) -> Result<(StackHeader, Vec<f32>), CliError> {
    // The magic check reports the first offending byte so a user staring at
    // a hex dump knows exactly where the file stops being a stack file.
    for (offset, &expected) in MAGIC.iter().chain(std::iter::once(&b'\n')).enumerate() {
        match bytes.get(offset) {
            Some(&found) if found == expected => {}
            Some(&found) => {
                return Err(CliError::input(format!(
                    "malformed header magic: first bad byte at offset {offset} \
                     (expected 0x{expected:02x}, found 0x{found:02x})"
                )));
            }
            None => {
                return Err(CliError::input(format!(
                    "malformed header magic: file ends at offset {offset}, \
                     expected header line '{}'",
                    String::from_utf8_lossy(MAGIC)
                )));
            }
        }
    }

    // Remaining seven header lines.
    let mut cursor = MAGIC.len() + 1;
    let mut fields = Vec::with_capacity(HEADER_LINES - 1);
    for _ in 1..HEADER_LINES {
        let rest = &bytes[cursor..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| CliError::input("stack header truncated before its 8 lines".to_string()))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| CliError::input("stack header is not valid UTF-8".to_string()))?;
        fields.push(line.to_string());
        cursor += end + 1;
    }

    let mut take = |expected_key: &str| -> Result<String, CliError> {
        let line = fields.remove(0);
        match line.split_once(' ') {
            Some((key, value)) if key == expected_key => Ok(value.to_string()),
            _ => Err(CliError::input(format!(
                "stack header: expected '{expected_key} <value>', found '{line}'"
            ))),
        }
    };
    let parse_usize = |key: &str, v: String| -> Result<usize, CliError> {
        v.parse()
            .map_err(|_| CliError::input(format!("stack header: {key} '{v}' is not a non-negative integer")))
    };
    let parse_f64 = |key: &str, v: String| -> Result<f64, CliError> {
        v.parse()
            .map_err(|_| CliError::input(format!("stack header: {key} '{v}' is not a number")))
    };

    let nx = parse_usize("nx", take("nx")?)?;
    let ny = parse_usize("ny", take("ny")?)?;
    let ntau = parse_usize("ntau", take("ntau")?)?;
    let um_per_px = parse_f64("um_per_px", take("um_per_px")?)?;
    let tau_start_s = parse_f64("tau_start_s", take("tau_start_s")?)?;
    let tau_step_s = parse_f64("tau_step_s", take("tau_step_s")?)?;
    let order = take("byte_order")?;
    let big_endian = match order.as_str() {
        "LE" => false,
        "BE" => true,
        other => {
            return Err(CliError::input(format!(
                "stack header: byte_order must be LE or BE, found '{other}'"
            )))
        }
    };

    let header = StackHeader {
        nx,
        ny,
        ntau,
        um_per_px,
        tau_start_s,
        tau_step_s,
        big_endian,
    };
    header.validate()?;

    let payload_bytes = &bytes[cursor..];
    let expected = 4 * header.payload_values();
    if payload_bytes.len() != expected {
        return Err(CliError::input(format!(
            "payload length mismatch: expected {expected} bytes for \
             {}x{}x{} values, found {}",
            header.nx,
            header.ny,
            header.ntau,
            payload_bytes.len()
        )));
    }

    let payload = payload_bytes
        .chunks_exact(4)
        .map(|c| {
            let raw = [c[0], c[1], c[2], c[3]];
            if header.big_endian {
                f32::from_be_bytes(raw)
            } else {
                f32::from_le_bytes(raw)
            }
        })
        .collect();
    Ok((header, payload))
}

/// View a parsed stack as the analysis-layer type, widening the payload to
/// f64 and materializing the coordinate grids the header describes.
pub fn to_contrast_stack(header: &StackHeader, payload: &[f32]) -> ContrastStack {
    ContrastStack {
        x_positions: header.x_positions(),
        y_positions: header.y_positions(),
        tau_values: header.tau_values(),
        contrast: payload.iter().map(|&v| v as f64).collect(),
    }
}
