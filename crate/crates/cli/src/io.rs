//! Trajectory files.
//!
//! Both formats store one pose per line as `timestamp tx ty tz qx qy qz qw`,
//! whitespace-separated for `tum` and comma-separated for `csv`. A `csv`
//! file may instead carry only `timestamp,tx,ty,tz`. Quaternions describe
//! the camera orientation in the world (camera-to-world), so they are
//! inverted on load into the world-to-camera rotations used for evaluation.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use trajkit::{Rotation, Trajectory, Vec3};

use crate::error::CliError;

/// Allowed deviation of a quaternion's norm from 1 before it is rejected.
pub const QUATERNION_NORM_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Tum,
    Csv,
}

impl Format {
    /// `csv` for a `.csv` extension, `tum` otherwise.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Tum,
        }
    }

    fn split(self, line: &str) -> Vec<&str> {
        match self {
            Format::Tum => line.split_whitespace().collect(),
            Format::Csv => line.split(',').map(str::trim).collect(),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Tum => "tum",
            Format::Csv => "csv",
        })
    }
}

/// Parse failure at a 1-based line number.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

fn quaternion(line: usize, qx: f64, qy: f64, qz: f64, qw: f64) -> Result<Rotation, ParseError> {
    let norm = (qx * qx + qy * qy + qz * qz + qw * qw).sqrt();
    if !((norm - 1.0).abs() <= QUATERNION_NORM_TOLERANCE) {
        return Err(ParseError { line, message: format!("quaternion norm {norm} is not unit") });
    }
    let camera_to_world = Rotation::from_wxyz(qw, qx, qy, qz).expect("norm checked");
    Ok(camera_to_world.inverse())
}

/// Parses trajectory text. Blank lines and lines starting with `#` are
/// skipped; in `csv`, a first line whose leading field is not a number is
/// taken as a header.
pub fn parse_trajectory(text: &str, format: Format) -> Result<Trajectory, ParseError> {
    let mut timestamps = Vec::new();
    let mut positions = Vec::new();
    let mut rotations = Vec::new();
    let mut width = None;
    let mut seen_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = format.split(line);
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f64::from_str(f)).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if format == Format::Csv && !seen_data && f64::from_str(fields[0]).is_err() => {
                seen_data = true;
                continue;
            }
            Err(_) => {
                return Err(ParseError { line: line_no, message: format!("malformed line '{line}'") });
            }
        };
        seen_data = true;
        let allowed: &[usize] = match format {
            Format::Tum => &[8],
            Format::Csv => &[4, 8],
        };
        if !allowed.contains(&values.len()) {
            return Err(ParseError {
                line: line_no,
                message: format!("expected {} fields, found {}", allowed.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" or "), values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ParseError { line: line_no, message: "non-finite value".into() });
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(ParseError { line: line_no, message: format!("expected {w} fields like the first record, found {}", values.len()) });
            }
            _ => {}
        }
        if let Some(&prev) = timestamps.last() {
            if !(values[0] > prev) {
                return Err(ParseError { line: line_no, message: format!("timestamp {} does not increase", values[0]) });
            }
        }
        timestamps.push(values[0]);
        positions.push(Vec3::new(values[1], values[2], values[3]));
        if values.len() == 8 {
            rotations.push(quaternion(line_no, values[4], values[5], values[6], values[7])?);
        }
    }
    if positions.is_empty() {
        return Err(ParseError { line: 0, message: "empty trajectory".into() });
    }
    let rotations = (width == Some(8)).then_some(rotations);
    Ok(Trajectory { timestamps: Some(timestamps), positions, rotations })
}

pub fn load_trajectory(path: &Path, format: Format) -> Result<Trajectory, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_trajectory(&text, format).map_err(|e| CliError::Parse { path: path.to_path_buf(), error: e })
}

/// Writes a trajectory in `format`. Values use the shortest representation
/// that reads back to the same `f64`. A trajectory without timestamps is
/// written with its indices as timestamps.
pub fn write_trajectory<W: Write>(t: &Trajectory, format: Format, mut out: W) -> std::io::Result<()> {
    let sep = match format {
        Format::Tum => " ",
        Format::Csv => ",",
    };
    if format == Format::Tum && t.rotations.is_none() {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidInput, "tum files need rotations"));
    }
    for i in 0..t.len() {
        let stamp = t.timestamps.as_ref().map_or(i as f64, |ts| ts[i]);
        let p = t.positions[i];
        let mut fields = vec![stamp, p.x, p.y, p.z];
        if let Some(rotations) = &t.rotations {
            let [w, x, y, z] = rotations[i].inverse().wxyz();
            fields.extend([x, y, z, w]);
        }
        let line: Vec<String> = fields.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(sep))?;
    }
    Ok(())
}

pub fn save_trajectory(t: &Trajectory, path: &Path, format: Format) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let mut buf = Vec::new();
    write_trajectory(t, format, &mut buf).map_err(io_err)?;
    fs::write(path, buf).map_err(io_err)
}
