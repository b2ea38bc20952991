//! Trajectory CSV rendering and parsing.
//!
//! Layout: header `t,u,y,x1,x2`, LF line endings, one row per sample.
//! Values use Rust's shortest round-trippable decimal formatting, so
//! parsing a written file recovers the exact in-memory doubles.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fracss::statespace::SimulationResult;

use crate::CliError;

const HEADER: &str = "t,u,y,x1,x2";

/// Renders a trajectory as CSV text.
pub fn render(result: &SimulationResult) -> String {
    let rows = result.t.len();
    let mut out = String::with_capacity(16 + rows * 48);
    out.push_str(HEADER);
    out.push('\n');
    for k in 0..rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            result.t[k], result.u[k], result.y[k], result.x1[k], result.x2[k]
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Columns parsed back from a trajectory CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

/// Reads a trajectory CSV written by [`render`].
pub fn read(path: &Path) -> Result<Table, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(HEADER) => {}
        Some(other) => {
            return Err(CliError::Config(format!(
                "{}: expected header `{HEADER}`, got `{other}`",
                path.display()
            )))
        }
        None => {
            return Err(CliError::Config(format!("{}: empty file", path.display())));
        }
    }
    let mut table = Table::default();
    for (idx, row) in lines.enumerate() {
        let line = idx + 2;
        if row.is_empty() {
            continue;
        }
        let mut fields = [0.0f64; 5];
        let mut parts = row.split(',');
        for (i, slot) in fields.iter_mut().enumerate() {
            let part = parts.next().ok_or_else(|| {
                CliError::Config(format!(
                    "{} line {line}: expected 5 comma-separated values, got {i}",
                    path.display()
                ))
            })?;
            *slot = part.parse().map_err(|_| {
                CliError::Config(format!(
                    "{} line {line}: `{part}` is not a number",
                    path.display()
                ))
            })?;
        }
        if parts.next().is_some() {
            return Err(CliError::Config(format!(
                "{} line {line}: more than 5 comma-separated values",
                path.display()
            )));
        }
        table.t.push(fields[0]);
        table.u.push(fields[1]);
        table.y.push(fields[2]);
        table.x1.push(fields[3]);
        table.x2.push(fields[4]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_result() -> SimulationResult {
        SimulationResult {
            step: 0.1,
            t: vec![0.0, 0.1, 0.2],
            u: vec![1.0, 1.0, 1.0],
            y: vec![0.0, 0.1234567890123456789, -3.5e-17],
            x1: vec![0.0, 0.1234567890123456789, -3.5e-17],
            x2: vec![0.0, f64::MIN_POSITIVE, 1.0 / 3.0],
            memory_bytes_peak: 160,
        }
    }

    #[test]
    fn renders_header_rows_and_lf_endings() {
        let text = render(&sample_result());
        assert!(text.starts_with("t,u,y,x1,x2\n"));
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn round_trips_exact_doubles() {
        let result = sample_result();
        let dir = std::env::temp_dir().join("fracss-csv-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("round_trip.csv");
        fs::write(&path, render(&result)).unwrap();
        let table = read(&path).unwrap();
        assert_eq!(table.t, result.t);
        assert_eq!(table.u, result.u);
        assert_eq!(table.y, result.y);
        assert_eq!(table.x1, result.x1);
        assert_eq!(table.x2, result.x2);
        fs::remove_file(&path).ok();
    }

    #[test]
    fn rejects_malformed_input() {
        let dir = std::env::temp_dir().join("fracss-csv-test");
        fs::create_dir_all(&dir).unwrap();
        let bad_header = dir.join("bad_header.csv");
        fs::write(&bad_header, "time,u,y,x1,x2\n0,0,0,0,0\n").unwrap();
        assert!(matches!(read(&bad_header), Err(CliError::Config(_))));
        let bad_field = dir.join("bad_field.csv");
        fs::write(&bad_field, "t,u,y,x1,x2\n0,0,zero,0,0\n").unwrap();
        assert!(matches!(read(&bad_field), Err(CliError::Config(_))));
        let short_row = dir.join("short_row.csv");
        fs::write(&short_row, "t,u,y,x1,x2\n0,0,0\n").unwrap();
        assert!(matches!(read(&short_row), Err(CliError::Config(_))));
        let missing = dir.join("does_not_exist.csv");
        assert!(matches!(read(&missing), Err(CliError::Io(_))));
        fs::remove_file(&bad_header).ok();
        fs::remove_file(&bad_field).ok();
        fs::remove_file(&short_row).ok();
    }
}
