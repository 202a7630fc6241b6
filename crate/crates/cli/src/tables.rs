//! Plain CSV tables written and read by the pipeline stages.

use std::path::Path;

use loeve_core::io::fmt_f64;
use loeve_core::FrequencyGrid;
use ndarray::Array2;

use crate::error::{CliError, Result};

/// `N_f × N_f` real matrix with frequencies in Hz along both edges; rows
/// are `f1`, columns `f2`.
pub fn matrix_csv(grid: &FrequencyGrid, values: &Array2<f64>) -> String {
    let n = grid.len();
    let mut out = String::from("f1_hz\\f2_hz");
    for j in 0..n {
        out.push(',');
        out.push_str(&fmt_f64(grid.hz(j)));
    }
    out.push('\n');
    for i in 0..n {
        out.push_str(&fmt_f64(grid.hz(i)));
        for j in 0..n {
            out.push(',');
            out.push_str(&fmt_f64(values[[i, j]]));
        }
        out.push('\n');
    }
    out
}

/// Integral values print without a fraction; everything else in shortest
/// round-trip form.
fn fmt_cell(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        fmt_f64(v)
    }
}

/// Header line plus rows of numbers.
pub fn numeric_csv(header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_cell(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Reads a table written by [`numeric_csv`]: returns the header and a
/// row-major matrix. Every row must have the header's width.
pub fn parse_numeric_csv(text: &str, path: &Path) -> Result<(Vec<String>, Array2<f64>)> {
    let err = |m: String| CliError::Core(loeve_core::Error::Parse { source_name: path.display().to_string(), message: m });
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| err("empty table".into()))?;
    let header: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for (no, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(err(format!("line {}: expected {} columns, found {}", no + 1, header.len(), cells.len())));
        }
        for c in cells {
            values.push(
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("line {}: cannot parse {c:?} as a number", no + 1)))?,
            );
        }
        rows += 1;
    }
    let m = Array2::from_shape_vec((rows, header.len()), values).map_err(|e| err(e.to_string()))?;
    Ok((header, m))
}
