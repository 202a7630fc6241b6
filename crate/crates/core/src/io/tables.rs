use super::{cell, csv_reader, fmt_f64};
use crate::dfm::{DualFrequencyMatrix, MatrixKind};
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::significance::{PairTest, ThresholdResult};
use crate::tapers::TaperSet;

/// `f1_hz,f2_hz,coh,p,rejected` for every tested pair.
pub fn threshold_csv(result: &ThresholdResult) -> String {
    let grid = &result.thresholded.grid;
    let mut out = String::from("f1_hz,f2_hz,coh,p,rejected\n");
    for t in &result.tests {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(grid.hz(t.i)),
            fmt_f64(grid.hz(t.j)),
            fmt_f64(t.coherence),
            fmt_f64(t.pvalue),
            u8::from(t.rejected)
        ));
    }
    out
}

fn grid_index(grid: &FrequencyGrid, hz: f64) -> Option<usize> {
    let tol = 1e-9 * grid.sample_rate_hz();
    let f = grid.frequencies();
    let pos = f.partition_point(|&x| x * grid.sample_rate_hz() < hz - tol);
    (pos < f.len() && (grid.hz(pos) - hz).abs() <= tol).then_some(pos)
}

/// Rebuilds a [`ThresholdResult`] from [`threshold_csv`] output and the
/// thresholded matrix it was written with. Frequencies are matched to the
/// matrix grid; the cutoff is the largest rejected p-value.
pub fn parse_threshold_csv(text: &str, thresholded: DualFrequencyMatrix, source: &str) -> Result<ThresholdResult> {
    if thresholded.kind != MatrixKind::Thresholded {
        return Err(Error::parse(source, format!("expected a thresholded matrix, got {}", thresholded.kind.name())));
    }
    let grid = &thresholded.grid;
    let mut tests = Vec::new();
    for rec in csv_reader(text).into_records() {
        let rec = rec.map_err(|e| Error::parse(source, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.get(0) == Some("f1_hz") {
            continue;
        }
        if rec.len() != 5 {
            return Err(Error::parse(source, format!("line {line}: expected 5 columns, found {}", rec.len())));
        }
        let locate = |idx: usize, what: &str| -> Result<usize> {
            let hz: f64 = cell(&rec, idx, line, source, what)?;
            grid_index(grid, hz)
                .ok_or_else(|| Error::parse(source, format!("line {line}: {what} = {hz} is not on the matrix grid")))
        };
        let (i, j) = (locate(0, "f1_hz")?, locate(1, "f2_hz")?);
        let coherence: f64 = cell(&rec, 2, line, source, "coh")?;
        let pvalue: f64 = cell(&rec, 3, line, source, "p")?;
        let rejected = match rec.get(4) {
            Some("1") => true,
            Some("0") => false,
            other => {
                return Err(Error::parse(source, format!("line {line}: rejected must be 0 or 1, got {other:?}")))
            }
        };
        if !(0.0..=1.0).contains(&pvalue) || !(coherence >= 0.0) {
            return Err(Error::parse(source, format!("line {line}: coherence or p-value out of range")));
        }
        tests.push(PairTest { i, j, coherence, pvalue, rejected });
    }
    let num_rejected = tests.iter().filter(|t| t.rejected).count();
    let cutoff = tests.iter().filter(|t| t.rejected).map(|t| t.pvalue).fold(0.0, f64::max);
    Ok(ThresholdResult { thresholded, num_tested: tests.len(), num_rejected, tests, cutoff })
}

/// One column per taper, one row per sample.
pub fn tapers_csv(tapers: &TaperSet) -> String {
    let k = tapers.num_tapers();
    let header: Vec<String> = (0..k).map(|i| format!("taper_{i}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for t in 0..tapers.len() {
        let row: Vec<String> = (0..k).map(|i| fmt_f64(tapers.tapers()[[i, t]])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
