use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::{cell, csv_reader, fmt_f64, source_name, write_file, Reader};
use crate::error::{Error, Result};
use crate::model::TrialMatrix;

pub const TRIAL_MAGIC: &[u8; 8] = b"LVTRIAL1";
const HEADER_LEN: usize = 24;

/// CSV form: the first row holds `sample_rate_hz,R,T`, then one row of `T`
/// values per replicate.
pub fn trials_csv(trials: &TrialMatrix) -> String {
    let (r, t) = trials.data.dim();
    let mut out = format!("{},{r},{t}\n", fmt_f64(trials.sample_rate_hz));
    for row in trials.data.rows() {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses the CSV form. A leading row of column names
/// (`sample_rate_hz,R,T`) is accepted and skipped.
pub fn parse_trials_csv(text: &str, source: &str) -> Result<TrialMatrix> {
    let mut records = csv_reader(text).into_records();
    let mut next = || -> Result<Option<(csv::StringRecord, u64)>> {
        match records.next() {
            None => Ok(None),
            Some(Err(e)) => Err(Error::parse(source, e.to_string())),
            Some(Ok(rec)) => {
                let line = rec.position().map_or(0, |p| p.line());
                Ok(Some((rec, line)))
            }
        }
    };
    let (mut header, mut line) = next()?.ok_or_else(|| Error::parse(source, "empty file"))?;
    if header.get(0).is_some_and(|c| c.eq_ignore_ascii_case("sample_rate_hz")) {
        (header, line) = next()?.ok_or_else(|| Error::parse(source, "missing header values"))?;
    }
    if header.len() != 3 {
        return Err(Error::parse(source, format!("line {line}: header must be sample_rate_hz,R,T")));
    }
    let rate: f64 = cell(&header, 0, line, source, "sample_rate_hz")?;
    let r: usize = cell(&header, 1, line, source, "R")?;
    let t: usize = cell(&header, 2, line, source, "T")?;
    let total = r
        .checked_mul(t)
        .filter(|&n| n <= text.len())
        .ok_or_else(|| Error::parse(source, format!("line {line}: R x T = {r} x {t} is larger than the file")))?;
    let mut values = Vec::with_capacity(total);
    for row in 0..r {
        let (rec, line) = next()?
            .ok_or_else(|| Error::parse(source, format!("expected {r} data rows, found {row}")))?;
        if rec.len() != t {
            return Err(Error::parse(source, format!("line {line}: expected {t} values, found {}", rec.len())));
        }
        for c in 0..t {
            values.push(cell::<f64>(&rec, c, line, source, "sample")?);
        }
    }
    if let Some((_, line)) = next()? {
        return Err(Error::parse(source, format!("line {line}: more than {r} data rows")));
    }
    let data = Array2::from_shape_vec((r, t), values).map_err(|e| Error::parse(source, e.to_string()))?;
    TrialMatrix::new(data, rate).map_err(|e| Error::parse(source, e.to_string()))
}

pub fn encode_trials_binary(trials: &TrialMatrix) -> Vec<u8> {
    let (r, t) = trials.data.dim();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * r * t);
    out.extend_from_slice(TRIAL_MAGIC);
    out.extend_from_slice(&(r as u32).to_le_bytes());
    out.extend_from_slice(&(t as u32).to_le_bytes());
    out.extend_from_slice(&trials.sample_rate_hz.to_le_bytes());
    for v in trials.data.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_trials_binary(bytes: &[u8], source: &str) -> Result<TrialMatrix> {
    let mut rd = Reader::new(bytes, source);
    if rd.take(8, "magic")? != TRIAL_MAGIC {
        return Err(Error::parse(source, "not a trial file (bad magic)"));
    }
    let r = rd.u32("R")? as usize;
    let t = rd.u32("T")? as usize;
    let rate = rd.f64("sample rate")?;
    let expected = r.checked_mul(t).and_then(|n| n.checked_mul(8));
    if expected != Some(rd.remaining()) {
        return Err(Error::parse(
            source,
            format!("payload of {} bytes does not match R = {r}, T = {t}", rd.remaining()),
        ));
    }
    let mut values = Vec::with_capacity(r * t);
    for _ in 0..r * t {
        values.push(rd.f64("sample")?);
    }
    let data = Array2::from_shape_vec((r, t), values).map_err(|e| Error::parse(source, e.to_string()))?;
    TrialMatrix::new(data, rate).map_err(|e| Error::parse(source, e.to_string()))
}

/// `trial,state` rows.
pub fn labels_csv(labels: &[usize]) -> String {
    let mut out = String::from("trial,state\n");
    for (r, l) in labels.iter().enumerate() {
        out.push_str(&format!("{r},{l}\n"));
    }
    out
}

pub fn parse_labels_csv(text: &str, source: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for rec in csv_reader(text).into_records() {
        let rec = rec.map_err(|e| Error::parse(source, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.get(0) == Some("trial") {
            continue;
        }
        let trial: usize = cell(&rec, 0, line, source, "trial")?;
        if trial != out.len() {
            return Err(Error::parse(source, format!("line {line}: trials must be listed in order")));
        }
        out.push(cell(&rec, 1, line, source, "state")?);
    }
    Ok(out)
}

/// Writes the binary form to `path` and the CSV form next to it.
pub fn write_trials(trials: &TrialMatrix, binary_path: &Path) -> Result<()> {
    write_file(binary_path, encode_trials_binary(trials))?;
    write_file(&binary_path.with_extension("csv"), trials_csv(trials))
}

/// Reads a trial matrix, choosing the format from the magic bytes.
pub fn read_trials(path: &Path) -> Result<TrialMatrix> {
    let bytes = fs::read(path)?;
    let name = source_name(path);
    if bytes.starts_with(TRIAL_MAGIC) {
        decode_trials_binary(&bytes, &name)
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::parse(&name, "file is neither binary trials nor UTF-8 CSV"))?;
        parse_trials_csv(text, &name)
    }
}
