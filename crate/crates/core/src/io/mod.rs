//! File formats: trial matrices, dual-frequency matrices, result tables and
//! model specifications.
//!
//! Decoders take a `source_name` used in diagnostics and never panic on
//! malformed input. Floats are written in shortest round-trip form so that
//! re-running a stage reproduces files byte for byte.

mod matrix;
mod model_file;
mod tables;
mod trials;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use matrix::{decode_dfm, encode_dfm, read_dfm, write_dfm, write_dfm_csv, DFM_MAGIC};
pub use model_file::{load_model_spec, parse_model_spec};
pub use tables::{parse_threshold_csv, tapers_csv, threshold_csv};
pub use trials::{
    decode_trials_binary, encode_trials_binary, labels_csv, parse_labels_csv, parse_trials_csv, read_trials,
    trials_csv, write_trials, TRIAL_MAGIC,
};

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn source_name(path: &Path) -> String {
    path.display().to_string()
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

pub(crate) fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

pub(crate) fn cell<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, line: u64, source: &str, what: &str) -> Result<T> {
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::parse(source, format!("line {line}: missing {what}")))?;
    raw.parse()
        .map_err(|_| Error::parse(source, format!("line {line}, column {}: cannot parse {what} from {raw:?}", idx + 1)))
}

/// Little-endian cursor over a byte slice with bounds-checked reads.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    source: &'a str,
}

impl<'a> Reader<'a> {
    pub fn new(bytes: &'a [u8], source: &'a str) -> Self {
        Self { bytes, pos: 0, source }
    }

    pub fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            Error::parse(
                self.source,
                format!("truncated input: {what} needs {n} bytes at offset {}", self.pos),
            )
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    pub fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        Ok(f64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}
