use std::fs;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use super::{fmt_f64, source_name, write_file, Reader};
use crate::dfm::{DualFrequencyMatrix, MatrixKind};
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

/// Layout: magic, u32 `N_f`, u32 kind code, f64 sample rate, `N_f` f64
/// frequencies (cycles per sample), then `N_f²` row-major (re, im) pairs.
pub const DFM_MAGIC: &[u8; 8] = b"LVDFM001";

pub fn encode_dfm(m: &DualFrequencyMatrix) -> Vec<u8> {
    let n = m.len();
    let mut out = Vec::with_capacity(24 + 8 * n + 16 * n * n);
    out.extend_from_slice(DFM_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&m.kind.code().to_le_bytes());
    out.extend_from_slice(&m.grid.sample_rate_hz().to_le_bytes());
    for f in m.grid.frequencies() {
        out.extend_from_slice(&f.to_le_bytes());
    }
    for z in m.values.iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_dfm(bytes: &[u8], source: &str) -> Result<DualFrequencyMatrix> {
    let mut rd = Reader::new(bytes, source);
    if rd.take(8, "magic")? != DFM_MAGIC {
        return Err(Error::parse(source, "not a dual-frequency matrix file (bad magic)"));
    }
    let n = rd.u32("N_f")? as usize;
    let code = rd.u32("kind")?;
    let kind = MatrixKind::from_code(code).ok_or_else(|| Error::parse(source, format!("unknown matrix kind {code}")))?;
    let rate = rd.f64("sample rate")?;
    let expected = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_mul(16))
        .and_then(|b| b.checked_add(8 * n));
    if expected != Some(rd.remaining()) {
        return Err(Error::parse(
            source,
            format!("payload of {} bytes does not match N_f = {n}", rd.remaining()),
        ));
    }
    let mut freqs = Vec::with_capacity(n);
    for _ in 0..n {
        freqs.push(rd.f64("frequency")?);
    }
    let grid = FrequencyGrid::new(freqs, rate).map_err(|e| Error::parse(source, e.to_string()))?;
    let mut values = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re = rd.f64("value")?;
        let im = rd.f64("value")?;
        values.push(Complex64::new(re, im));
    }
    let values = Array2::from_shape_vec((n, n), values).map_err(|e| Error::parse(source, e.to_string()))?;
    DualFrequencyMatrix::new(values, grid, kind).map_err(|e| Error::parse(source, e.to_string()))
}

/// Upper triangle (diagonal included) as `f1_hz,f2_hz,re,im` rows.
pub fn write_dfm_csv(m: &DualFrequencyMatrix) -> String {
    let mut out = String::from("f1_hz,f2_hz,re,im\n");
    for i in 0..m.len() {
        for j in i..m.len() {
            let z = m.values[[i, j]];
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(m.grid.hz(i)),
                fmt_f64(m.grid.hz(j)),
                fmt_f64(z.re),
                fmt_f64(z.im)
            ));
        }
    }
    out
}

pub fn write_dfm(m: &DualFrequencyMatrix, path: &Path) -> Result<()> {
    write_file(path, encode_dfm(m))
}

pub fn read_dfm(path: &Path) -> Result<DualFrequencyMatrix> {
    let bytes = fs::read(path)?;
    decode_dfm(&bytes, &source_name(path))
}
