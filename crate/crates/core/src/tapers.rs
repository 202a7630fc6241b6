//! Discrete prolate spheroidal sequences.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::tridiag::SymTridiagonal;

/// Orthonormal Slepian tapers, one per row.
#[derive(Debug, Clone)]
pub struct TaperSet {
    tapers: Array2<f64>,
    eigenvalues: Vec<f64>,
    time_bandwidth: f64,
}

impl TaperSet {
    pub fn tapers(&self) -> &Array2<f64> {
        &self.tapers
    }

    pub fn taper(&self, k: usize) -> ArrayView1<'_, f64> {
        self.tapers.row(k)
    }

    /// Concentration of each taper in `(-NW/T, NW/T)`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn time_bandwidth(&self) -> f64 {
        self.time_bandwidth
    }

    pub fn num_tapers(&self) -> usize {
        self.tapers.nrows()
    }

    pub fn len(&self) -> usize {
        self.tapers.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Full bias bandwidth `2NW/T` in cycles per sample.
    pub fn bandwidth(&self) -> f64 {
        2.0 * self.time_bandwidth / self.len() as f64
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let gram = self.tapers.dot(&self.tapers.t());
        let mut worst = 0.0f64;
        for ((i, j), v) in gram.indexed_iter() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
        worst
    }
}

/// Warning text when `K` exceeds the well-concentrated count `⌊2NW⌋ − 1`.
pub fn taper_count_warning(time_bandwidth: f64, num_tapers: usize) -> Option<String> {
    let shannon = (2.0 * time_bandwidth).floor() as usize;
    (num_tapers + 1 > shannon).then(|| {
        format!(
            "{num_tapers} tapers with NW = {time_bandwidth} exceeds 2NW - 1 = {}; the last tapers leak outside the band",
            shannon.saturating_sub(1)
        )
    })
}

/// The `num_tapers` leading DPSS of length `len` for half-bandwidth `NW/T`.
pub fn dpss(len: usize, time_bandwidth: f64, num_tapers: usize) -> Result<TaperSet> {
    if len == 0 {
        return Err(Error::validation("taper length must be positive"));
    }
    if !(time_bandwidth > 0.0 && time_bandwidth < len as f64 / 2.0) {
        return Err(Error::validation(format!(
            "time-bandwidth product {time_bandwidth} must lie in (0, {})",
            len as f64 / 2.0
        )));
    }
    if num_tapers == 0 || num_tapers > len {
        return Err(Error::validation(format!(
            "taper count {num_tapers} must lie in [1, {len}]"
        )));
    }
    let shannon = (2.0 * time_bandwidth).floor() as usize;
    if num_tapers > shannon {
        return Err(Error::validation(format!(
            "taper count {num_tapers} exceeds floor(2NW) = {shannon}"
        )));
    }
    if let Some(w) = taper_count_warning(time_bandwidth, num_tapers) {
        log::warn!("{w}");
    }

    let w = time_bandwidth / len as f64;
    let matrix = dpss_matrix(len, w);
    let (_, vectors) = matrix.largest(num_tapers)?;
    let mut tapers = Array2::zeros((num_tapers, len));
    let mut eigenvalues = Vec::with_capacity(num_tapers);
    for (k, mut v) in vectors.into_iter().enumerate() {
        fix_sign(&mut v);
        eigenvalues.push(concentration(&v, w));
        tapers.row_mut(k).assign(&ArrayView1::from(&v[..]));
    }
    Ok(TaperSet { tapers, eigenvalues, time_bandwidth })
}

/// Tridiagonal matrix commuting with the time- and band-limiting operator.
pub(crate) fn dpss_matrix(len: usize, w: f64) -> SymTridiagonal {
    let n = len as f64;
    let cos = (2.0 * PI * w).cos();
    let diag = (0..len)
        .map(|i| {
            let x = (n - 1.0 - 2.0 * i as f64) / 2.0;
            x * x * cos
        })
        .collect();
    let off = (1..len).map(|i| i as f64 * (n - i as f64) / 2.0).collect();
    SymTridiagonal { diag, off }
}

// First element above 1e-6 of the peak magnitude is made positive.
fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-6 * peak) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// `Σ_t Σ_s h_t h_s sin(2πW(t−s)) / (π(t−s))`.
pub(crate) fn concentration(h: &[f64], w: f64) -> f64 {
    let n = h.len();
    let mut total = 2.0 * w * h.iter().map(|x| x * x).sum::<f64>();
    for lag in 1..n {
        let r: f64 = h[..n - lag].iter().zip(&h[lag..]).map(|(a, b)| a * b).sum();
        let l = lag as f64;
        total += 2.0 * r * (2.0 * PI * w * l).sin() / (PI * l);
    }
    total
}
