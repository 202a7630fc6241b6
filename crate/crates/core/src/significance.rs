//! Per-trial significance testing of coherency against the stationary null.

use num_complex::Complex64;
use rayon::prelude::*;
use ndarray::Array2;

use crate::dfm::{DualFrequencyMatrix, MatrixKind};
use crate::error::{Error, Result};
use crate::tapers::TaperSet;

/// Fewest tested pairs for which a threshold is reported.
pub const MIN_TESTED_PAIRS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TestConfig {
    pub fdr_rate_q: f64,
    pub band_hz: (f64, f64),
    pub num_tapers: usize,
    pub subsample_half: bool,
    /// Pairs with `|f₁ − f₂|` below this many cycles per sample are not
    /// tested; normally the taper bandwidth `2NW/T`.
    pub exclusion_bandwidth: f64,
}

impl TestConfig {
    /// Defaults: q = 0.05, band ±30 Hz, decimation on.
    pub fn new(num_tapers: usize, exclusion_bandwidth: f64) -> Self {
        Self {
            fdr_rate_q: 0.05,
            band_hz: (-30.0, 30.0),
            num_tapers,
            subsample_half: true,
            exclusion_bandwidth,
        }
    }

    pub fn for_tapers(tapers: &TaperSet) -> Self {
        Self::new(tapers.num_tapers(), tapers.bandwidth())
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if !(self.fdr_rate_q > 0.0 && self.fdr_rate_q < 1.0) {
            return Err(Error::validation(format!("FDR rate {} must lie in (0, 1)", self.fdr_rate_q)));
        }
        if self.num_tapers == 0 {
            return Err(Error::validation("taper count must be positive"));
        }
        let (lo, hi) = self.band_hz;
        let nyquist = sample_rate_hz / 2.0;
        if !(lo < hi && lo >= -nyquist && hi <= nyquist) {
            return Err(Error::validation(format!(
                "band [{lo}, {hi}] Hz must be increasing and within ±{nyquist} Hz"
            )));
        }
        if !(self.exclusion_bandwidth >= 0.0 && self.exclusion_bandwidth < 1.0) {
            return Err(Error::validation("exclusion bandwidth must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Null tail probability `P(½χ²₂ > K·coh_sq) = exp(−K·coh_sq)`.
pub fn pvalue_null(coh_sq: f64, num_tapers: usize) -> Result<f64> {
    if num_tapers == 0 {
        return Err(Error::validation("taper count must be positive"));
    }
    if !(0.0..=1.0 + 1e-9).contains(&coh_sq) {
        return Err(Error::validation(format!("squared coherence {coh_sq} outside [0, 1]")));
    }
    Ok((-(num_tapers as f64) * coh_sq).exp().clamp(0.0, 1.0))
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Strict upper-triangle pairs to test: inside the band, every second band
/// index on each axis when decimating, and at least the exclusion bandwidth
/// away from the diagonal. Excluded frequencies are skipped.
pub fn subsample_hermitian(matrix: &DualFrequencyMatrix, config: &TestConfig) -> Result<Vec<(usize, usize)>> {
    config.validate(matrix.grid.sample_rate_hz())?;
    let band = matrix.grid.band_indices(config.band_hz.0, config.band_hz.1);
    let axis: Vec<usize> = band
        .iter()
        .enumerate()
        .filter(|(pos, i)| (!config.subsample_half || pos % 2 == 0) && !matrix.excluded.contains(i))
        .map(|(_, &i)| i)
        .collect();
    let f = matrix.grid.frequencies();
    let mut pairs = Vec::new();
    for (a, &i) in axis.iter().enumerate() {
        for &j in &axis[a + 1..] {
            if circular_gap(f[i], f[j]) >= config.exclusion_bandwidth - 1e-12 {
                pairs.push((i, j));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::validation("no frequency pairs to test; widen the band"));
    }
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTest {
    pub i: usize,
    pub j: usize,
    /// Coherence modulus `|τ̂|`.
    pub coherence: f64,
    pub pvalue: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone)]
pub struct ThresholdResult {
    pub thresholded: DualFrequencyMatrix,
    /// Every tested pair in test order.
    pub tests: Vec<PairTest>,
    pub num_tested: usize,
    pub num_rejected: usize,
    /// Benjamini–Hochberg cutoff; rejected pairs have `p ≤ cutoff`.
    pub cutoff: f64,
}

/// Indices of the hypotheses rejected by the Benjamini–Hochberg step-up
/// procedure, and the p-value cutoff.
pub fn benjamini_hochberg(pvalues: &[f64], q: f64) -> (Vec<bool>, f64) {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]).then(a.cmp(&b)));
    let mut last = None;
    for (rank, &idx) in order.iter().enumerate() {
        if pvalues[idx] <= (rank + 1) as f64 * q / m as f64 {
            last = Some(rank);
        }
    }
    let mut rejected = vec![false; m];
    let cutoff = match last {
        Some(k) => {
            order[..=k].iter().for_each(|&idx| rejected[idx] = true);
            pvalues[order[k]]
        }
        None => 0.0,
    };
    (rejected, cutoff)
}

/// Tests the subsampled pairs, keeps significant entries and their mirrors,
/// zeroes every other off-diagonal entry and keeps the diagonal.
pub fn fdr_threshold(coherence: &DualFrequencyMatrix, config: &TestConfig) -> Result<ThresholdResult> {
    if !matches!(coherence.kind, MatrixKind::Coherency | MatrixKind::CoherenceSqrt) {
        return Err(Error::validation(format!(
            "thresholding needs coherency or coherence, got {}",
            coherence.kind.name()
        )));
    }
    let pairs = subsample_hermitian(coherence, config)?;
    if pairs.len() < MIN_TESTED_PAIRS {
        return Err(Error::validation(format!(
            "only {} pairs to test (need {MIN_TESTED_PAIRS}); widen the band or disable decimation",
            pairs.len()
        )));
    }
    let stats: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let rho = coherence.values[[i, j]].norm();
            pvalue_null((rho * rho).min(1.0), config.num_tapers).map(|p| (rho, p))
        })
        .collect::<Result<_>>()?;
    let pvalues: Vec<f64> = stats.iter().map(|s| s.1).collect();
    let (rejected, cutoff) = benjamini_hochberg(&pvalues, config.fdr_rate_q);

    let n = coherence.len();
    let mut values = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        values[[i, i]] = coherence.values[[i, i]];
    }
    let mut tests = Vec::with_capacity(pairs.len());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if rejected[k] {
            let v = coherence.values[[i, j]];
            values[[i, j]] = v;
            values[[j, i]] = v.conj();
        }
        tests.push(PairTest { i, j, coherence: stats[k].0, pvalue: stats[k].1, rejected: rejected[k] });
    }
    let mut thresholded = DualFrequencyMatrix::new(values, coherence.grid.clone(), MatrixKind::Thresholded)?;
    thresholded.combination = coherence.combination;
    let num_rejected = rejected.iter().filter(|r| **r).count();
    Ok(ThresholdResult { thresholded, num_tested: tests.len(), num_rejected, tests, cutoff })
}
