//! Multitaper estimation of the Loève spectrum and coherency.
//!
//! Tapered coefficients are unnormalized, `x_k(f) = Σ_t h_t X_t e^{-2πift}`;
//! with unit-energy tapers white noise of variance σ² has `E|x_k(f)|² = σ²`.

use std::f64::consts::PI;
use std::ops::AddAssign;
use std::sync::Arc;

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::dfm::{hermitian_from_upper, Combination, DualFrequencyMatrix, MatrixKind};
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, DEFAULT_MAX_FREQUENCIES};
use crate::model::TrialMatrix;
use crate::tapers::TaperSet;

/// Diagonal spectrum values below this mark a frequency as excluded.
pub const MIN_DIAGONAL: f64 = 1e-300;

struct LatticePlan {
    fft: Arc<dyn Fft<f64>>,
    n: usize,
    bins: Vec<usize>,
}

/// Tapers, grid and FFT plan bundled for repeated use across replicates.
pub struct MultitaperEstimator {
    tapers: TaperSet,
    grid: FrequencyGrid,
    plan: Option<LatticePlan>,
}

impl MultitaperEstimator {
    pub fn new(tapers: TaperSet, grid: FrequencyGrid) -> Result<Self> {
        Self::with_frequency_limit(tapers, grid, DEFAULT_MAX_FREQUENCIES)
    }

    pub fn with_frequency_limit(tapers: TaperSet, grid: FrequencyGrid, limit: usize) -> Result<Self> {
        grid.check_size(limit)?;
        let plan = grid.lattice().map(|lat| {
            let n = lat.n;
            let bins = lat.bins.iter().map(|&b| b.rem_euclid(n as i64) as usize).collect();
            LatticePlan { fft: FftPlanner::new().plan_fft_forward(n), n, bins }
        });
        Ok(Self { tapers, grid, plan })
    }

    pub fn tapers(&self) -> &TaperSet {
        &self.tapers
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    fn check_len(&self, trial: &[f64]) -> Result<()> {
        if trial.len() != self.tapers.len() {
            return Err(Error::validation(format!(
                "trial length {} does not match taper length {}",
                trial.len(),
                self.tapers.len()
            )));
        }
        Ok(())
    }

    /// `K × N_f` tapered coefficients, through the FFT when the grid lies on
    /// a lattice and by direct summation otherwise.
    pub fn coefficients(&self, trial: &[f64]) -> Result<Array2<Complex64>> {
        self.check_len(trial)?;
        let Some(plan) = &self.plan else {
            return Ok(direct_coefficients(trial, &self.tapers, &self.grid));
        };
        let k = self.tapers.num_tapers();
        let mut out = Array2::zeros((k, self.grid.len()));
        let mut buf = vec![Complex64::new(0.0, 0.0); plan.n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.fft.get_inplace_scratch_len()];
        for kk in 0..k {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            // Folding modulo n leaves the transform at multiples of 1/n unchanged.
            for (t, (h, x)) in self.tapers.taper(kk).iter().zip(trial).enumerate() {
                buf[t % plan.n].re += h * x;
            }
            plan.fft.process_with_scratch(&mut buf, &mut scratch);
            for (i, &b) in plan.bins.iter().enumerate() {
                out[[kk, i]] = buf[b];
            }
        }
        Ok(out)
    }

    /// Coefficients by direct summation regardless of the grid.
    pub fn coefficients_direct(&self, trial: &[f64]) -> Result<Array2<Complex64>> {
        self.check_len(trial)?;
        Ok(direct_coefficients(trial, &self.tapers, &self.grid))
    }

    pub fn spectrum(&self, trial: &[f64]) -> Result<DualFrequencyMatrix> {
        let coeffs = self.coefficients(trial)?;
        spectrum_from_coefficients(&coeffs, &self.grid)
    }

    pub fn coherency(&self, trial: &[f64]) -> Result<DualFrequencyMatrix> {
        coherency(&self.spectrum(trial)?)
    }

    /// Per-replicate multitaper spectra, computed in parallel.
    pub fn spectra(&self, trials: &TrialMatrix) -> Result<Vec<DualFrequencyMatrix>> {
        self.map_trials(trials, |trial| self.spectrum(trial))
    }

    /// Per-replicate coherency, each normalized by its own diagonal.
    pub fn coherencies(&self, trials: &TrialMatrix) -> Result<Vec<DualFrequencyMatrix>> {
        self.map_trials(trials, |trial| self.coherency(trial))
    }

    fn map_trials(
        &self,
        trials: &TrialMatrix,
        f: impl Fn(&[f64]) -> Result<DualFrequencyMatrix> + Sync,
    ) -> Result<Vec<DualFrequencyMatrix>> {
        (0..trials.num_replicates())
            .into_par_iter()
            .map(|r| {
                let row = trials.data.row(r);
                match row.as_slice() {
                    Some(s) => f(s),
                    None => f(&row.to_vec()),
                }
            })
            .collect()
    }
}

fn direct_coefficients(trial: &[f64], tapers: &TaperSet, grid: &FrequencyGrid) -> Array2<Complex64> {
    let k = tapers.num_tapers();
    let mut out = Array2::zeros((k, grid.len()));
    let lattice = grid.lattice();
    for kk in 0..k {
        let y: Vec<f64> = tapers.taper(kk).iter().zip(trial).map(|(h, x)| h * x).collect();
        for (i, &f) in grid.frequencies().iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &v) in y.iter().enumerate() {
                // Reduce the phase exactly when the frequency is a lattice point.
                let cycles = match lattice {
                    Some(l) => {
                        let n = l.n as i64;
                        (l.bins[i] * t as i64).rem_euclid(n) as f64 / n as f64
                    }
                    None => {
                        let c = f * t as f64;
                        c - c.round()
                    }
                };
                acc += Complex64::from_polar(v, -2.0 * PI * cycles);
            }
            out[[kk, i]] = acc;
        }
    }
    out
}

/// Tapered Fourier coefficients `x_k(f)` as a `K × N_f` array.
pub fn tapered_fft(trial: &[f64], tapers: &TaperSet, grid: &FrequencyGrid) -> Result<Array2<Complex64>> {
    MultitaperEstimator::with_frequency_limit(tapers.clone(), grid.clone(), usize::MAX)?.coefficients(trial)
}

/// The rank-one periodogram `x_k(f₁) x_k*(f₂)` of taper `k`.
pub fn loeve_periodogram(
    coeffs: &Array2<Complex64>,
    k: usize,
    grid: &FrequencyGrid,
) -> Result<DualFrequencyMatrix> {
    if k >= coeffs.nrows() {
        return Err(Error::validation(format!(
            "taper index {k} out of range for {} tapers",
            coeffs.nrows()
        )));
    }
    check_coeff_grid(coeffs, grid)?;
    let x = coeffs.row(k);
    let values = hermitian_from_upper(grid.len(), |i, j| x[i] * x[j].conj());
    DualFrequencyMatrix::new(values, grid.clone(), MatrixKind::Spectrum)
}

/// Unweighted taper average `(1/K) Σ_k x_k(f₁) x_k*(f₂)`.
pub fn spectrum_from_coefficients(
    coeffs: &Array2<Complex64>,
    grid: &FrequencyGrid,
) -> Result<DualFrequencyMatrix> {
    check_coeff_grid(coeffs, grid)?;
    let k = coeffs.nrows();
    if k == 0 {
        return Err(Error::validation("at least one taper is required"));
    }
    let scale = 1.0 / k as f64;
    let cols: Vec<ArrayView1<Complex64>> = (0..grid.len()).map(|i| coeffs.column(i)).collect();
    let values = hermitian_from_upper(grid.len(), |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in cols[i].iter().zip(cols[j].iter()) {
            acc += a * b.conj();
        }
        acc * scale
    });
    DualFrequencyMatrix::new(values, grid.clone(), MatrixKind::Spectrum)
}

fn check_coeff_grid(coeffs: &Array2<Complex64>, grid: &FrequencyGrid) -> Result<()> {
    if coeffs.ncols() != grid.len() {
        return Err(Error::validation(format!(
            "{} coefficient columns for a grid of {} frequencies",
            coeffs.ncols(),
            grid.len()
        )));
    }
    Ok(())
}

/// Multitaper Loève spectrum of one trial.
pub fn multitaper_spectrum(
    trial: &[f64],
    tapers: &TaperSet,
    grid: &FrequencyGrid,
) -> Result<DualFrequencyMatrix> {
    spectrum_from_coefficients(&tapered_fft(trial, tapers, grid)?, grid)
}

fn check_same_grid(items: &[DualFrequencyMatrix]) -> Result<&DualFrequencyMatrix> {
    let first = items
        .first()
        .ok_or_else(|| Error::validation("cannot average an empty list of matrices"))?;
    if items.iter().any(|m| !m.grid.same_as(&first.grid)) {
        return Err(Error::validation("matrices to average have different grids"));
    }
    Ok(first)
}

fn tree_sum<A>(lo: usize, hi: usize, leaf: &(dyn Fn(usize) -> Array2<A> + Sync)) -> Array2<A>
where
    A: Clone + AddAssign + Send + Sync,
{
    if hi - lo == 1 {
        return leaf(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let (mut a, b) = rayon::join(|| tree_sum(lo, mid, leaf), || tree_sum(mid, hi, leaf));
    a += &b;
    a
}

/// Elementwise complex mean across replicates.
///
/// Replicates whose cyclic components carry different phases cancel in this
/// average; use [`magnitude_average`] for such populations.
pub fn replicate_average(items: &[DualFrequencyMatrix]) -> Result<DualFrequencyMatrix> {
    let first = check_same_grid(items)?;
    let n = items.len();
    let mut values = tree_sum(0, n, &|r| items[r].values.clone());
    values.mapv_inplace(|z| z / n as f64);
    let mut out = DualFrequencyMatrix::new(values, first.grid.clone(), first.kind)?;
    out.combination = Combination::ComplexMean { count: n };
    Ok(out)
}

/// Elementwise mean of moduli, stored with zero imaginary parts.
pub fn magnitude_average(items: &[DualFrequencyMatrix]) -> Result<DualFrequencyMatrix> {
    let first = check_same_grid(items)?;
    let n = items.len();
    let sum = tree_sum(0, n, &|r| items[r].modulus());
    let values = sum.mapv(|v| Complex64::new(v / n as f64, 0.0));
    let kind = match first.kind {
        MatrixKind::Coherency => MatrixKind::CoherenceSqrt,
        other => other,
    };
    let mut out = DualFrequencyMatrix::new(values, first.grid.clone(), kind)?;
    out.combination = Combination::MagnitudeMean { count: n };
    Ok(out)
}

/// Coherency `S(f₁,f₂) / √(S(f₁,f₁) S(f₂,f₂))` with a unit diagonal.
///
/// Frequencies whose diagonal is below [`MIN_DIAGONAL`] get NaN rows and
/// columns and are listed in `excluded`.
pub fn coherency(spectrum: &DualFrequencyMatrix) -> Result<DualFrequencyMatrix> {
    if spectrum.kind != MatrixKind::Spectrum {
        return Err(Error::validation(format!(
            "coherency needs a spectrum, got {}",
            spectrum.kind.name()
        )));
    }
    let scale: Vec<f64> = spectrum
        .diagonal()
        .iter()
        .map(|d| if d.re >= MIN_DIAGONAL { 1.0 / d.re.sqrt() } else { f64::NAN })
        .collect();
    let values = hermitian_from_upper(spectrum.len(), |i, j| {
        if i == j {
            Complex64::new(if scale[i].is_nan() { f64::NAN } else { 1.0 }, 0.0)
        } else {
            spectrum.values[[i, j]] * (scale[i] * scale[j])
        }
    });
    let mut out = DualFrequencyMatrix::new(values, spectrum.grid.clone(), MatrixKind::Coherency)?;
    out.combination = spectrum.combination;
    Ok(out)
}

/// Moduli of a coherency matrix, `ρ^{1/2}`.
pub fn coherence_sqrt(coherency: &DualFrequencyMatrix) -> Result<DualFrequencyMatrix> {
    if !matches!(coherency.kind, MatrixKind::Coherency | MatrixKind::CoherenceSqrt) {
        return Err(Error::validation(format!(
            "coherence needs a coherency matrix, got {}",
            coherency.kind.name()
        )));
    }
    let values = coherency.values.mapv(|z| Complex64::new(z.norm(), 0.0));
    let mut out = DualFrequencyMatrix::new(values, coherency.grid.clone(), MatrixKind::CoherenceSqrt)?;
    out.combination = coherency.combination;
    Ok(out)
}
