//! Frequency grids for dual-frequency matrices.

use crate::error::{Error, Result};

/// Default cap on the number of grid frequencies; matrices are `N_f × N_f`.
pub const DEFAULT_MAX_FREQUENCIES: usize = 2048;

/// Frequencies lying on the lattice `bin / n` (cycles per sample).
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub n: usize,
    pub bins: Vec<i64>,
}

/// Strictly increasing analysis frequencies in (-1/2, 1/2), in cycles per
/// sample, together with the sample rate used for Hz labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    frequencies: Vec<f64>,
    sample_rate_hz: f64,
    lattice: Option<Lattice>,
}

impl FrequencyGrid {
    /// Arbitrary grid. The FFT path is not available for such grids unless
    /// every frequency happens to be supplied through [`FrequencyGrid::on_lattice`].
    pub fn new(frequencies: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        validate(&frequencies, sample_rate_hz)?;
        Ok(Self {
            frequencies,
            sample_rate_hz,
            lattice: None,
        })
    }

    /// Grid of frequencies `bins[i] / n`.
    pub fn on_lattice(n: usize, bins: Vec<i64>, sample_rate_hz: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("lattice size must be positive"));
        }
        let frequencies: Vec<f64> = bins.iter().map(|&b| b as f64 / n as f64).collect();
        validate(&frequencies, sample_rate_hz)?;
        Ok(Self {
            frequencies,
            sample_rate_hz,
            lattice: Some(Lattice { n, bins }),
        })
    }

    /// All Fourier frequencies `j / len` strictly inside (-1/2, 1/2).
    pub fn fundamental(len: usize, sample_rate_hz: f64) -> Result<Self> {
        Self::refined(len, 1, sample_rate_hz)
    }

    /// Frequencies `j / (len * factor)` strictly inside (-1/2, 1/2).
    pub fn refined(len: usize, factor: usize, sample_rate_hz: f64) -> Result<Self> {
        if len < 2 || factor == 0 {
            return Err(Error::validation("grid needs len >= 2 and factor >= 1"));
        }
        let n = len * factor;
        let half = n as i64 / 2;
        let lo = if n.is_multiple_of(2) { -half + 1 } else { -half };
        let hi = if n.is_multiple_of(2) { half - 1 } else { half };
        Self::on_lattice(n, (lo..=hi).collect(), sample_rate_hz)
    }

    /// Fourier frequencies of a length-`len` series whose Hz value lies in
    /// `[low_hz, high_hz]` (edges inclusive).
    pub fn band(len: usize, sample_rate_hz: f64, low_hz: f64, high_hz: f64) -> Result<Self> {
        let full = Self::fundamental(len, sample_rate_hz)?;
        full.restrict_hz(low_hz, high_hz)
    }

    /// Sub-grid of frequencies within `[low_hz, high_hz]`, edges inclusive.
    pub fn restrict_hz(&self, low_hz: f64, high_hz: f64) -> Result<Self> {
        if !(low_hz <= high_hz) {
            return Err(Error::validation(format!(
                "band low edge {low_hz} exceeds high edge {high_hz}"
            )));
        }
        let keep = self.band_indices(low_hz, high_hz);
        if keep.is_empty() {
            return Err(Error::validation(format!(
                "band [{low_hz}, {high_hz}] Hz contains no grid frequencies"
            )));
        }
        let frequencies: Vec<f64> = keep.iter().map(|&i| self.frequencies[i]).collect();
        let lattice = self.lattice.as_ref().map(|l| Lattice {
            n: l.n,
            bins: keep.iter().map(|&i| l.bins[i]).collect(),
        });
        Ok(Self {
            frequencies,
            sample_rate_hz: self.sample_rate_hz,
            lattice,
        })
    }

    /// Indices whose Hz value lies in `[low_hz, high_hz]`.
    pub fn band_indices(&self, low_hz: f64, high_hz: f64) -> Vec<usize> {
        let tol = 1e-9 * self.sample_rate_hz;
        (0..self.len())
            .filter(|&i| {
                let hz = self.hz(i);
                hz >= low_hz - tol && hz <= high_hz + tol
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    /// Frequency `i` in Hz.
    pub fn hz(&self, i: usize) -> f64 {
        self.frequencies[i] * self.sample_rate_hz
    }

    pub fn check_size(&self, limit: usize) -> Result<()> {
        if self.len() > limit {
            return Err(Error::MemoryGuard {
                requested: self.len(),
                limit,
            });
        }
        Ok(())
    }

    /// True when the two grids carry the same frequencies and sample rate.
    pub fn same_as(&self, other: &FrequencyGrid) -> bool {
        self.sample_rate_hz == other.sample_rate_hz && self.frequencies == other.frequencies
    }
}

fn validate(frequencies: &[f64], sample_rate_hz: f64) -> Result<()> {
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::validation("sample rate must be positive and finite"));
    }
    if frequencies.is_empty() {
        return Err(Error::validation("frequency grid is empty"));
    }
    for &f in frequencies {
        if !(f > -0.5 && f < 0.5) {
            return Err(Error::validation(format!(
                "grid frequency {f} outside (-1/2, 1/2)"
            )));
        }
    }
    if frequencies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("grid frequencies must be strictly increasing"));
    }
    Ok(())
}
