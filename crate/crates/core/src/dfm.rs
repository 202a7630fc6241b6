//! Dual-frequency matrices: Loève spectra, coherency and thresholded coherence.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

/// What the entries of a [`DualFrequencyMatrix`] represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Spectrum,
    Coherency,
    /// Moduli of coherency, `ρ^{1/2}`, stored with zero imaginary parts.
    CoherenceSqrt,
    /// Coherency with non-significant off-diagonal entries set to zero.
    Thresholded,
}

impl MatrixKind {
    pub fn code(self) -> u32 {
        match self {
            MatrixKind::Spectrum => 0,
            MatrixKind::Coherency => 1,
            MatrixKind::CoherenceSqrt => 2,
            MatrixKind::Thresholded => 3,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Some(match code {
            0 => MatrixKind::Spectrum,
            1 => MatrixKind::Coherency,
            2 => MatrixKind::CoherenceSqrt,
            3 => MatrixKind::Thresholded,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Spectrum => "spectrum",
            MatrixKind::Coherency => "coherency",
            MatrixKind::CoherenceSqrt => "coherence_sqrt",
            MatrixKind::Thresholded => "thresholded",
        }
    }
}

/// How a matrix was combined across replicates.
///
/// `ComplexMean` marks an average of complex values. When replicates carry
/// different phases on the cyclic components, that average cancels real
/// structure; prefer `MagnitudeMean` for population summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    Single,
    ComplexMean { count: usize },
    MagnitudeMean { count: usize },
}

#[derive(Debug, Clone)]
pub struct DualFrequencyMatrix {
    pub values: Array2<Complex64>,
    pub grid: FrequencyGrid,
    pub kind: MatrixKind,
    pub combination: Combination,
    /// Grid indices whose rows and columns hold NaN because the spectrum
    /// diagonal vanished there.
    pub excluded: Vec<usize>,
}

impl DualFrequencyMatrix {
    pub fn new(values: Array2<Complex64>, grid: FrequencyGrid, kind: MatrixKind) -> Result<Self> {
        let n = grid.len();
        if values.dim() != (n, n) {
            return Err(Error::validation(format!(
                "matrix shape {:?} does not match grid of {} frequencies",
                values.dim(),
                n
            )));
        }
        let excluded = (0..n).filter(|&i| values[[i, i]].re.is_nan()).collect();
        Ok(Self {
            values,
            grid,
            kind,
            combination: Combination::Single,
            excluded,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[[i, j]]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.values[[i, i]]).collect()
    }

    /// Largest `|v[i][j] - conj(v[j][i])|` over finite entries.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.values[[i, j]] - self.values[[j, i]].conj()).norm();
                if d.is_finite() {
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    /// Elementwise modulus as a real matrix.
    pub fn modulus(&self) -> Array2<f64> {
        self.values.mapv(|z| z.norm())
    }
}

/// Builds an `n × n` matrix from its upper triangle, mirroring
/// `v[j][i] = conj(v[i][j])` and forcing a real diagonal so the exchange
/// symmetry holds exactly.
pub(crate) fn hermitian_from_upper(
    n: usize,
    mut upper: impl FnMut(usize, usize) -> Complex64,
) -> Array2<Complex64> {
    let mut out = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        let d = upper(i, i);
        out[[i, i]] = Complex64::new(d.re, 0.0);
        for j in (i + 1)..n {
            let v = upper(i, j);
            out[[i, j]] = v;
            out[[j, i]] = v.conj();
        }
    }
    out
}
