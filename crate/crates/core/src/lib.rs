//! Dual-frequency (Loève) spectral analysis of replicated, modulated
//! cyclostationary time series.

pub mod dfm;
pub mod error;
pub mod estimate;
pub mod grid;
pub mod io;
pub mod kmeans;
pub mod model;
pub mod moments;
pub mod population;
pub mod rng;
pub mod significance;
pub mod stats;
pub mod tapers;
mod tridiag;

pub use dfm::{Combination, DualFrequencyMatrix, MatrixKind};
pub use error::{Error, Result};
pub use grid::FrequencyGrid;
pub use tapers::{dpss, TaperSet};
pub use estimate::{
    coherence_sqrt, coherency, loeve_periodogram, magnitude_average, multitaper_spectrum,
    replicate_average, spectrum_from_coefficients, tapered_fft, MultitaperEstimator,
};
pub use significance::{fdr_threshold, pvalue_null, subsample_hermitian, TestConfig, ThresholdResult};
pub use population::{
    batch_magnitude_means, build_stack, inertia_elbow, kmeans_loadings, sparsity_metrics, svd_matrix, svd_stack,
    ClusterResult, SparsityRecord, SvdResult, TrialStack,
};
pub use moments::{null_coherence_distribution_check, periodogram_moments, ComplexMoment, KsReport, SecondOrder};
