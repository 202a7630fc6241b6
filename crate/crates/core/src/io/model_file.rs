//! TOML model specifications.
//!
//! ```toml
//! series_length = 512
//! num_replicates = 100
//! sample_rate_hz = 128.0
//! rng_seed = 7
//! mixture_weights = [[1.0, 0.0], [0.0, 1.0]]  # row r % rows applies to replicate r
//!
//! [base]
//! kind = "autoregressive"      # white | autoregressive | spectral_shape
//! params = [0.5]
//! innovation_variance = 1.0
//!
//! [variation]                  # optional
//! max_time_shift = 16
//! phase_spread = 3.14159
//! amplitude_range = [0.8, 1.2]
//!
//! [[states]]
//! name = "narrow"
//! [[states.components]]
//! index = 1
//! cyclic_period = 8.0
//! weight = 0.5
//! amplitude = { shape = "gaussian_bump", center = 256.0, width = 32.0 }
//! ```
//!
//! Amplitude and phase shapes are `constant` (`value`), `gaussian_bump`
//! (`center`, `width`, optional `peak` and `floor`) and `samples` (`values`).

use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::source_name;
use crate::error::{Error, Result};
use crate::model::{BaseKind, BaseProcessSpec, ComponentSpec, ModelSpec, ReplicateVariation, StateSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    series_length: usize,
    num_replicates: usize,
    #[serde(default = "one")]
    sample_rate_hz: f64,
    #[serde(default)]
    rng_seed: u64,
    mixture_weights: Option<Vec<Vec<f64>>>,
    base: BaseFile,
    #[serde(default)]
    variation: VariationFile,
    states: Vec<StateFile>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum KindFile {
    White,
    Autoregressive,
    SpectralShape,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseFile {
    kind: KindFile,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default = "one")]
    innovation_variance: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariationFile {
    #[serde(default)]
    max_time_shift: u32,
    #[serde(default)]
    phase_spread: f64,
    #[serde(default = "unit_range")]
    amplitude_range: (f64, f64),
}

fn unit_range() -> (f64, f64) {
    (1.0, 1.0)
}

impl Default for VariationFile {
    fn default() -> Self {
        Self { max_time_shift: 0, phase_spread: 0.0, amplitude_range: unit_range() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    name: Option<String>,
    #[serde(default)]
    components: Vec<ComponentFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    index: u32,
    cyclic_period: f64,
    #[serde(default = "one")]
    weight: f64,
    #[serde(default)]
    amplitude: Option<ShapeFile>,
    #[serde(default)]
    phase: Option<ShapeFile>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
enum ShapeFile {
    Constant {
        value: f64,
    },
    GaussianBump {
        center: f64,
        width: f64,
        #[serde(default = "one")]
        peak: f64,
        #[serde(default)]
        floor: f64,
    },
    Samples {
        values: Vec<f64>,
    },
}

impl ShapeFile {
    fn sample(&self, len: usize, field: &str) -> std::result::Result<Vec<f64>, String> {
        match self {
            ShapeFile::Constant { value } => Ok(vec![*value; len]),
            ShapeFile::GaussianBump { center, width, peak, floor } => {
                if !(*width > 0.0) {
                    return Err(format!("{field}: gaussian_bump width must be positive"));
                }
                Ok((0..len)
                    .map(|t| {
                        let z = (t as f64 - center) / width;
                        floor + peak * (-0.5 * z * z).exp()
                    })
                    .collect())
            }
            ShapeFile::Samples { values } => {
                if values.len() != len {
                    return Err(format!("{field}: {} samples given, series_length is {len}", values.len()));
                }
                Ok(values.clone())
            }
        }
    }
}

/// Parses a TOML model specification and checks its hard constraints.
/// Soft-constraint warnings are logged.
pub fn parse_model_spec(text: &str, source: &str) -> Result<ModelSpec> {
    let file: ModelFile = toml::from_str(text).map_err(|e| Error::parse(source, e.to_string()))?;
    let len = file.series_length;
    if len > 1 << 24 {
        return Err(Error::parse(source, format!("series_length {len} is unreasonably large")));
    }
    let kind = match file.base.kind {
        KindFile::White => BaseKind::White,
        KindFile::Autoregressive => BaseKind::Autoregressive,
        KindFile::SpectralShape => BaseKind::SpectralShape,
    };
    let base = BaseProcessSpec { kind, params: file.base.params, innovation_variance: file.base.innovation_variance };
    let mut states = Vec::with_capacity(file.states.len());
    for (s, st) in file.states.into_iter().enumerate() {
        let mut components = Vec::with_capacity(st.components.len());
        for (c, comp) in st.components.into_iter().enumerate() {
            let field = format!("states[{s}].components[{c}]");
            let amplitude = match &comp.amplitude {
                Some(shape) => shape.sample(len, &format!("{field}.amplitude")),
                None => Ok(vec![1.0; len]),
            }
            .map_err(|m| Error::parse(source, m))?;
            let phase = comp
                .phase
                .as_ref()
                .map(|shape| shape.sample(len, &format!("{field}.phase")))
                .transpose()
                .map_err(|m| Error::parse(source, m))?;
            components.push(ComponentSpec {
                index: comp.index,
                cyclic_period: comp.cyclic_period,
                amplitude,
                phase,
                weight: comp.weight,
            });
        }
        states.push(StateSpec { name: st.name.unwrap_or_else(|| format!("state{s}")), components });
    }
    let nstates = states.len();
    let mixture_weights = file.mixture_weights.unwrap_or_else(|| vec![vec![1.0 / nstates.max(1) as f64; nstates]]);
    let spec = ModelSpec {
        base,
        states,
        mixture_weights,
        series_length: len,
        num_replicates: file.num_replicates,
        sample_rate_hz: file.sample_rate_hz,
        rng_seed: file.rng_seed,
        variation: ReplicateVariation {
            max_time_shift: file.variation.max_time_shift,
            phase_spread: file.variation.phase_spread,
            amplitude_range: file.variation.amplitude_range,
        },
    };
    match spec.validate() {
        Ok(warnings) => {
            for w in warnings {
                log::warn!("{source}: {w}");
            }
            Ok(spec)
        }
        Err(Error::Validation(m)) => Err(Error::Validation(format!("{source}: {m}"))),
        Err(e) => Err(e),
    }
}

pub fn load_model_spec(path: &Path) -> Result<ModelSpec> {
    let text = fs::read_to_string(path)?;
    parse_model_spec(&text, &source_name(path))
}
