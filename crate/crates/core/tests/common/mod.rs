#![allow(dead_code)]

use std::path::Path;

use loeve_core::io::load_model_spec;
use loeve_core::model::{ComponentSpec, ModelSpec};
use loeve_core::rng::{substream, Purpose};
use rand::Rng;
use rand_distr::StandardNormal;

/// Two-state demo model shipped in the repository.
pub fn demo_spec() -> ModelSpec {
    load_model_spec(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo/two_state.toml")).unwrap()
}

/// Demo model restricted to one of its states.
pub fn demo_state(state: usize, replicates: usize) -> ModelSpec {
    let mut spec = demo_spec();
    spec.states = vec![spec.states[state].clone()];
    spec.mixture_weights = vec![vec![1.0]];
    spec.num_replicates = replicates;
    spec
}

pub fn bump(len: usize, center: f64, width: f64) -> Vec<f64> {
    (0..len).map(|t| (-0.5 * ((t as f64 - center) / width).powi(2)).exp()).collect()
}

/// Harmonics 0 (weight 1) and 1 (weight `weight1`) at period `period`.
pub fn lines(len: usize, period: f64, weight1: f64) -> Vec<ComponentSpec> {
    vec![ComponentSpec::constant(0, period, 1.0, len), ComponentSpec::constant(1, period, weight1, len)]
}

pub fn white_noise(len: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = substream(seed, Purpose::Validation, index);
    (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Width at half maximum above `base`, linearly interpolated.
pub fn half_max_width(profile: &[f64], base: f64) -> f64 {
    let (peak_at, &peak) = profile.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let half = base + 0.5 * (peak - base);
    let mut left = 0.0;
    for i in (0..peak_at).rev() {
        if profile[i] < half {
            left = i as f64 + (half - profile[i]) / (profile[i + 1] - profile[i]);
            break;
        }
    }
    let mut right = (profile.len() - 1) as f64;
    for i in peak_at + 1..profile.len() {
        if profile[i] < half {
            right = (i - 1) as f64 + (profile[i - 1] - half) / (profile[i - 1] - profile[i]);
            break;
        }
    }
    right - left
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    loeve_core::stats::correlation(a, b)
}
