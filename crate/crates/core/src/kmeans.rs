//! Lloyd's k-means with k-means++ seeding and seeded restarts.

use ndarray::{Array2, ArrayView1};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{substream, Purpose};

pub const DEFAULT_RESTARTS: usize = 20;
const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    pub centroids: Array2<f64>,
    pub inertia: f64,
}

fn dist2(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best of `restarts` runs by inertia; ties go to the earlier restart.
pub fn kmeans(points: &Array2<f64>, k: usize, restarts: usize, seed: u64) -> Result<KMeansFit> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::validation(format!("cluster count {k} must lie in [1, {n}]")));
    }
    if restarts == 0 {
        return Err(Error::validation("at least one restart is required"));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite clustering input".into()));
    }
    let fits: Vec<KMeansFit> = (0..restarts)
        .into_par_iter()
        .map(|r| single_run(points, k, &mut substream(seed, Purpose::KMeans, r as u64)))
        .collect();
    let mut best = 0;
    for (r, fit) in fits.iter().enumerate() {
        if fit.inertia < fits[best].inertia {
            best = r;
        }
    }
    Ok(fits.into_iter().nth(best).expect("at least one restart"))
}

fn seed_plus_plus(points: &Array2<f64>, k: usize, rng: &mut impl Rng) -> Array2<f64> {
    let n = points.nrows();
    let mut centroids = Array2::zeros((k, points.ncols()));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&points.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| dist2(points.row(i), centroids.row(0))).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(c).assign(&points.row(pick));
        for i in 0..n {
            d2[i] = d2[i].min(dist2(points.row(i), centroids.row(c)));
        }
    }
    centroids
}

fn assign(points: &Array2<f64>, centroids: &Array2<f64>) -> (Vec<usize>, Vec<f64>) {
    (0..points.nrows())
        .map(|i| {
            let mut best = (0, f64::INFINITY);
            for c in 0..centroids.nrows() {
                let d = dist2(points.row(i), centroids.row(c));
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

fn single_run(points: &Array2<f64>, k: usize, rng: &mut impl Rng) -> KMeansFit {
    let (n, dims) = points.dim();
    let mut centroids = seed_plus_plus(points, k, rng);
    let (mut labels, mut d2) = assign(points, &centroids);
    for _ in 0..MAX_ITERATIONS {
        let mut sums = Array2::<f64>::zeros((k, dims));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            sums.row_mut(labels[i]).scaled_add(1.0, &points.row(i));
            counts[labels[i]] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids.row_mut(c).assign(&(&sums.row(c) / counts[c] as f64));
            } else {
                // An empty cluster takes the point farthest from its centroid.
                let far = (0..n).max_by(|&a, &b| d2[a].total_cmp(&d2[b])).unwrap_or(0);
                centroids.row_mut(c).assign(&points.row(far));
                d2[far] = 0.0;
            }
        }
        let (next, nd2) = assign(points, &centroids);
        let changed = next != labels;
        labels = next;
        d2 = nd2;
        if !changed {
            break;
        }
    }
    KMeansFit { labels, centroids, inertia: d2.iter().sum() }
}

/// Fraction of labels matching `truth` under the best relabelling.
pub fn label_accuracy(labels: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(labels.len(), truth.len());
    if labels.is_empty() {
        return 1.0;
    }
    let k = labels.iter().chain(truth).max().map_or(1, |m| m + 1);
    let mut confusion = vec![vec![0usize; k]; k];
    for (&a, &b) in labels.iter().zip(truth) {
        confusion[a][b] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits: usize = (0..k).map(|a| confusion[a][p[a]]).sum();
        best = best.max(hits);
    });
    best as f64 / labels.len() as f64
}

fn permute(p: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, visit);
        p.swap(start, i);
    }
}
