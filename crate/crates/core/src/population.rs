//! Population structure across trials: stacked thresholded coherence,
//! its singular value decomposition and clustering of trial loadings.

use ndarray::{s, Array2};
use nalgebra::DMatrix;

use crate::dfm::DualFrequencyMatrix;
use crate::error::{Error, Result};
use crate::estimate::magnitude_average;
use crate::grid::FrequencyGrid;
use crate::kmeans::{kmeans, DEFAULT_RESTARTS};
use crate::significance::ThresholdResult;

/// Rows are trials, columns are `|τ̂|` at the common tested pairs, zero
/// where the pair was not significant.
#[derive(Debug, Clone)]
pub struct TrialStack {
    pub p: Array2<f64>,
    pub pair_index: Vec<(usize, usize)>,
    pub trial_ids: Vec<usize>,
    pub grid: FrequencyGrid,
}

impl TrialStack {
    pub fn num_trials(&self) -> usize {
        self.p.nrows()
    }

    pub fn num_pairs(&self) -> usize {
        self.p.ncols()
    }

    /// Places a pair-indexed vector back on the `N_f × N_f` layout,
    /// mirrored across the diagonal; untested entries are zero.
    pub fn to_layout(&self, vector: &[f64]) -> Result<Array2<f64>> {
        if vector.len() != self.num_pairs() {
            return Err(Error::validation(format!(
                "vector of length {} for {} pairs",
                vector.len(),
                self.num_pairs()
            )));
        }
        let n = self.grid.len();
        let mut out = Array2::zeros((n, n));
        for (&(i, j), &v) in self.pair_index.iter().zip(vector) {
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
        Ok(out)
    }
}

/// Stacks thresholded trials over the tested pairs lying in `band_hz`.
pub fn build_stack(results: &[ThresholdResult], band_hz: (f64, f64)) -> Result<TrialStack> {
    let first = results.first().ok_or_else(|| Error::validation("no trials to stack"))?;
    let grid = first.thresholded.grid.clone();
    let in_band = grid.band_indices(band_hz.0, band_hz.1);
    let mut pairs: Vec<(usize, usize)> = first
        .tests
        .iter()
        .map(|t| (t.i, t.j))
        .filter(|(i, j)| in_band.contains(i) && in_band.contains(j))
        .collect();
    pairs.sort_unstable();
    if pairs.is_empty() {
        return Err(Error::validation("no tested pairs inside the stacking band"));
    }
    let mut p = Array2::zeros((results.len(), pairs.len()));
    for (r, res) in results.iter().enumerate() {
        if !res.thresholded.grid.same_as(&grid) {
            return Err(Error::validation(format!("trial {r} uses a different frequency grid")));
        }
        let mut tested: Vec<(usize, usize)> = res.tests.iter().map(|t| (t.i, t.j)).collect();
        tested.sort_unstable();
        if pairs.iter().any(|q| tested.binary_search(q).is_err()) {
            return Err(Error::validation(format!("trial {r} was tested on a different pair set")));
        }
        for (c, &(i, j)) in pairs.iter().enumerate() {
            p[[r, c]] = res.thresholded.values[[i, j]].norm().min(1.0);
        }
    }
    Ok(TrialStack { p, pair_index: pairs, trial_ids: (0..results.len()).collect(), grid })
}

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// All singular values, nonincreasing.
    pub singular_values: Vec<f64>,
    /// `R × k_keep` trial loadings.
    pub loadings: Array2<f64>,
    /// `N × k_keep` frequency-structure vectors.
    pub components: Array2<f64>,
}

impl SvdResult {
    pub fn k_keep(&self) -> usize {
        self.loadings.ncols()
    }

    /// Rank-`k_keep` reconstruction `U diag(ξ) Vᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let k = self.k_keep();
        let mut scaled = self.loadings.clone();
        for c in 0..k {
            scaled.column_mut(c).mapv_inplace(|v| v * self.singular_values[c]);
        }
        scaled.dot(&self.components.t())
    }
}

/// Truncated SVD of the stack; each component's largest-magnitude entry is
/// made positive, flipping the matching loading column.
pub fn svd_stack(stack: &TrialStack, k_keep: usize) -> Result<SvdResult> {
    svd_matrix(&stack.p, k_keep)
}

pub fn svd_matrix(p: &Array2<f64>, k_keep: usize) -> Result<SvdResult> {
    let (r, n) = p.dim();
    let rank_max = r.min(n);
    if k_keep == 0 || k_keep > rank_max {
        return Err(Error::validation(format!("k_keep {k_keep} must lie in [1, {rank_max}]")));
    }
    let m = DMatrix::from_fn(r, n, |i, j| p[[i, j]]);
    let svd = m.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD produced no left vectors".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::Numerical("SVD produced no right vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut loadings = Array2::zeros((r, k_keep));
    let mut components = Array2::zeros((n, k_keep));
    for (c, &src) in order.iter().take(k_keep).enumerate() {
        let v: Vec<f64> = vt.row(src).iter().copied().collect();
        let mut peak = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[peak].abs() {
                peak = i;
            }
        }
        let sign = if v[peak] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            components[[i, c]] = sign * v[i];
        }
        for i in 0..r {
            loadings[[i, c]] = sign * u[(i, src)];
        }
    }
    Ok(SvdResult { singular_values, loadings, components })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityRecord {
    pub trial: usize,
    pub fraction_nonzero: f64,
    /// Loadings on the first (up to) three components.
    pub loadings: Vec<f64>,
}

pub fn sparsity_metrics(stack: &TrialStack, svd: &SvdResult) -> Result<Vec<SparsityRecord>> {
    if svd.loadings.nrows() != stack.num_trials() {
        return Err(Error::validation("decomposition does not match the stack"));
    }
    let n = stack.num_pairs() as f64;
    let keep = svd.k_keep().min(3);
    Ok((0..stack.num_trials())
        .map(|r| SparsityRecord {
            trial: stack.trial_ids[r],
            fraction_nonzero: stack.p.row(r).iter().filter(|v| **v != 0.0).count() as f64 / n,
            loadings: (0..keep).map(|c| svd.loadings[[r, c]]).collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    pub centroids: Array2<f64>,
    pub inertia: f64,
    pub dims: usize,
}

/// k-means on the first `dims` columns of a trials × components loading
/// matrix (normally [`SvdResult::loadings`]).
pub fn kmeans_loadings(loadings: &Array2<f64>, k: usize, dims: usize, seed: u64) -> Result<ClusterResult> {
    if k < 2 {
        return Err(Error::validation("clustering needs at least two clusters"));
    }
    if dims == 0 || dims > loadings.ncols() {
        return Err(Error::validation(format!(
            "cluster dims {dims} must lie in [1, {}]",
            loadings.ncols()
        )));
    }
    let points = loadings.slice(s![.., ..dims]).to_owned();
    let fit = kmeans(&points, k, DEFAULT_RESTARTS, seed)?;
    Ok(ClusterResult { labels: fit.labels, centroids: fit.centroids, inertia: fit.inertia, dims })
}

/// Best inertia for each `k` in `ks` that does not exceed the trial count,
/// for choosing the cluster count.
pub fn inertia_elbow(loadings: &Array2<f64>, dims: usize, ks: &[usize], seed: u64) -> Result<Vec<(usize, f64)>> {
    let rows = loadings.nrows();
    let points = loadings.slice(s![.., ..dims.clamp(1, loadings.ncols().max(1))]).to_owned();
    ks.iter()
        .filter(|&&k| k >= 1 && k <= rows)
        .map(|&k| kmeans(&points, k, DEFAULT_RESTARTS, seed).map(|f| (k, f.inertia)))
        .collect()
}

/// Magnitude averages over consecutive, non-overlapping batches; the last
/// batch may be short.
pub fn batch_magnitude_means(items: &[DualFrequencyMatrix], batch_size: usize) -> Result<Vec<DualFrequencyMatrix>> {
    if batch_size == 0 {
        return Err(Error::validation("batch size must be positive"));
    }
    items.chunks(batch_size).map(magnitude_average).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfm::MatrixKind;
    use crate::kmeans::label_accuracy;
    use crate::significance::PairTest;
    use ndarray::Array1;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, Uniform};

    fn orthonormal(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(rows, cols, |_, _| Normal::new(0.0, 1.0).unwrap().sample(&mut rng));
        let q = m.qr().q();
        Array2::from_shape_fn((rows, cols), |(i, j)| q[(i, j)])
    }

    fn max_abs(a: &Array2<f64>) -> f64 {
        a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    #[test]
    fn known_singular_values() {
        let u = orthonormal(6, 3, 1);
        let v = orthonormal(9, 3, 2);
        let xi = Array2::from_diag(&Array1::from(vec![3.0, 2.0, 1.0]));
        let p = u.dot(&xi).dot(&v.t());
        let svd = svd_matrix(&p, 3).unwrap();
        for (got, want) in svd.singular_values.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(svd.singular_values[3..].iter().all(|s| *s < 1e-10));
        assert!(max_abs(&(&svd.reconstruct() - &p)) < 1e-10);
        let gu = svd.loadings.t().dot(&svd.loadings);
        let gv = svd.components.t().dot(&svd.components);
        assert!(max_abs(&(&gu - &Array2::<f64>::eye(3))) < 1e-10);
        assert!(max_abs(&(&gv - &Array2::<f64>::eye(3))) < 1e-10);
        for c in 0..3 {
            let col = svd.components.column(c);
            let peak = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(peak > 0.0);
        }
    }

    #[test]
    fn truncation_error_is_tail_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Array2::from_shape_fn((12, 20), |_| Uniform::new(0.0, 1.0).unwrap().sample(&mut rng));
        let svd = svd_matrix(&p, 4).unwrap();
        let err = (&svd.reconstruct() - &p).iter().map(|v| v * v).sum::<f64>().sqrt();
        let tail = svd.singular_values[4..].iter().map(|s| s * s).sum::<f64>().sqrt();
        assert!((err - tail).abs() < 1e-8);
    }

    #[test]
    fn identical_rows_are_rank_one() {
        let row = [0.2, 0.0, 0.7, 0.1, 0.0];
        let p = Array2::from_shape_fn((4, 5), |(_, j)| row[j]);
        let svd = svd_matrix(&p, 2).unwrap();
        assert!(svd.singular_values[1] < 1e-10 * svd.singular_values[0]);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..5 {
            assert!((svd.components[[j, 0]] - row[j] / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_stack_has_zero_spectrum() {
        let p = Array2::zeros((3, 6));
        let svd = svd_matrix(&p, 2).unwrap();
        assert!(svd.singular_values.iter().all(|s| *s == 0.0));
    }

    fn fake_result(grid: &FrequencyGrid, pairs: &[(usize, usize)], vals: &[f64]) -> ThresholdResult {
        let n = grid.len();
        let mut values = Array2::<Complex64>::zeros((n, n));
        let mut tests = Vec::new();
        for (&(i, j), &v) in pairs.iter().zip(vals) {
            values[[i, j]] = Complex64::new(0.0, v);
            values[[j, i]] = Complex64::new(0.0, -v);
            tests.push(PairTest { i, j, coherence: v, pvalue: 0.5, rejected: v != 0.0 });
        }
        ThresholdResult {
            thresholded: DualFrequencyMatrix::new(values, grid.clone(), MatrixKind::Thresholded).unwrap(),
            num_tested: tests.len(),
            num_rejected: tests.iter().filter(|t| t.rejected).count(),
            tests,
            cutoff: 0.0,
        }
    }

    #[test]
    fn stack_rows_follow_pair_order() {
        let grid = FrequencyGrid::new(vec![-0.3, -0.1, 0.1, 0.3], 100.0).unwrap();
        let pairs = [(1, 3), (0, 2), (0, 3)];
        let one = fake_result(&grid, &pairs, &[0.5, 0.0, 0.25]);
        let stack = build_stack(std::slice::from_ref(&one), (-50.0, 50.0)).unwrap();
        assert_eq!(stack.pair_index, vec![(0, 2), (0, 3), (1, 3)]);
        assert_eq!(stack.p.row(0).to_vec(), vec![0.0, 0.25, 0.5]);
        let narrow = build_stack(std::slice::from_ref(&one), (-20.0, 50.0)).unwrap();
        assert_eq!(narrow.pair_index, vec![(1, 3)]);
        let layout = stack.to_layout(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(layout[[3, 1]], 3.0);

        let other = FrequencyGrid::new(vec![-0.3, -0.1, 0.1, 0.35], 100.0).unwrap();
        let two = fake_result(&other, &pairs, &[0.5, 0.0, 0.25]);
        assert!(build_stack(&[one, two], (-50.0, 50.0)).is_err());
    }

    #[test]
    fn sparsity_fractions() {
        let mut p = Array2::zeros((3, 4));
        p.row_mut(1).fill(0.5);
        p[[2, 0]] = 0.3;
        let grid = FrequencyGrid::new(vec![-0.3, -0.1, 0.1, 0.3], 1.0).unwrap();
        let stack = TrialStack { p, pair_index: vec![(0, 1), (0, 2), (0, 3), (1, 3)], trial_ids: vec![0, 1, 2], grid };
        let svd = svd_stack(&stack, 2).unwrap();
        let rec = sparsity_metrics(&stack, &svd).unwrap();
        assert_eq!(rec[0].fraction_nonzero, 0.0);
        assert_eq!(rec[1].fraction_nonzero, 1.0);
        assert_eq!(rec[2].fraction_nonzero, 0.25);
        assert_eq!(rec[1].loadings.len(), 2);
    }

    /// Two population patterns with multiplicative noise.
    fn two_state_stack(per: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Uniform::new(0.0, 1.0).unwrap();
        let n = 60;
        let a: Vec<f64> = (0..n).map(|j| if j % 3 == 0 { 0.8 } else { 0.0 }).collect();
        let b: Vec<f64> = (0..n).map(|j| if j < 30 { 0.6 } else { 0.1 }).collect();
        let mut p = Array2::zeros((2 * per, n));
        let mut truth = Vec::new();
        for r in 0..2 * per {
            let pat = if r % 2 == 0 { &a } else { &b };
            for j in 0..n {
                p[[r, j]] = (pat[j] * (0.7 + 0.6 * u.sample(&mut rng))).min(1.0);
            }
            truth.push(r % 2);
        }
        (p, truth)
    }

    #[test]
    fn two_state_stack_is_nearly_rank_two() {
        let (p, truth) = two_state_stack(20, 3);
        let svd = svd_matrix(&p, 3).unwrap();
        let s = &svd.singular_values;
        assert!(s[1] / s[0] > 0.2);
        assert!(s[2] / s[0] < 0.2);
        let fit = kmeans_loadings(&svd.loadings, 2, 2, 11).unwrap();
        assert_eq!(label_accuracy(&fit.labels, &truth), 1.0);
        assert!(kmeans_loadings(&svd.loadings, 2, 4, 11).is_err());
        assert!(kmeans_loadings(&svd.loadings, 1, 2, 11).is_err());
        let elbow = inertia_elbow(&svd.loadings, 2, &[1, 2, 3, 4], 1).unwrap();
        assert!(elbow.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
    }

    #[test]
    fn batches_cover_all_items() {
        let grid = FrequencyGrid::new(vec![-0.2, 0.2], 1.0).unwrap();
        let m = |v: f64| {
            let values = Array2::from_shape_vec((2, 2), vec![
                Complex64::new(1.0, 0.0), Complex64::new(0.0, v),
                Complex64::new(0.0, -v), Complex64::new(1.0, 0.0),
            ]).unwrap();
            DualFrequencyMatrix::new(values, grid.clone(), MatrixKind::Coherency).unwrap()
        };
        let items: Vec<_> = (0..7).map(|i| m(0.1 * i as f64)).collect();
        let b = batch_magnitude_means(&items, 3).unwrap();
        assert_eq!(b.len(), 3);
        assert!((b[2].values[[0, 1]].re - 0.6).abs() < 1e-15);
        let single = batch_magnitude_means(&items, 1).unwrap();
        assert!((single[4].values[[0, 1]].re - 0.4).abs() < 1e-15);
        let all = batch_magnitude_means(&items, 7).unwrap();
        assert_eq!(all.len(), 1);
        assert!(batch_magnitude_means(&items, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn permuting_trials_permutes_loadings(seed in 0u64..500, shift in 1usize..39) {
            let (p, _) = two_state_stack(20, seed);
            let rows = p.nrows();
            let perm: Vec<usize> = (0..rows).map(|r| (r * 7 + shift) % rows).collect();
            let q = Array2::from_shape_fn(p.dim(), |(r, j)| p[[perm[r], j]]);
            let a = svd_matrix(&p, 2).unwrap();
            let b = svd_matrix(&q, 2).unwrap();
            for (x, y) in a.singular_values.iter().zip(&b.singular_values) {
                prop_assert!((x - y).abs() < 1e-9);
            }
            prop_assert!(max_abs(&(&a.components - &b.components)) < 1e-8);
            for r in 0..rows {
                for c in 0..2 {
                    prop_assert!((b.loadings[[r, c]] - a.loadings[[perm[r], c]]).abs() < 1e-8);
                }
            }
            let la = kmeans_loadings(&a.loadings, 2, 2, 3).unwrap().labels;
            let lb = kmeans_loadings(&b.loadings, 2, 2, 3).unwrap().labels;
            let la_perm: Vec<usize> = perm.iter().map(|&r| la[r]).collect();
            prop_assert_eq!(label_accuracy(&la_perm, &lb), 1.0);
        }
    }
}
