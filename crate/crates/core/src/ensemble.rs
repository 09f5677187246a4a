//! Ensemble consistency scoring.
//!
//! Runs k-means once per entry of the k schedule, collects for every point
//! the centroid of the cluster it landed in on each run, and scores the
//! point by the mean cosine similarity over all unordered centroid pairs.
//! A point whose centroids stay in the same spatial arrangement no matter
//! how finely the data is clustered scores near 1.


use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PointId};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans_fit, ClusteringResult, KmeansOptions};
use crate::seed::per_run_seed;

/// The k schedule and seeding for one ensemble pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Distinct cluster counts, each in `2..=n`.
    pub k_schedule: Vec<usize>,
    pub base_seed: u64,
    pub kmeans: KmeansOptions,
    /// Keep the per-run clusterings on the result for audit. Off by default;
    /// they dominate memory on large schedules.
    pub retain_runs: bool,
}

impl EnsembleConfig {
    pub fn new(k_schedule: Vec<usize>, base_seed: u64) -> Self {
        Self {
            k_schedule,
            base_seed,
            kmeans: KmeansOptions::default(),
            retain_runs: false,
        }
    }

    /// Checks the schedule against a dataset of `n` points.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_schedule.len() < 2 {
            return Err(Error::Config(format!(
                "k schedule needs at least 2 entries, got {}",
                self.k_schedule.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &k in &self.k_schedule {
            if k < 2 || k > n {
                return Err(Error::Config(format!(
                    "k = {k} outside the valid range 2..={n}"
                )));
            }
            if !seen.insert(k) {
                return Err(Error::Config(format!("duplicate k = {k} in schedule")));
            }
        }
        Ok(())
    }
}

/// Per-point consistency scores for one ensemble pass.
#[derive(Debug, Clone)]
pub struct ConsistencyScores {
    ids: Vec<PointId>,
    scores: Vec<f64>,
    k_schedule: Vec<usize>,
    runs: Option<Vec<ClusteringResult>>,
}

impl ConsistencyScores {
    /// Rebuilds scores from their exported parts (for reloading stage
    /// files). Validates lengths, id uniqueness, and score bounds.
    pub fn from_parts(
        ids: Vec<PointId>,
        scores: Vec<f64>,
        k_schedule: Vec<usize>,
    ) -> Result<Self> {
        if ids.len() != scores.len() {
            return Err(Error::Data(format!(
                "{} ids for {} scores",
                ids.len(),
                scores.len()
            )));
        }
        if ids.iter().collect::<std::collections::HashSet<_>>().len() != ids.len() {
            return Err(Error::Data("duplicate point ids in scores".into()));
        }
        if let Some(bad) = scores.iter().find(|s| !(-1.0..=1.0).contains(*s)) {
            return Err(Error::Data(format!("score {bad} outside [-1, 1]")));
        }
        Ok(Self { ids, scores, k_schedule, runs: None })
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn k_schedule(&self) -> &[usize] {
        &self.k_schedule
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// The retained per-run clusterings, when the config asked for them.
    pub fn runs(&self) -> Option<&[ClusteringResult]> {
        self.runs.as_deref()
    }

    /// (id, score) pairs sorted by descending score; ties order by id.
    pub fn sorted_descending(&self) -> Vec<(PointId, f64)> {
        let mut pairs: Vec<(PointId, f64)> =
            self.ids.iter().copied().zip(self.scores.iter().copied()).collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        pairs
    }
}

/// Cosine similarity, with the zero-vector convention: 0 against any
/// nonzero vector (no direction carries no information), 1 when both
/// vectors are zero (identical). Clamped into [-1, 1].
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() });
    }
    let mut dot = 0.0;
    let mut norm_u = 0.0;
    let mut norm_v = 0.0;
    for (a, b) in u.iter().zip(v.iter()) {
        dot += a * b;
        norm_u += a * a;
        norm_v += b * b;
    }
    if norm_u == 0.0 && norm_v == 0.0 {
        return Ok(1.0);
    }
    if norm_u == 0.0 || norm_v == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (norm_u.sqrt() * norm_v.sqrt())).clamp(-1.0, 1.0))
}

/// Mean cosine similarity over all unordered pairs of the given centroids.
pub fn avg_sim_score(centroids: &[&[f64]]) -> Result<f64> {
    let m = centroids.len();
    if m < 2 {
        return Err(Error::Config(format!(
            "average similarity needs at least 2 centroids, got {m}"
        )));
    }
    let mut sum = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            sum += cosine_similarity(centroids[i], centroids[j])?;
        }
    }
    Ok(sum / (m * (m - 1) / 2) as f64)
}

/// Runs the k-means ensemble and scores every point.
///
/// Runs execute concurrently; each is seeded from `(base_seed, k)` only, so
/// scores do not depend on the schedule order or the worker-thread count.
pub fn score_ensemble(dataset: &Dataset, config: &EnsembleConfig) -> Result<ConsistencyScores> {
    config.validate(dataset.n())?;

    let mut runs: Vec<ClusteringResult> = config
        .k_schedule
        .par_iter()
        .map(|&k| kmeans_fit(dataset, k, per_run_seed(config.base_seed, k), &config.kmeans))
        .collect::<Result<_>>()?;
    // Score in ascending-k order no matter how the schedule was written, so
    // the pair summation order (and thus the rounding) is schedule-order
    // independent.
    runs.sort_by_key(|run| run.k);

    let scores = score_runs(dataset.n(), &runs)?;
    Ok(ConsistencyScores {
        ids: dataset.ids().to_vec(),
        scores,
        k_schedule: config.k_schedule.clone(),
        runs: config.retain_runs.then_some(runs),
    })
}

fn score_runs(n: usize, runs: &[ClusteringResult]) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let centroids: Vec<&[f64]> = runs
                .iter()
                .map(|run| {
                    run.centroids
                        .row(run.assignment[i] as usize)
                        .to_slice()
                        .expect("centroid rows are contiguous")
                })
                .collect();
            avg_sim_score(&centroids)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[1., 0., 0.], &[1., 0., 0.]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1., 0.], &[0., 1.]).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&[0., 0.], &[1., 1.]).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&[0., 0.], &[0., 0.]).unwrap(), 1.0);
        assert!(cosine_similarity(&[1.], &[1., 2.]).is_err());
    }

    #[test]
    fn avg_sim_identical_centroids() {
        let c = [3.0, -1.0, 2.0];
        assert_eq!(avg_sim_score(&[&c, &c, &c, &c]).unwrap(), 1.0);
    }

    #[test]
    fn avg_sim_orthogonal_pair() {
        assert_eq!(avg_sim_score(&[&[1., 0.], &[0., 1.]]).unwrap(), 0.0);
    }

    #[test]
    fn avg_sim_three_centroid_example() {
        let got = avg_sim_score(&[&[1., 0.], &[0., 1.], &[1., 1.]]).unwrap();
        let expected = (0.0 + std::f64::consts::FRAC_1_SQRT_2 * 2.0) / 3.0;
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn avg_sim_needs_two_centroids() {
        assert!(avg_sim_score(&[&[1., 0.][..]]).is_err());
        assert!(avg_sim_score(&[]).is_err());
    }

    #[test]
    fn avg_sim_matches_independent_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let m = rng.gen_range(2..=8);
            let d = rng.gen_range(1..=6);
            let lists: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let refs: Vec<&[f64]> = lists.iter().map(|v| v.as_slice()).collect();
            let got = avg_sim_score(&refs).unwrap();

            // independent route: raw dot/norm arithmetic over ordered pairs
            let mut total = 0.0;
            let mut pairs = 0.0;
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let dot: f64 = lists[i].iter().zip(&lists[j]).map(|(a, b)| a * b).sum();
                    let na: f64 = lists[i].iter().map(|a| a * a).sum::<f64>().sqrt();
                    let nb: f64 = lists[j].iter().map(|b| b * b).sum::<f64>().sqrt();
                    total += dot / (na * nb);
                    pairs += 1.0;
                }
            }
            let expected = total / pairs;
            assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        }
    }

    #[test]
    fn avg_sim_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lists: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let refs: Vec<&[f64]> = lists.iter().map(|v| v.as_slice()).collect();
        let base = avg_sim_score(&refs).unwrap();

        let scaled: Vec<Vec<f64>> = lists
            .iter()
            .map(|v| v.iter().map(|x| x * 37.5).collect())
            .collect();
        let scaled_refs: Vec<&[f64]> = scaled.iter().map(|v| v.as_slice()).collect();
        assert!((avg_sim_score(&scaled_refs).unwrap() - base).abs() < 1e-12);
    }

    fn blob_dataset() -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let points = Array2::from_shape_fn((30, 3), |(_, j)| {
            [5.0, 7.0, -4.0][j] + rng.gen_range(-1e-4..1e-4)
        });
        Dataset::from_points(points).unwrap()
    }

    #[test]
    fn tight_blob_scores_near_one() {
        let ds = blob_dataset();
        let config = EnsembleConfig::new(vec![2, 3, 5], 0);
        let scores = score_ensemble(&ds, &config).unwrap();
        for &s in scores.scores() {
            assert!(s >= 0.999, "score {s}");
        }
    }

    #[test]
    fn matches_hand_rolled_reference_on_tiny_input() {
        let ds = Dataset::from_points(array![
            [1.0, 2.0],
            [1.2, 1.9],
            [8.0, -3.0],
            [7.9, -2.5]
        ])
        .unwrap();
        let config = EnsembleConfig::new(vec![2, 3], 42);
        let scores = score_ensemble(&ds, &config).unwrap();

        // reference: rerun the fits and enumerate the single pair directly
        let run2 = kmeans_fit(&ds, 2, per_run_seed(42, 2), &config.kmeans).unwrap();
        let run3 = kmeans_fit(&ds, 3, per_run_seed(42, 3), &config.kmeans).unwrap();
        for i in 0..4 {
            let a = run2.centroids.row(run2.assignment[i] as usize);
            let b = run3.centroids.row(run3.assignment[i] as usize);
            let dot = a.dot(&b);
            let expected = dot / (a.dot(&a).sqrt() * b.dot(&b).sqrt());
            assert!(
                (scores.scores()[i] - expected).abs() < 1e-12,
                "point {i}: {} vs {expected}",
                scores.scores()[i]
            );
        }
    }

    #[test]
    fn schedule_order_does_not_matter() {
        let ds = blob_dataset();
        let forward = score_ensemble(&ds, &EnsembleConfig::new(vec![2, 4, 7], 3)).unwrap();
        let backward = score_ensemble(&ds, &EnsembleConfig::new(vec![7, 2, 4], 3)).unwrap();
        assert_eq!(forward.scores(), backward.scores());
    }

    #[test]
    fn scores_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let points = Array2::from_shape_fn((25, 4), |_| rng.gen_range(-10.0..10.0));
        let ds = Dataset::from_points(points).unwrap();
        let scores = score_ensemble(&ds, &EnsembleConfig::new(vec![2, 5, 9], 1)).unwrap();
        for &s in scores.scores() {
            assert!((-1.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn config_validation_rejects_bad_schedules() {
        let ds = blob_dataset();
        assert!(score_ensemble(&ds, &EnsembleConfig::new(vec![2], 0)).is_err());
        assert!(score_ensemble(&ds, &EnsembleConfig::new(vec![2, 31], 0)).is_err());
        assert!(score_ensemble(&ds, &EnsembleConfig::new(vec![1, 5], 0)).is_err());
        assert!(score_ensemble(&ds, &EnsembleConfig::new(vec![3, 3], 0)).is_err());
    }

    #[test]
    fn sorted_descending_breaks_ties_by_id() {
        let scores = ConsistencyScores {
            ids: vec![PointId(0), PointId(1), PointId(2)],
            scores: vec![0.5, 0.9, 0.5],
            k_schedule: vec![2, 3],
            runs: None,
        };
        let sorted = scores.sorted_descending();
        assert_eq!(sorted[0].0, PointId(1));
        assert_eq!(sorted[1].0, PointId(0));
        assert_eq!(sorted[2].0, PointId(2));
    }

    #[test]
    fn retained_runs_cover_the_schedule() {
        let ds = blob_dataset();
        let mut config = EnsembleConfig::new(vec![2, 3], 0);
        config.retain_runs = true;
        let scores = score_ensemble(&ds, &config).unwrap();
        let runs = scores.runs().unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].k, 2);
        assert_eq!(runs[1].k, 3);
    }
}
