//! Threshold split into consistent/inconsistent pools, plus score
//! histograms for plotting the bucket distributions.

use serde::{Deserialize, Serialize};

use crate::dataset::PointId;
use crate::ensemble::ConsistencyScores;
use crate::error::{Error, Result};

/// How a score must relate to the threshold to land in the consistent pool.
/// Both forms exist because published splits use `>` in one place and `>=`
/// in another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    StrictGreater,
    GreaterOrEqual,
}

impl Comparator {
    pub fn keeps(self, score: f64, theta: f64) -> bool {
        match self {
            Comparator::StrictGreater => score > theta,
            Comparator::GreaterOrEqual => score >= theta,
        }
    }
}

impl std::fmt::Display for Comparator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Comparator::StrictGreater => write!(f, "gt"),
            Comparator::GreaterOrEqual => write!(f, "ge"),
        }
    }
}

impl std::str::FromStr for Comparator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gt" | ">" => Ok(Comparator::StrictGreater),
            "ge" | ">=" => Ok(Comparator::GreaterOrEqual),
            other => Err(Error::Config(format!(
                "unknown comparator {other:?} (expected gt or ge)"
            ))),
        }
    }
}

/// Partition of the point ids at a score threshold.
#[derive(Debug, Clone)]
pub struct PoolSplit {
    pub theta: f64,
    pub comparator: Comparator,
    pub consistent_ids: Vec<PointId>,
    pub inconsistent_ids: Vec<PointId>,
}

impl PoolSplit {
    pub fn n(&self) -> usize {
        self.consistent_ids.len() + self.inconsistent_ids.len()
    }
}

/// Splits the scored points into the consistent pool (score above the
/// threshold per the comparator) and its complement.
pub fn split_pools(
    scores: &ConsistencyScores,
    theta: f64,
    comparator: Comparator,
) -> Result<PoolSplit> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(Error::Config(format!(
            "threshold must be in [-1, 1], got {theta}"
        )));
    }
    let mut consistent_ids = Vec::new();
    let mut inconsistent_ids = Vec::new();
    for (&id, &score) in scores.ids().iter().zip(scores.scores()) {
        if comparator.keeps(score, theta) {
            consistent_ids.push(id);
        } else {
            inconsistent_ids.push(id);
        }
    }
    // canonical id order, so downstream training sees the same point order
    // no matter how the scores were sorted on their way in
    consistent_ids.sort_unstable();
    inconsistent_ids.sort_unstable();
    Ok(PoolSplit { theta, comparator, consistent_ids, inconsistent_ids })
}

/// Score histogram over [-1, 1]. Buckets are right-closed, `(low, high]`,
/// except the lowest which also includes -1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreHistogram {
    /// Strictly increasing bucket edges; bucket `b` spans
    /// `(bucket_edges[b], bucket_edges[b + 1]]`.
    pub bucket_edges: Vec<f64>,
    pub counts_total: Vec<usize>,
    /// Per-label counts when ground truth was supplied.
    pub counts_label1: Option<Vec<usize>>,
    pub counts_label0: Option<Vec<usize>>,
}

impl ScoreHistogram {
    pub fn buckets(&self) -> usize {
        self.counts_total.len()
    }
}

/// Buckets the scores, optionally split by binary ground-truth labels.
/// The final bucket is clipped at 1 when the width does not divide 2.
pub fn bucket_histogram(
    scores: &ConsistencyScores,
    labels: Option<&[bool]>,
    bucket_width: f64,
) -> Result<ScoreHistogram> {
    if !(bucket_width > 0.0 && bucket_width <= 2.0) {
        return Err(Error::Config(format!(
            "bucket width must be in (0, 2], got {bucket_width}"
        )));
    }
    if let Some(l) = labels {
        if l.len() != scores.len() {
            return Err(Error::Data(format!(
                "{} labels for {} scores",
                l.len(),
                scores.len()
            )));
        }
    }

    let mut bucket_edges = vec![-1.0];
    let mut i = 1usize;
    loop {
        let edge = -1.0 + i as f64 * bucket_width;
        if edge >= 1.0 - 1e-12 {
            break;
        }
        bucket_edges.push(edge);
        i += 1;
    }
    bucket_edges.push(1.0);
    let buckets = bucket_edges.len() - 1;

    let mut counts_total = vec![0usize; buckets];
    let mut counts_label1 = labels.map(|_| vec![0usize; buckets]);
    let mut counts_label0 = labels.map(|_| vec![0usize; buckets]);
    for (i, &score) in scores.scores().iter().enumerate() {
        let upper = &bucket_edges[1..];
        let bucket = upper.partition_point(|e| *e < score).min(buckets - 1);
        counts_total[bucket] += 1;
        if let Some(l) = labels {
            if l[i] {
                counts_label1.as_mut().unwrap()[bucket] += 1;
            } else {
                counts_label0.as_mut().unwrap()[bucket] += 1;
            }
        }
    }

    Ok(ScoreHistogram { bucket_edges, counts_total, counts_label1, counts_label0 })
}

/// Heuristic threshold suggestion: the midpoint of the widest gap between
/// adjacent sorted scores, considering only splits that leave at least 5%
/// of the points on each side. Isolated extreme scores otherwise own the
/// widest gaps and suggest thresholds that put everything in one pool.
/// Purely advisory; `None` when every candidate gap is zero or there are
/// fewer than two points.
pub fn suggest_threshold(scores: &ConsistencyScores) -> Option<f64> {
    let sorted = scores.sorted_descending();
    let n = sorted.len();
    if n < 2 {
        return None;
    }
    let margin = ((n as f64 * 0.05).ceil() as usize).max(1);
    let (low, high) = if 2 * margin <= n {
        (margin - 1, n - margin - 1)
    } else {
        (0, n - 2)
    };
    let mut best_gap = 0.0;
    let mut best_mid = None;
    for rank in low..=high {
        let gap = sorted[rank].1 - sorted[rank + 1].1;
        if gap > best_gap {
            best_gap = gap;
            best_mid = Some((sorted[rank].1 + sorted[rank + 1].1) / 2.0);
        }
    }
    best_mid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::ensemble::{score_ensemble, EnsembleConfig};
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scores_from(values: &[f64]) -> ConsistencyScores {
        ConsistencyScores::from_parts(
            (0..values.len() as u64).map(crate::PointId).collect(),
            values.to_vec(),
            vec![2, 3],
        )
        .unwrap()
    }

    #[test]
    fn theta_below_everything_keeps_all() {
        let s = scores_from(&[0.2, -0.5, 0.9]);
        let split = split_pools(&s, -1.0, Comparator::GreaterOrEqual).unwrap();
        assert_eq!(split.consistent_ids.len(), 3);
        assert!(split.inconsistent_ids.is_empty());
    }

    #[test]
    fn theta_at_top_with_strict_empties_consistent() {
        let s = scores_from(&[1.0, 0.3]);
        let split = split_pools(&s, 1.0, Comparator::StrictGreater).unwrap();
        assert!(split.consistent_ids.is_empty());
        assert_eq!(split.inconsistent_ids.len(), 2);
    }

    #[test]
    fn comparator_distinguishes_boundary_scores() {
        let s = scores_from(&[0.5, 0.4]);
        let ge = split_pools(&s, 0.5, Comparator::GreaterOrEqual).unwrap();
        assert_eq!(ge.consistent_ids.len(), 1);
        let gt = split_pools(&s, 0.5, Comparator::StrictGreater).unwrap();
        assert!(gt.consistent_ids.is_empty());
    }

    #[test]
    fn theta_out_of_range_is_rejected() {
        let s = scores_from(&[0.0]);
        assert!(split_pools(&s, 1.1, Comparator::GreaterOrEqual).is_err());
        assert!(split_pools(&s, -1.0001, Comparator::StrictGreater).is_err());
    }

    #[test]
    fn splits_nest_monotonically() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = scores_from(&values);
        for comparator in [Comparator::StrictGreater, Comparator::GreaterOrEqual] {
            let mut previous: Option<std::collections::HashSet<_>> = None;
            for step in 0..10 {
                let theta = -1.0 + 0.2 * step as f64;
                let split = split_pools(&s, theta, comparator).unwrap();
                let current: std::collections::HashSet<_> =
                    split.consistent_ids.iter().copied().collect();
                if let Some(prev) = &previous {
                    assert!(current.is_subset(prev), "theta {theta}");
                }
                previous = Some(current);
            }
        }
    }

    #[test]
    fn histogram_single_top_bucket() {
        let s = scores_from(&[1.0, 1.0, 1.0]);
        let h = bucket_histogram(&s, None, 0.1).unwrap();
        assert_eq!(h.buckets(), 20);
        assert_eq!(*h.counts_total.last().unwrap(), 3);
        assert_eq!(h.counts_total.iter().sum::<usize>(), 3);
    }

    #[test]
    fn histogram_hand_bucketed_example() {
        let s = scores_from(&[0.95, 0.55, 0.55, -0.2]);
        let h = bucket_histogram(&s, None, 0.5).unwrap();
        assert_eq!(h.bucket_edges, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(h.counts_total, vec![0, 1, 0, 3]);
    }

    #[test]
    fn histogram_is_order_invariant() {
        let forward = scores_from(&[0.9, 0.1, -0.4, 0.3]);
        let shuffled = scores_from(&[0.3, -0.4, 0.9, 0.1]);
        let a = bucket_histogram(&forward, None, 0.25).unwrap();
        let b = bucket_histogram(&shuffled, None, 0.25).unwrap();
        assert_eq!(a.counts_total, b.counts_total);
    }

    #[test]
    fn histogram_splits_by_label() {
        let s = scores_from(&[0.9, 0.8, -0.9]);
        let labels = [true, true, false];
        let h = bucket_histogram(&s, Some(&labels), 1.0).unwrap();
        assert_eq!(h.counts_label1.unwrap(), vec![0, 2]);
        assert_eq!(h.counts_label0.unwrap(), vec![1, 0]);
        assert_eq!(h.counts_total, vec![1, 2]);
    }

    #[test]
    fn histogram_boundary_scores() {
        // right-closed buckets: -1 stays in the lowest, interior edges go down
        let s = scores_from(&[-1.0, -0.5, 0.0, 1.0]);
        let h = bucket_histogram(&s, None, 0.5).unwrap();
        assert_eq!(h.counts_total, vec![2, 1, 0, 1]);
    }

    #[test]
    fn histogram_rejects_bad_width() {
        let s = scores_from(&[0.0]);
        assert!(bucket_histogram(&s, None, 0.0).is_err());
        assert!(bucket_histogram(&s, None, 2.5).is_err());
    }

    #[test]
    fn suggested_threshold_sits_in_widest_gap() {
        let s = scores_from(&[1.0, 0.9, 0.2, 0.1]);
        let theta = suggest_threshold(&s).unwrap();
        assert!((theta - 0.55).abs() < 1e-12);
        assert!(suggest_threshold(&scores_from(&[0.4, 0.4, 0.4])).is_none());
        assert!(suggest_threshold(&scores_from(&[0.4])).is_none());
    }

    #[test]
    fn end_to_end_split_covers_every_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let points = Array2::from_shape_fn((20, 3), |_| rng.gen_range(-4.0..4.0));
        let ds = Dataset::from_points(points).unwrap();
        let scores = score_ensemble(&ds, &EnsembleConfig::new(vec![2, 4], 0)).unwrap();
        let split = split_pools(&scores, 0.3, Comparator::GreaterOrEqual).unwrap();
        assert_eq!(split.n(), 20);
    }
}
