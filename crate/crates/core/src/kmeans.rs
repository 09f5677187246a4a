//! Lloyd's k-means with k-means++ seeding.
//!
//! Written for the ensemble use case: many independent fits over one shared
//! read-only dataset, each fully determined by its seed. Distances are
//! squared Euclidean in the raw feature space.

use ndarray::{s, Array2, ArrayView2};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Iteration controls shared by every ensemble member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmeansOptions {
    pub max_iter: usize,
    /// Relative centroid movement (Frobenius norm of the centroid delta over
    /// the norm of the centroids) below which the fit is converged.
    pub tol: f64,
}

impl Default for KmeansOptions {
    fn default() -> Self {
        Self { max_iter: 300, tol: 1e-6 }
    }
}

/// One converged k-means run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub k: usize,
    /// k x d, row j is the centroid of cluster j.
    pub centroids: Array2<f64>,
    /// Cluster index per point, in dataset row order.
    pub assignment: Vec<u32>,
    /// Within-cluster sum of squared distances for the returned
    /// (assignment, centroids) pair.
    pub inertia: f64,
    /// Inertia recorded at each assignment step; non-increasing.
    pub inertia_history: Vec<f64>,
    pub iterations_run: usize,
    pub seed: u64,
}

impl ClusteringResult {
    /// Structured text record for audit; not a stable wire format.
    pub fn to_audit_record(&self) -> String {
        serde_json::to_string(self).expect("clustering result serializes")
    }
}

// Fixed chunk size keeps the block-multiply shapes (and therefore the
// floating-point reduction order) identical regardless of thread count.
const ASSIGN_CHUNK: usize = 512;

fn assign_chunked(
    points: ArrayView2<'_, f64>,
    centroids: ArrayView2<'_, f64>,
) -> (Vec<u32>, Vec<f64>) {
    let n = points.nrows();
    let k = centroids.nrows();
    let centroid_norms: Vec<f64> = centroids.rows().into_iter().map(|r| r.dot(&r)).collect();
    let transposed = centroids.t();

    let n_chunks = n.div_ceil(ASSIGN_CHUNK);
    let chunks: Vec<(Vec<u32>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * ASSIGN_CHUNK;
            let end = (start + ASSIGN_CHUNK).min(n);
            let block = points.slice(s![start..end, ..]);
            // ||x - c||^2 = ||x||^2 + ||c||^2 - 2 x.c; the ||x||^2 term is
            // constant per point, so the argmin only needs ||c||^2 - 2 x.c.
            let scores = block.dot(&transposed);
            let mut assignment = Vec::with_capacity(end - start);
            let mut distances = Vec::with_capacity(end - start);
            for (i, score_row) in scores.rows().into_iter().enumerate() {
                let mut best = 0usize;
                let mut best_value = centroid_norms[0] - 2.0 * score_row[0];
                for j in 1..k {
                    let value = centroid_norms[j] - 2.0 * score_row[j];
                    if value < best_value {
                        best_value = value;
                        best = j;
                    }
                }
                let x = block.row(i);
                assignment.push(best as u32);
                distances.push((x.dot(&x) + best_value).max(0.0));
            }
            (assignment, distances)
        })
        .collect();

    let mut assignment = Vec::with_capacity(n);
    let mut distances = Vec::with_capacity(n);
    for (a, d) in chunks {
        assignment.extend(a);
        distances.extend(d);
    }
    (assignment, distances)
}

/// Maps each point to its nearest centroid by squared Euclidean distance.
/// Ties break toward the lowest centroid index.
pub fn assign_nearest(
    points: ArrayView2<'_, f64>,
    centroids: ArrayView2<'_, f64>,
) -> Result<Vec<u32>> {
    if centroids.nrows() == 0 {
        return Err(Error::Config("need at least one centroid".into()));
    }
    if points.ncols() != centroids.ncols() {
        return Err(Error::DimensionMismatch {
            expected: points.ncols(),
            got: centroids.ncols(),
        });
    }
    Ok(assign_chunked(points, centroids).0)
}

fn kmeanspp_init(
    points: ArrayView2<'_, f64>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let (n, d) = points.dim();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));

    let sq_dist_to = |row: usize, target: usize| -> f64 {
        let a = points.row(row);
        let b = points.row(target);
        a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
    };

    let mut weights: Vec<f64> = (0..n).map(|i| sq_dist_to(i, chosen[0])).collect();
    while chosen.len() < k {
        let next = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(rng),
            // All remaining weights are zero (duplicate-heavy data):
            // fall back to the first index not already chosen.
            Err(_) => (0..n).find(|i| !chosen.contains(i)).unwrap_or(0),
        };
        chosen.push(next);
        weights
            .par_chunks_mut(ASSIGN_CHUNK)
            .enumerate()
            .for_each(|(chunk, slice)| {
                let base = chunk * ASSIGN_CHUNK;
                for (offset, w) in slice.iter_mut().enumerate() {
                    let dist = sq_dist_to(base + offset, next);
                    if dist < *w {
                        *w = dist;
                    }
                }
            });
    }

    let mut centroids = Array2::zeros((k, d));
    for (j, &row) in chosen.iter().enumerate() {
        centroids.row_mut(j).assign(&points.row(row));
    }
    centroids
}

/// Lloyd iterations from a k-means++ seeding until the relative centroid
/// shift drops below `tol` or `max_iter` is reached. Deterministic for a
/// fixed seed, including the number of worker threads. Clusters that empty
/// out are re-seeded with the point currently farthest from its centroid,
/// so the returned result always has k non-empty clusters.
pub fn kmeans_fit(
    dataset: &Dataset,
    k: usize,
    seed: u64,
    options: &KmeansOptions,
) -> Result<ClusteringResult> {
    let points = dataset.points();
    let n = points.nrows();
    if k < 1 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Config(format!("k = {k} exceeds the {n} points available")));
    }
    if options.max_iter < 1 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    if options.tol < 0.0 {
        return Err(Error::Config("tol must be non-negative".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeanspp_init(points, k, &mut rng);
    let mut inertia_history = Vec::new();
    let mut iterations_run = 0;

    for _ in 0..options.max_iter {
        let (assignment, distances) = assign_chunked(points, centroids.view());
        inertia_history.push(distances.iter().sum());

        let mut sums = Array2::<f64>::zeros((k, centroids.ncols()));
        let mut counts = vec![0usize; k];
        for (i, &a) in assignment.iter().enumerate() {
            counts[a as usize] += 1;
            sums.row_mut(a as usize).scaled_add(1.0, &points.row(i));
        }
        let mut new_centroids = sums;
        let mut claimable = distances;
        for j in 0..k {
            if counts[j] > 0 {
                new_centroids.row_mut(j).mapv_inplace(|v| v / counts[j] as f64);
            } else {
                // Re-seed the empty cluster at the farthest point. Assignment
                // is left alone; the next pass pulls the point over.
                let far = claimable
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i)
                    .expect("non-empty dataset");
                new_centroids.row_mut(j).assign(&points.row(far));
                claimable[far] = f64::NEG_INFINITY;
            }
        }

        let shift = (&new_centroids - &centroids).mapv(|v| v * v).sum().sqrt();
        let scale = centroids.mapv(|v| v * v).sum().sqrt();
        centroids = new_centroids;
        iterations_run += 1;
        if shift <= options.tol * scale.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    // Final assignment against the returned centroids, so the recorded
    // inertia describes exactly the (assignment, centroids) pair handed back.
    let (mut assignment, mut distances) = assign_chunked(points, centroids.view());
    let mut counts = vec![0usize; k];
    for &a in &assignment {
        counts[a as usize] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        // Duplicate-heavy data can leave a re-seeded cluster starved because
        // ties break toward a lower-index twin. Hard-assign the farthest
        // point from any cluster that can spare one, then restore the
        // means-of-members property by recomputing every centroid.
        for j in 0..k {
            while counts[j] == 0 {
                let donor = assignment
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| counts[a as usize] > 1)
                    .max_by(|a, b| distances[a.0].total_cmp(&distances[b.0]))
                    .map(|(i, _)| i)
                    .expect("k <= n guarantees a donor cluster with >= 2 points");
                counts[assignment[donor] as usize] -= 1;
                assignment[donor] = j as u32;
                counts[j] += 1;
                distances[donor] = 0.0;
            }
        }
        let mut sums = Array2::<f64>::zeros((k, centroids.ncols()));
        for (i, &a) in assignment.iter().enumerate() {
            sums.row_mut(a as usize).scaled_add(1.0, &points.row(i));
        }
        for j in 0..k {
            sums.row_mut(j).mapv_inplace(|v| v / counts[j] as f64);
        }
        centroids = sums;
        let mut inertia = 0.0;
        for (i, &a) in assignment.iter().enumerate() {
            let diff = &points.row(i) - &centroids.row(a as usize);
            inertia += diff.dot(&diff);
        }
        inertia_history.push(inertia);
        return Ok(ClusteringResult {
            k,
            centroids,
            assignment,
            inertia,
            inertia_history,
            iterations_run,
            seed,
        });
    }

    let inertia: f64 = distances.iter().sum();
    inertia_history.push(inertia);
    Ok(ClusteringResult {
        k,
        centroids,
        assignment,
        inertia,
        inertia_history,
        iterations_run,
        seed,
    })
}
