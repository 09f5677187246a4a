//! One-class support vector machine trained by pairwise (SMO-style)
//! coordinate descent on the dual:
//!
//! minimize `0.5 a' K a` subject to `0 <= a_i <= 1/(nu n)` and `sum a = 1`.
//!
//! The decision function is `f(x) = sum_i a_i k(s_i, x) - rho`; points with
//! `f(x) < 0` are outliers. `nu` upper-bounds the fraction of training
//! points scored as outliers and lower-bounds the support-vector fraction.

use ndarray::{s, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Polynomial,
    Rbf,
    Linear,
}

/// Kernel family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub kind: KernelKind,
    pub degree: u32,
    pub gamma: f64,
    pub coef0: f64,
}

impl KernelParams {
    /// `(gamma <x, y> + coef0)^degree`
    pub fn polynomial(degree: u32, gamma: f64, coef0: f64) -> Self {
        Self { kind: KernelKind::Polynomial, degree, gamma, coef0 }
    }

    /// `exp(-gamma ||x - y||^2)`
    pub fn rbf(gamma: f64) -> Self {
        Self { kind: KernelKind::Rbf, degree: 1, gamma, coef0: 0.0 }
    }

    pub fn linear() -> Self {
        Self { kind: KernelKind::Linear, degree: 1, gamma: 1.0, coef0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.degree < 1 {
            return Err(Error::Config("kernel degree must be at least 1".into()));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match self.kind {
            KernelKind::Linear => dot(x, y),
            KernelKind::Polynomial => {
                (self.gamma * dot(x, y) + self.coef0).powi(self.degree as i32)
            }
            KernelKind::Rbf => {
                let mut dist = 0.0;
                for (a, b) in x.iter().zip(y) {
                    dist += (a - b) * (a - b);
                }
                (-self.gamma * dist).exp()
            }
        }
    }

    /// Kernel value reconstructed from a precomputed inner product and the
    /// two squared norms; used when the Gram matrix comes out of a block
    /// matrix multiply.
    fn from_dot(&self, xy: f64, xx: f64, yy: f64) -> f64 {
        match self.kind {
            KernelKind::Linear => xy,
            KernelKind::Polynomial => (self.gamma * xy + self.coef0).powi(self.degree as i32),
            KernelKind::Rbf => (-self.gamma * (xx + yy - 2.0 * xy).max(0.0)).exp(),
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Solver configuration for [`ocsvm_train`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcsvmConfig {
    /// In (0, 1]: caps the training-outlier fraction, floors the
    /// support-vector fraction.
    pub nu: f64,
    pub kernel: KernelParams,
    /// KKT stopping tolerance. Applied relative to the gradient magnitude
    /// once that exceeds unit scale, so unscaled feature spaces with huge
    /// kernel values still terminate.
    pub tol: f64,
    /// One pass is `n` pair updates; training aborts with a convergence
    /// error after this many passes.
    pub max_passes: usize,
    /// Full Gram caching limit; larger training sets recompute rows on
    /// demand.
    pub cache_cap: usize,
}

impl OcsvmConfig {
    pub fn new(nu: f64, kernel: KernelParams) -> Self {
        Self { nu, kernel, tol: 1e-3, max_passes: 300, cache_cap: 8192 }
    }
}

/// Trained one-class SVM.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OcsvmModel {
    support_vectors: Array2<f64>,
    dual_coefficients: Vec<f64>,
    rho: f64,
    nu: f64,
    kernel: KernelParams,
    /// Training-set row of each support vector, for audit.
    support_indices: Vec<usize>,
    n_train: usize,
    dual_objective: f64,
}

impl OcsvmModel {
    pub fn support_vectors(&self) -> ArrayView2<'_, f64> {
        self.support_vectors.view()
    }

    pub fn dual_coefficients(&self) -> &[f64] {
        &self.dual_coefficients
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    /// `0.5 a' K a` at the returned solution.
    pub fn dual_objective(&self) -> f64 {
        self.dual_objective
    }

    /// `sum_i a_i k(s_i, x) - rho`; negative means outlier.
    pub fn decision(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        if x.len() != self.support_vectors.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.support_vectors.ncols(),
                got: x.len(),
            });
        }
        let x = x.to_slice().map(|s| s.to_vec()).unwrap_or_else(|| x.to_vec());
        let mut value = 0.0;
        for (row, &alpha) in self.support_vectors.rows().into_iter().zip(&self.dual_coefficients) {
            value += alpha * self.kernel.eval(row.to_slice().expect("contiguous"), &x);
        }
        Ok(value - self.rho)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: OcsvmModel = serde_json::from_str(text)?;
        if model.dual_coefficients.len() != model.support_vectors.nrows() {
            return Err(Error::Data(
                "dual coefficient count does not match support vectors".into(),
            ));
        }
        model.kernel.validate()?;
        Ok(model)
    }
}

/// Gram matrix access: fully cached below the cap, rows recomputed on
/// demand above it.
enum Gram<'a> {
    Cached(Array2<f64>),
    OnDemand { points: ArrayView2<'a, f64>, kernel: KernelParams, norms: Vec<f64> },
}

impl Gram<'_> {
    fn row<'s>(&'s self, i: usize, buf: &'s mut Vec<f64>) -> &'s [f64] {
        match self {
            Gram::Cached(gram) => gram.row(i).to_slice().expect("contiguous"),
            Gram::OnDemand { points, kernel, norms } => {
                let n = points.nrows();
                buf.resize(n, 0.0);
                let xi = points.row(i);
                let xi = xi.to_slice().expect("contiguous");
                for j in 0..n {
                    let xj = points.row(j);
                    let xj = xj.to_slice().expect("contiguous");
                    buf[j] = kernel.from_dot(dot(xi, xj), norms[i], norms[j]);
                }
                buf
            }
        }
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        match self {
            Gram::Cached(gram) => gram[[i, j]],
            Gram::OnDemand { points, kernel, norms } => {
                let xi = points.row(i);
                let xj = points.row(j);
                kernel.from_dot(
                    dot(xi.to_slice().expect("contiguous"), xj.to_slice().expect("contiguous")),
                    norms[i],
                    norms[j],
                )
            }
        }
    }

    fn diag(&self, i: usize) -> f64 {
        match self {
            Gram::Cached(gram) => gram[[i, i]],
            Gram::OnDemand { kernel, norms, .. } => {
                kernel.from_dot(norms[i], norms[i], norms[i])
            }
        }
    }
}

const GRAM_CHUNK: usize = 256;

fn build_gram(points: ArrayView2<'_, f64>, kernel: &KernelParams) -> Array2<f64> {
    let n = points.nrows();
    let norms: Vec<f64> = points.rows().into_iter().map(|r| r.dot(&r)).collect();
    let mut gram = Array2::<f64>::zeros((n, n));
    // Fixed-size row blocks keep the multiply shapes, and therefore the
    // float rounding, independent of the thread count.
    gram.axis_chunks_iter_mut(Axis(0), GRAM_CHUNK)
        .into_par_iter()
        .enumerate()
        .for_each(|(block, mut out)| {
            let start = block * GRAM_CHUNK;
            let end = (start + out.nrows()).min(n);
            let products = points.slice(s![start..end, ..]).dot(&points.t());
            for (local, mut row) in out.rows_mut().into_iter().enumerate() {
                let i = start + local;
                for j in 0..n {
                    row[j] = kernel.from_dot(products[[local, j]], norms[i], norms[j]);
                }
            }
        });
    gram
}

/// Solves the one-class dual by maximal-violating-pair coordinate descent.
///
/// Starts from the standard feasible point (the first `floor(nu n)` points
/// at the upper bound, the remainder on the next) and repeats: pick the
/// pair (i, j) with the largest KKT violation, minimize the objective along
/// `e_i - e_j` subject to the box, update the gradient. A seeded random
/// pair takes over if the maximal pair cannot move.
pub fn ocsvm_train(consistent: &Dataset, config: &OcsvmConfig) -> Result<OcsvmModel> {
    let points = consistent.points();
    let n = points.nrows();
    if n < 2 {
        return Err(Error::Data(format!("need at least 2 training points, got {n}")));
    }
    if !(config.nu > 0.0 && config.nu <= 1.0) {
        return Err(Error::Config(format!("nu must be in (0, 1], got {}", config.nu)));
    }
    config.kernel.validate()?;
    if config.max_passes < 1 {
        return Err(Error::Config("max_passes must be at least 1".into()));
    }

    let gram = if n <= config.cache_cap {
        Gram::Cached(build_gram(points, &config.kernel))
    } else {
        let norms = points.rows().into_iter().map(|r| r.dot(&r)).collect();
        Gram::OnDemand { points, kernel: config.kernel, norms }
    };
    for i in 0..n {
        let diag = gram.diag(i);
        if diag < -1e-10 || !diag.is_finite() {
            return Err(Error::KernelNotPsd(format!(
                "k(x, x) = {diag:.3e} for training point {i}"
            )));
        }
    }

    let upper = 1.0 / (config.nu * n as f64);
    let mut alpha = vec![0.0f64; n];
    let filled = (config.nu * n as f64).floor() as usize;
    for a in alpha.iter_mut().take(filled.min(n)) {
        *a = upper;
    }
    if filled < n {
        alpha[filled] = (config.nu * n as f64 - filled as f64) * upper;
    }

    let mut row_i = Vec::new();
    let mut row_j = Vec::new();

    // gradient of the objective: g = K alpha, built from the nonzero block
    let mut gradient = vec![0.0f64; n];
    for (j, &aj) in alpha.iter().enumerate() {
        if aj > 0.0 {
            let row = gram.row(j, &mut row_i);
            for (g, &k) in gradient.iter_mut().zip(row) {
                *g += aj * k;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x0c5d);
    let max_iterations = config.max_passes.saturating_mul(n);
    let mut converged = false;
    let mut last_violation = f64::INFINITY;

    for _ in 0..max_iterations {
        // maximal violating pair: raise the smallest gradient among the
        // raisable, lower the largest among the lowerable
        let mut up = usize::MAX;
        let mut down = usize::MAX;
        for t in 0..n {
            if alpha[t] < upper && (up == usize::MAX || gradient[t] < gradient[up]) {
                up = t;
            }
            if alpha[t] > 0.0 && (down == usize::MAX || gradient[t] > gradient[down]) {
                down = t;
            }
        }
        if up == usize::MAX || down == usize::MAX {
            converged = true;
            last_violation = 0.0;
            break;
        }
        let violation = gradient[down] - gradient[up];
        last_violation = violation;
        let scale = 1.0f64.max(gradient[up].abs()).max(gradient[down].abs());
        if violation <= config.tol * scale {
            converged = true;
            break;
        }

        let mut i = up;
        let mut j = down;
        let mut step = proposed_step(&gram, &gradient, &alpha, upper, i, j);
        if step <= 0.0 {
            // stagnant maximal pair; retry on random feasible pairs
            for _ in 0..32 {
                let ci = rng.gen_range(0..n);
                let cj = rng.gen_range(0..n);
                if ci == cj || alpha[ci] >= upper || alpha[cj] <= 0.0 {
                    continue;
                }
                if gradient[cj] - gradient[ci] <= 0.0 {
                    continue;
                }
                step = proposed_step(&gram, &gradient, &alpha, upper, ci, cj);
                if step > 0.0 {
                    i = ci;
                    j = cj;
                    break;
                }
            }
            if step <= 0.0 {
                break;
            }
        }

        let ki = gram.row(i, &mut row_i);
        let kj = gram.row(j, &mut row_j);
        for (t, g) in gradient.iter_mut().enumerate() {
            *g += step * (ki[t] - kj[t]);
        }
        // snap exactly onto a hit bound so margin detection stays exact
        if step >= upper - alpha[i] {
            alpha[i] = upper;
        } else {
            alpha[i] += step;
        }
        if step >= alpha[j] {
            alpha[j] = 0.0;
        } else {
            alpha[j] -= step;
        }
    }

    if !converged {
        return Err(Error::Convergence {
            passes: config.max_passes,
            violation: last_violation,
            tol: config.tol,
        });
    }

    // Rebuild the gradient from scratch at the solution; the incremental
    // updates drift over long runs and rho is read straight off it.
    let mut exact = vec![0.0f64; n];
    for (j, &aj) in alpha.iter().enumerate() {
        if aj > 0.0 {
            let row = gram.row(j, &mut row_i);
            for (g, &k) in exact.iter_mut().zip(row) {
                *g += aj * k;
            }
        }
    }
    let gradient = exact;

    // rho is the smallest margin-vector gradient rather than their mean, so
    // solver-tolerance noise never pushes a margin vector below the
    // boundary and the nu-property holds with 1/n slack.
    let margin: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0 && alpha[t] < upper).collect();
    let rho = if !margin.is_empty() {
        margin.iter().map(|&t| gradient[t]).fold(f64::INFINITY, f64::min)
    } else {
        let at_upper = (0..n).filter(|&t| alpha[t] >= upper).map(|t| gradient[t]);
        let at_zero = (0..n).filter(|&t| alpha[t] <= 0.0).map(|t| gradient[t]);
        let hi = at_upper.fold(None::<f64>, |m, g| Some(m.map_or(g, |m| m.max(g))));
        let lo = at_zero.fold(None::<f64>, |m, g| Some(m.map_or(g, |m| m.min(g))));
        match (hi, lo) {
            (Some(h), Some(l)) => 0.5 * (h + l),
            (Some(h), None) => h,
            (None, Some(l)) => l,
            (None, None) => unreachable!("alpha sums to 1"),
        }
    };

    let objective = 0.5 * alpha.iter().zip(&gradient).map(|(a, g)| a * g).sum::<f64>();

    let support_indices: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    let mut support_vectors = Array2::zeros((support_indices.len(), points.ncols()));
    let mut dual_coefficients = Vec::with_capacity(support_indices.len());
    for (row, &idx) in support_indices.iter().enumerate() {
        support_vectors.row_mut(row).assign(&points.row(idx));
        dual_coefficients.push(alpha[idx]);
    }

    Ok(OcsvmModel {
        support_vectors,
        dual_coefficients,
        rho,
        nu: config.nu,
        kernel: config.kernel,
        support_indices,
        n_train: n,
        dual_objective: objective,
    })
}

/// Largest feasible step along `e_i - e_j`, after exact line minimization.
fn proposed_step(
    gram: &Gram<'_>,
    gradient: &[f64],
    alpha: &[f64],
    upper: f64,
    i: usize,
    j: usize,
) -> f64 {
    let curvature = gram.diag(i) + gram.diag(j) - 2.0 * gram.value(i, j);
    let gain = gradient[j] - gradient[i];
    let unconstrained = if curvature > 1e-12 { gain / curvature } else { f64::INFINITY };
    unconstrained.min(upper - alpha[i]).min(alpha[j]).max(0.0)
}

/// Per-point verdict from [`ocsvm_predict`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcsvmPrediction {
    pub decision: f64,
    pub is_outlier: bool,
}

/// Applies the decision function to every row; negative means outlier.
pub fn ocsvm_predict(
    points: ArrayView2<'_, f64>,
    model: &OcsvmModel,
) -> Result<Vec<OcsvmPrediction>> {
    if points.ncols() != model.support_vectors.ncols() {
        return Err(Error::DimensionMismatch {
            expected: model.support_vectors.ncols(),
            got: points.ncols(),
        });
    }
    (0..points.nrows())
        .into_par_iter()
        .map(|i| {
            let decision = model.decision(points.row(i))?;
            Ok(OcsvmPrediction { decision, is_outlier: decision < 0.0 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly_default(d: usize) -> KernelParams {
        KernelParams::polynomial(3, 1.0 / d as f64, 0.0)
    }

    fn feasible(model: &OcsvmModel, n: usize, nu: f64) {
        let upper = 1.0 / (nu * n as f64);
        let sum: f64 = model.dual_coefficients().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6, "sum alpha = {sum}");
        for &a in model.dual_coefficients() {
            assert!(a > 0.0 && a <= upper + 1e-12, "alpha {a} outside (0, {upper}]");
        }
    }

    #[test]
    fn identical_points_are_inliers() {
        let points = Array2::from_shape_fn((4, 3), |(_, j)| [1.0, -2.0, 0.5][j]);
        let ds = Dataset::from_points(points.clone()).unwrap();
        for nu in [0.1, 0.5, 1.0] {
            let model = ocsvm_train(&ds, &OcsvmConfig::new(nu, poly_default(3))).unwrap();
            for i in 0..4 {
                let d = model.decision(points.row(i)).unwrap();
                assert!(d >= 0.0, "nu {nu}: decision {d}");
            }
            feasible(&model, 4, nu);
        }
    }

    #[test]
    fn far_point_is_an_outlier() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points = Array2::from_shape_fn((20, 2), |(_, j)| {
            [3.0, 4.0][j] + rng.gen_range(-0.2..0.2)
        });
        let ds = Dataset::from_points(points).unwrap();

        let rbf = ocsvm_train(&ds, &OcsvmConfig::new(0.5, KernelParams::rbf(0.5))).unwrap();
        let far = rbf.decision(array![300.0, 400.0].view()).unwrap();
        assert!(far < 0.0, "rbf decision {far}");

        let poly = ocsvm_train(&ds, &OcsvmConfig::new(0.5, poly_default(2))).unwrap();
        let opposite = poly.decision(array![-300.0, -400.0].view()).unwrap();
        assert!(opposite < 0.0, "polynomial decision {opposite}");
    }

    #[test]
    fn margin_support_vectors_sit_on_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let points = Array2::from_shape_fn((30, 2), |_| rng.gen_range(-1.0..1.0));
        let ds = Dataset::from_points(points.clone()).unwrap();
        let config = OcsvmConfig {
            tol: 1e-6,
            max_passes: 3000,
            ..OcsvmConfig::new(0.5, poly_default(2))
        };
        let model = ocsvm_train(&ds, &config).unwrap();

        let upper = 1.0 / (0.5 * 30.0);
        let mut checked = 0;
        for (pos, &idx) in model.support_indices().iter().enumerate() {
            let a = model.dual_coefficients()[pos];
            if a > 0.0 && a < upper {
                let d = model.decision(points.row(idx)).unwrap();
                assert!(d.abs() < config.tol * 10.0, "margin sv {idx}: decision {d}");
                checked += 1;
            }
        }
        assert!(checked > 0, "no margin support vectors to check");
    }

    #[test]
    fn nu_property_holds_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..15 {
            let n = rng.gen_range(10..=50);
            let nu = rng.gen_range(0.15..0.9);
            let points = Array2::from_shape_fn((n, 3), |_| rng.gen_range(-2.0..2.0));
            let ds = Dataset::from_points(points.clone()).unwrap();
            let config = OcsvmConfig {
                tol: 1e-5,
                max_passes: 3000,
                ..OcsvmConfig::new(nu, poly_default(3))
            };
            let model = ocsvm_train(&ds, &config).unwrap();
            feasible(&model, n, nu);

            let slack = 1.0 / n as f64;
            let outlier_fraction = (0..n)
                .filter(|&i| model.decision(points.row(i)).unwrap() < 0.0)
                .count() as f64
                / n as f64;
            let sv_fraction = model.support_indices().len() as f64 / n as f64;
            assert!(
                outlier_fraction <= nu + slack,
                "trial {trial}: outlier fraction {outlier_fraction} vs nu {nu}"
            );
            assert!(
                sv_fraction >= nu - slack,
                "trial {trial}: sv fraction {sv_fraction} vs nu {nu}"
            );
        }
    }

    #[test]
    fn training_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let points = Array2::from_shape_fn((25, 2), |_| rng.gen_range(-1.0..1.0));
        let ds = Dataset::from_points(points).unwrap();
        let config = OcsvmConfig::new(0.4, poly_default(2));
        let a = ocsvm_train(&ds, &config).unwrap();
        let b = ocsvm_train(&ds, &config).unwrap();
        assert_eq!(a.rho().to_bits(), b.rho().to_bits());
        assert_eq!(a.dual_coefficients(), b.dual_coefficients());
        assert_eq!(a.support_indices(), b.support_indices());
    }

    #[test]
    fn cached_and_on_demand_gram_agree() {
        // The two paths accumulate kernel values in different orders, so
        // agreement is behavioral (objective and decisions), not bitwise.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let points = Array2::from_shape_fn((18, 3), |_| rng.gen_range(-1.0..1.0));
        let ds = Dataset::from_points(points.clone()).unwrap();
        let cached = OcsvmConfig {
            tol: 1e-8,
            max_passes: 3000,
            ..OcsvmConfig::new(0.5, poly_default(3))
        };
        let uncached = OcsvmConfig { cache_cap: 4, ..cached };
        let a = ocsvm_train(&ds, &cached).unwrap();
        let b = ocsvm_train(&ds, &uncached).unwrap();
        assert!(
            (a.dual_objective() - b.dual_objective()).abs() < 1e-8,
            "objectives {} vs {}",
            a.dual_objective(),
            b.dual_objective()
        );
        for i in 0..points.nrows() {
            let da = a.decision(points.row(i)).unwrap();
            let db = b.decision(points.row(i)).unwrap();
            assert!((da - db).abs() < 1e-6, "point {i}: {da} vs {db}");
        }
    }

    #[test]
    fn non_psd_kernel_is_rejected() {
        let points = array![[0.1, 0.1], [0.2, 0.1], [0.1, 0.2]];
        let ds = Dataset::from_points(points).unwrap();
        let kernel = KernelParams::polynomial(3, 1.0, -5.0);
        assert!(matches!(
            ocsvm_train(&ds, &OcsvmConfig::new(0.5, kernel)),
            Err(Error::KernelNotPsd(_))
        ));
    }

    #[test]
    fn zero_max_passes_budget_reports_convergence_failure() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // spread-out data with a tight tolerance and a 1-pass budget
        let points = Array2::from_shape_fn((60, 4), |_| rng.gen_range(-5.0..5.0));
        let ds = Dataset::from_points(points).unwrap();
        let config = OcsvmConfig {
            tol: 1e-14,
            max_passes: 1,
            ..OcsvmConfig::new(0.9, KernelParams::rbf(10.0))
        };
        match ocsvm_train(&ds, &config) {
            Err(Error::Convergence { passes, violation, .. }) => {
                assert_eq!(passes, 1);
                assert!(violation > 0.0);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn predict_flags_match_decision_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let points = Array2::from_shape_fn((20, 2), |_| rng.gen_range(-1.0..1.0));
        let ds = Dataset::from_points(points.clone()).unwrap();
        let model = ocsvm_train(&ds, &OcsvmConfig::new(0.5, poly_default(2))).unwrap();
        let preds = ocsvm_predict(points.view(), &model).unwrap();
        for (i, p) in preds.iter().enumerate() {
            assert_eq!(p.is_outlier, p.decision < 0.0, "point {i}");
        }
        let mismatched = Array2::<f64>::zeros((2, 5));
        assert!(ocsvm_predict(mismatched.view(), &model).is_err());
    }

    #[test]
    fn json_round_trip_preserves_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let points = Array2::from_shape_fn((15, 3), |_| rng.gen_range(-1.0..1.0));
        let ds = Dataset::from_points(points.clone()).unwrap();
        let model = ocsvm_train(&ds, &OcsvmConfig::new(0.3, poly_default(3))).unwrap();
        let reloaded = OcsvmModel::from_json(&model.to_json().unwrap()).unwrap();
        for i in 0..points.nrows() {
            let a = model.decision(points.row(i)).unwrap();
            let b = reloaded.decision(points.row(i)).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn gram_symmetry_and_kernel_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let points = Array2::from_shape_fn((12, 4), |_| rng.gen_range(-2.0..2.0));
        let kernel = poly_default(4);
        let gram = build_gram(points.view(), &kernel);
        for i in 0..12 {
            for j in 0..12 {
                assert!((gram[[i, j]] - gram[[j, i]]).abs() < 1e-9);
                let direct = kernel.eval(
                    points.row(i).to_slice().unwrap(),
                    points.row(j).to_slice().unwrap(),
                );
                assert!((gram[[i, j]] - direct).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let ds = Dataset::from_points(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(ocsvm_train(&ds, &OcsvmConfig::new(0.0, poly_default(2))).is_err());
        assert!(ocsvm_train(&ds, &OcsvmConfig::new(1.5, poly_default(2))).is_err());
        let bad_gamma = KernelParams::polynomial(3, 0.0, 0.0);
        assert!(ocsvm_train(&ds, &OcsvmConfig::new(0.5, bad_gamma)).is_err());
        let one_point = Dataset::from_points(array![[1.0, 2.0]]).unwrap();
        assert!(ocsvm_train(&one_point, &OcsvmConfig::new(0.5, poly_default(2))).is_err());
    }
}
