//! One-class detector backed by a multivariate Gaussian: fit mean and
//! regularized covariance on the consistent pool, flag points whose
//! Mahalanobis distance exceeds a chi-square-derived threshold.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Fit controls for [`fit_gaussian`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianConfig {
    /// Shrinkage toward the diagonal of the sample covariance, in [0, 1].
    pub lambda: f64,
    /// Ridge added to the diagonal. `None` scales with the data:
    /// `1e-6 * trace(S) / d`.
    pub epsilon: Option<f64>,
    /// Chi-square quantile that sets the distance threshold.
    pub quantile: f64,
}

impl Default for GaussianConfig {
    fn default() -> Self {
        Self { lambda: 0.1, epsilon: None, quantile: 0.975 }
    }
}

/// Fitted Gaussian model. The covariance here is the regularized one,
/// `(1 - lambda) S + lambda diag(S) + epsilon I`.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    mean: Array1<f64>,
    covariance: Array2<f64>,
    precision: Array2<f64>,
    distance_threshold: f64,
    lambda: f64,
    epsilon: f64,
    quantile: f64,
}

/// Wire format: everything except the precision, which is recomputed on
/// load so the two matrices can never drift apart.
#[derive(Serialize, Deserialize)]
struct GaussianModelRecord {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    distance_threshold: f64,
    lambda: f64,
    epsilon: f64,
    quantile: f64,
}

impl GaussianModel {
    /// Builds a model from an explicit mean and SPD covariance. The
    /// threshold comes from the chi-square quantile at the matrix dimension.
    pub fn from_parts(
        mean: Array1<f64>,
        covariance: Array2<f64>,
        lambda: f64,
        epsilon: f64,
        quantile: f64,
    ) -> Result<Self> {
        let d = mean.len();
        if covariance.dim() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, got: covariance.nrows() });
        }
        let precision = spd_inverse(&covariance)?;
        let distance_threshold = chi_square_quantile(d, quantile)?.sqrt();
        Ok(Self {
            mean,
            covariance,
            precision,
            distance_threshold,
            lambda,
            epsilon,
            quantile,
        })
    }

    pub fn mean(&self) -> ArrayView1<'_, f64> {
        self.mean.view()
    }

    pub fn covariance(&self) -> ArrayView2<'_, f64> {
        self.covariance.view()
    }

    pub fn precision(&self) -> ArrayView2<'_, f64> {
        self.precision.view()
    }

    pub fn distance_threshold(&self) -> f64 {
        self.distance_threshold
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn quantile(&self) -> f64 {
        self.quantile
    }

    /// Overrides the fitted threshold (audit and what-if runs).
    pub fn with_distance_threshold(mut self, threshold: f64) -> Self {
        self.distance_threshold = threshold;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let record = GaussianModelRecord {
            mean: self.mean.to_vec(),
            covariance: self.covariance.rows().into_iter().map(|r| r.to_vec()).collect(),
            distance_threshold: self.distance_threshold,
            lambda: self.lambda,
            epsilon: self.epsilon,
            quantile: self.quantile,
        };
        Ok(serde_json::to_string_pretty(&record)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: GaussianModelRecord = serde_json::from_str(text)?;
        let d = record.mean.len();
        let mut covariance = Array2::zeros((d, d));
        if record.covariance.len() != d {
            return Err(Error::Data("covariance rows do not match mean length".into()));
        }
        for (i, row) in record.covariance.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Data("covariance is not square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                covariance[[i, j]] = v;
            }
        }
        let precision = spd_inverse(&covariance)?;
        Ok(Self {
            mean: Array1::from_vec(record.mean),
            covariance,
            precision,
            distance_threshold: record.distance_threshold,
            lambda: record.lambda,
            epsilon: record.epsilon,
            quantile: record.quantile,
        })
    }
}

fn chi_square_quantile(d: usize, quantile: f64) -> Result<f64> {
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::Config(format!(
            "quantile must be in (0, 1), got {quantile}"
        )));
    }
    let dist = ChiSquared::new(d as f64)
        .map_err(|e| Error::Config(format!("chi-square with {d} dof: {e}")))?;
    Ok(dist.inverse_cdf(quantile))
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
fn cholesky(matrix: &Array2<f64>) -> Result<Array2<f64>> {
    let d = matrix.nrows();
    let mut factor = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let mut sum = matrix[[i, j]];
            for k in 0..j {
                sum -= factor[[i, k]] * factor[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::SingularCovariance(format!(
                        "pivot {sum:.3e} at row {i}; increase the ridge epsilon \
                         or the shrinkage lambda"
                    )));
                }
                factor[[i, i]] = sum.sqrt();
            } else {
                factor[[i, j]] = sum / factor[[j, j]];
            }
        }
    }
    Ok(factor)
}

/// Inverse of an SPD matrix via its Cholesky factor.
fn spd_inverse(matrix: &Array2<f64>) -> Result<Array2<f64>> {
    let factor = cholesky(matrix)?;
    let d = matrix.nrows();

    // Invert the lower-triangular factor by forward substitution.
    let mut inv_factor = Array2::<f64>::zeros((d, d));
    for j in 0..d {
        inv_factor[[j, j]] = 1.0 / factor[[j, j]];
        for i in (j + 1)..d {
            let mut sum = 0.0;
            for k in j..i {
                sum += factor[[i, k]] * inv_factor[[k, j]];
            }
            inv_factor[[i, j]] = -sum / factor[[i, i]];
        }
    }

    // precision = L^-T L^-1, then symmetrize against rounding.
    let mut precision = inv_factor.t().dot(&inv_factor);
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (precision[[i, j]] + precision[[j, i]]);
            precision[[i, j]] = v;
            precision[[j, i]] = v;
        }
    }
    Ok(precision)
}

/// Fits the Gaussian on the consistent pool.
///
/// The covariance is the sample covariance shrunk toward its diagonal and
/// ridged: `(1 - lambda) S + lambda diag(S) + epsilon I`. The distance
/// threshold is the square root of the chi-square quantile with d degrees
/// of freedom, since squared Mahalanobis distances of Gaussian data follow
/// chi-square(d).
pub fn fit_gaussian(consistent: &Dataset, config: &GaussianConfig) -> Result<GaussianModel> {
    let n = consistent.n();
    let d = consistent.dim();
    if n < 2 {
        return Err(Error::Data(format!(
            "need at least 2 points to fit a covariance, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&config.lambda) {
        return Err(Error::Config(format!(
            "lambda must be in [0, 1], got {}",
            config.lambda
        )));
    }
    if let Some(e) = config.epsilon {
        if e < 0.0 || !e.is_finite() {
            return Err(Error::Config(format!("epsilon must be finite and >= 0, got {e}")));
        }
    }

    let points = consistent.points();
    let mean: Array1<f64> = points.mean_axis(ndarray::Axis(0)).expect("n >= 2");
    let centered = &points - &mean.view().insert_axis(ndarray::Axis(0));
    let mut sample = centered.t().dot(&centered) / (n as f64 - 1.0);
    // symmetrize; the product picks up rounding noise
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (sample[[i, j]] + sample[[j, i]]);
            sample[[i, j]] = v;
            sample[[j, i]] = v;
        }
    }

    let trace: f64 = sample.diag().sum();
    let epsilon = config.epsilon.unwrap_or(1e-6 * trace / d as f64);

    let mut covariance = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            let shrunk = if i == j {
                sample[[i, j]]
            } else {
                (1.0 - config.lambda) * sample[[i, j]]
            };
            covariance[[i, j]] = shrunk + if i == j { epsilon } else { 0.0 };
        }
    }

    GaussianModel::from_parts(mean, covariance, config.lambda, epsilon, config.quantile)
}

/// `sqrt((x - mean)^T precision (x - mean))`.
pub fn mahalanobis_distance(x: ArrayView1<'_, f64>, model: &GaussianModel) -> Result<f64> {
    let d = model.mean.len();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let diff = &x - &model.mean;
    let quad = diff.dot(&model.precision.dot(&diff));
    Ok(quad.max(0.0).sqrt())
}

/// Per-point verdict from [`gaussian_predict`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPrediction {
    pub distance: f64,
    pub is_outlier: bool,
}

/// Flags every point whose Mahalanobis distance exceeds the model
/// threshold; distances come back too, for ranking and audit.
pub fn gaussian_predict(
    points: ArrayView2<'_, f64>,
    model: &GaussianModel,
) -> Result<Vec<GaussianPrediction>> {
    points
        .rows()
        .into_iter()
        .map(|row| {
            let distance = mahalanobis_distance(row, model)?;
            Ok(GaussianPrediction { distance, is_outlier: distance > model.distance_threshold })
        })
        .collect()
}
