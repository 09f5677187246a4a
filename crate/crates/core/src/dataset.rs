//! Dataset ingestion and preparation.
//!
//! Loads delimited numeric data with configurable missing-value handling,
//! regroups multi-class labels into a binary consistent/outlier split, and
//! generates the synthetic blobs-plus-background benchmark.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable identifier of a point. Defaults to the row index at load time and
/// survives subsetting, so pool memberships can always be traced back to the
/// source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointId(pub u64);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An n x d numeric matrix with stable per-point identifiers and optional
/// class labels. Immutable after construction; all preparation steps return
/// new datasets.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Array2<f64>,
    ids: Vec<PointId>,
    labels: Option<Vec<String>>,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset, enforcing the structural invariants: non-empty
    /// finite matrix, unique ids, label/name lengths matching the matrix.
    pub fn new(
        points: Array2<f64>,
        ids: Vec<PointId>,
        labels: Option<Vec<String>>,
        column_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let (n, d) = points.dim();
        if n == 0 || d == 0 {
            return Err(Error::Data(format!("empty dataset ({n} rows x {d} columns)")));
        }
        if let Some(bad) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value at row {}, column {}",
                bad / d,
                bad % d
            )));
        }
        if ids.len() != n {
            return Err(Error::Data(format!("{} ids for {n} rows", ids.len())));
        }
        if ids.iter().collect::<HashSet<_>>().len() != n {
            return Err(Error::Data("duplicate point ids".into()));
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::Data(format!("{} labels for {n} rows", l.len())));
            }
        }
        if let Some(ref c) = column_names {
            if c.len() != d {
                return Err(Error::Data(format!("{} column names for {d} columns", c.len())));
            }
        }
        Ok(Self { points, ids, labels, column_names })
    }

    /// Convenience constructor for unlabeled data with row-index ids.
    pub fn from_points(points: Array2<f64>) -> Result<Self> {
        let ids = (0..points.nrows() as u64).map(PointId).collect();
        Self::new(points, ids, None, None)
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    pub fn row(&self, index: usize) -> ArrayView1<'_, f64> {
        self.points.row(index)
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Labels parsed as the binary consistent(1)/outlier(0) convention, or
    /// `None` if the dataset is unlabeled or carries raw multi-class labels.
    pub fn binary_labels(&self) -> Option<Vec<bool>> {
        let labels = self.labels.as_ref()?;
        labels
            .iter()
            .map(|l| match l.as_str() {
                "1" => Some(true),
                "0" => Some(false),
                _ => None,
            })
            .collect()
    }

    /// Map from point id to row index.
    pub fn index_by_id(&self) -> HashMap<PointId, usize> {
        self.ids.iter().enumerate().map(|(i, &id)| (id, i)).collect()
    }

    /// Extracts the rows with the given ids, preserving ids and labels.
    /// The subset keeps the order of `ids`.
    pub fn subset(&self, ids: &[PointId]) -> Result<Self> {
        let index = self.index_by_id();
        let mut rows = Vec::with_capacity(ids.len());
        for id in ids {
            match index.get(id) {
                Some(&i) => rows.push(i),
                None => return Err(Error::Data(format!("unknown point id {id}"))),
            }
        }
        let points = self.points.select(ndarray::Axis(0), &rows);
        let labels = self
            .labels
            .as_ref()
            .map(|l| rows.iter().map(|&i| l[i].clone()).collect());
        Self::new(points, ids.to_vec(), labels, self.column_names.clone())
    }
}

/// Ground truth produced by [`group_outlier_classes`]: which points were
/// relabeled as outliers.
#[derive(Debug, Clone)]
pub struct OutlierGroundTruth {
    pub outlier_ids: Vec<PointId>,
    pub m: usize,
}

/// Which raw column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
    Last,
}

/// Options for [`load_delimited`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub missing_token: String,
    pub label_column: Option<ColumnSelector>,
    /// Raw column indices to exclude entirely (identifier columns and such).
    pub drop_columns: Vec<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            missing_token: "?".into(),
            label_column: None,
            drop_columns: Vec::new(),
        }
    }
}

/// A loaded dataset plus non-fatal findings (dropped all-missing columns).
#[derive(Debug)]
pub struct Loaded {
    pub dataset: Dataset,
    pub warnings: Vec<String>,
}

/// Reads a delimited numeric file. Fields equal to the missing token are
/// imputed with their column mean; the label column, when selected, is kept
/// as raw strings and excluded from the numeric matrix. Columns that are
/// missing in every row are dropped with a warning.
pub fn load_delimited(path: &Path, options: &LoadOptions) -> Result<Loaded> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;

    let header: Option<Vec<String>> = if options.has_header {
        Some(reader.headers()?.iter().map(str::to_owned).collect())
    } else {
        None
    };

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        rows.push(record?);
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{} has no data rows", path.display())));
    }
    let width = rows[0].len();

    let label_idx = match &options.label_column {
        None => None,
        Some(ColumnSelector::Index(i)) => {
            if *i >= width {
                return Err(Error::Config(format!(
                    "label column {i} out of range for {width} columns"
                )));
            }
            Some(*i)
        }
        Some(ColumnSelector::Last) => Some(width - 1),
        Some(ColumnSelector::Name(name)) => match &header {
            Some(h) => Some(h.iter().position(|c| c == name).ok_or_else(|| {
                Error::Config(format!("label column {name:?} not found in header"))
            })?),
            None => {
                return Err(Error::Config(
                    "label column by name requires a header row".into(),
                ))
            }
        },
    };
    for &dropped in &options.drop_columns {
        if dropped >= width {
            return Err(Error::Config(format!(
                "dropped column {dropped} out of range for {width} columns"
            )));
        }
        if Some(dropped) == label_idx {
            return Err(Error::Config(format!(
                "column {dropped} is both the label column and dropped"
            )));
        }
    }

    let feature_cols: Vec<usize> = (0..width)
        .filter(|c| Some(*c) != label_idx && !options.drop_columns.contains(c))
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::Data("no feature columns remain".into()));
    }

    // Parse column-wise so each column's missing entries can be imputed
    // from the rest of the column.
    let n = rows.len();
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(n); feature_cols.len()];
    let mut labels: Vec<String> = Vec::new();
    for (row_idx, record) in rows.iter().enumerate() {
        if record.len() != width {
            return Err(Error::Data(format!(
                "row {} has {} fields, expected {width}",
                row_idx + 1,
                record.len()
            )));
        }
        if let Some(li) = label_idx {
            labels.push(record[li].to_owned());
        }
        for (slot, &col) in feature_cols.iter().enumerate() {
            let field = &record[col];
            if field == options.missing_token {
                columns[slot].push(None);
            } else {
                let value: f64 = field.parse().map_err(|_| {
                    Error::Data(format!(
                        "non-numeric field {field:?} at row {}, column {col}",
                        row_idx + 1
                    ))
                })?;
                if !value.is_finite() {
                    return Err(Error::Data(format!(
                        "non-finite field {field:?} at row {}, column {col}",
                        row_idx + 1
                    )));
                }
                columns[slot].push(Some(value));
            }
        }
    }

    let mut warnings = Vec::new();
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
    let mut kept_names: Vec<String> = Vec::new();
    for (slot, column) in columns.iter().enumerate() {
        let raw_idx = feature_cols[slot];
        match impute_column_mean(column) {
            Ok(filled) => {
                kept.push(filled);
                if let Some(h) = &header {
                    kept_names.push(h[raw_idx].clone());
                }
            }
            Err(_) => {
                warnings.push(format!("column {raw_idx} is missing in every row; dropped"));
            }
        }
    }
    if kept.is_empty() {
        return Err(Error::Data("every feature column was all-missing".into()));
    }

    let d = kept.len();
    let mut points = Array2::zeros((n, d));
    for (j, column) in kept.iter().enumerate() {
        for (i, &v) in column.iter().enumerate() {
            points[[i, j]] = v;
        }
    }

    let ids = (0..n as u64).map(PointId).collect();
    let column_names = header.map(|_| kept_names);
    let dataset = Dataset::new(points, ids, (label_idx.is_some()).then_some(labels), column_names)?;
    Ok(Loaded { dataset, warnings })
}

/// Writes a dataset back out in the same delimited shape, with a header row
/// and a trailing binary `label` column when labels are present. Floats use
/// the shortest round-trip representation, so load-save-load is exact.
pub fn save_delimited(dataset: &Dataset, path: &Path, delimiter: u8) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let sep = delimiter as char;
    let names: Vec<String> = match dataset.column_names() {
        Some(names) => names.to_vec(),
        None => (0..dataset.dim()).map(|j| format!("f{j}")).collect(),
    };
    let mut header = names.join(&sep.to_string());
    if dataset.labels().is_some() {
        header.push(sep);
        header.push_str("label");
    }
    writeln!(out, "{header}")?;
    for i in 0..dataset.n() {
        let mut line = String::new();
        for (j, v) in dataset.row(i).iter().enumerate() {
            if j > 0 {
                line.push(sep);
            }
            line.push_str(&v.to_string());
        }
        if let Some(labels) = dataset.labels() {
            line.push(sep);
            line.push_str(&labels[i]);
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Replaces missing entries with the arithmetic mean of the observed ones.
pub fn impute_column_mean(column: &[Option<f64>]) -> Result<Vec<f64>> {
    let observed: Vec<f64> = column.iter().flatten().copied().collect();
    if observed.is_empty() {
        return Err(Error::Data("column has no observed values".into()));
    }
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    Ok(column.iter().map(|v| v.unwrap_or(mean)).collect())
}

/// Relabels rare classes as outliers and everything else as consistent.
///
/// Multi-class inputs: a class is an outlier when its instance count falls
/// below `floor(threshold_fraction * n)`. Two-class inputs: the smaller
/// class is the outlier class regardless of the threshold. Returned labels
/// are the binary convention `"1"` (consistent) / `"0"` (outlier).
pub fn group_outlier_classes(
    dataset: &Dataset,
    threshold_fraction: f64,
) -> Result<(Dataset, OutlierGroundTruth)> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::Config(format!(
            "threshold fraction must be in (0, 1), got {threshold_fraction}"
        )));
    }
    let labels = dataset
        .labels()
        .ok_or_else(|| Error::Data("grouping requires class labels".into()))?;

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for label in labels {
        *counts.entry(label.as_str()).or_default() += 1;
    }
    if counts.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 classes to group, found {}",
            counts.len()
        )));
    }

    let outlier_classes: HashSet<&str> = if counts.len() == 2 {
        // Smaller class is the outlier class; ties break toward the
        // lexicographically larger name so the result is deterministic.
        let mut it = counts.iter();
        let (a, ca) = it.next().unwrap();
        let (b, cb) = it.next().unwrap();
        let outlier = if ca < cb { a } else { b };
        std::iter::once(*outlier).collect()
    } else {
        let cutoff = (threshold_fraction * dataset.n() as f64).floor() as usize;
        counts
            .iter()
            .filter(|(_, &c)| c < cutoff)
            .map(|(&class, _)| class)
            .collect()
    };
    if outlier_classes.len() == counts.len() {
        return Err(Error::Data(
            "every class is below the outlier threshold; no consistent class remains".into(),
        ));
    }

    let mut outlier_ids = Vec::new();
    let new_labels: Vec<String> = labels
        .iter()
        .zip(dataset.ids())
        .map(|(label, &id)| {
            if outlier_classes.contains(label.as_str()) {
                outlier_ids.push(id);
                "0".to_owned()
            } else {
                "1".to_owned()
            }
        })
        .collect();

    let relabeled = Dataset::new(
        dataset.points.clone(),
        dataset.ids.clone(),
        Some(new_labels),
        dataset.column_names.clone(),
    )?;
    let m = outlier_ids.len();
    Ok((relabeled, OutlierGroundTruth { outlier_ids, m }))
}

/// Generates the synthetic benchmark: consistent points in three tight
/// isotropic blobs, outliers uniform over the blobs' bounding box inflated
/// by 50%. Deterministic for a fixed seed.
pub fn generate_synthetic(
    n_consistent: usize,
    n_outlier: usize,
    d: usize,
    seed: u64,
) -> Result<Dataset> {
    if n_consistent == 0 || n_outlier == 0 || d == 0 {
        return Err(Error::Config(
            "synthetic generation needs at least one point of each class and d >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    const CENTER_RADIUS: f64 = 12.0;
    const BLOB_SIGMA: f64 = 0.5;
    let centers: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-9 {
                v[0] = 1.0;
                return v.iter().map(|x| x * CENTER_RADIUS).collect();
            }
            v.iter().map(|x| x / norm * CENTER_RADIUS).collect()
        })
        .collect();

    let n = n_consistent + n_outlier;
    let mut points = Array2::zeros((n, d));
    for i in 0..n_consistent {
        let center = &centers[i % 3];
        for j in 0..d {
            let noise: f64 = StandardNormal.sample(&mut rng);
            points[[i, j]] = center[j] + BLOB_SIGMA * noise;
        }
    }

    // Per-dimension bounding box of the consistent points, widened by 50%
    // about its midpoint (degenerate widths fall back to 1).
    let mut bounds = Vec::with_capacity(d);
    for j in 0..d {
        let column = points.slice(ndarray::s![..n_consistent, j]);
        let lo = column.fold(f64::INFINITY, |a, &b| a.min(b));
        let hi = column.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let width = (hi - lo).max(1.0);
        let mid = (hi + lo) / 2.0;
        bounds.push((mid - 0.75 * width, mid + 0.75 * width));
    }
    for i in n_consistent..n {
        for j in 0..d {
            let (lo, hi) = bounds[j];
            points[[i, j]] = rng.gen_range(lo..hi);
        }
    }

    let labels = (0..n)
        .map(|i| if i < n_consistent { "1".to_owned() } else { "0".to_owned() })
        .collect();
    let ids = (0..n as u64).map(PointId).collect();
    Dataset::new(points, ids, Some(labels), None)
}

/// Per-column standardization to zero mean and unit variance. Columns with
/// (near) zero variance are centered only. Off by default everywhere; the
/// pipeline operates in the original feature space unless asked otherwise.
pub fn zscore(dataset: &Dataset) -> Dataset {
    let (n, d) = dataset.points.dim();
    let mut points = dataset.points.clone();
    for j in 0..d {
        let mut column = points.column_mut(j);
        let mean = column.sum() / n as f64;
        let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        if std > 1e-12 {
            column.mapv_inplace(|v| (v - mean) / std);
        } else {
            column.mapv_inplace(|v| v - mean);
        }
    }
    Dataset {
        points,
        ids: dataset.ids.clone(),
        labels: dataset.labels.clone(),
        column_names: dataset.column_names.clone(),
    }
}
