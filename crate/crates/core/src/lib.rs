//! Outlier detection by consistent data selection.
//!
//! The pipeline scores every point's spatial consistency with an ensemble of
//! k-means clusterings (average pairwise cosine similarity of the centroids a
//! point lands in), splits the data into consistent and inconsistent pools at
//! a score threshold, trains a one-class classifier on the consistent pool,
//! and labels the inconsistent pool to surface outliers.
//!
//! ```
//! use cds_core::{dataset, ensemble::EnsembleConfig, pipeline, split::Comparator};
//!
//! let data = dataset::generate_synthetic(200, 20, 4, 7).unwrap();
//! let config = EnsembleConfig::new(vec![2, 5, 10], 7);
//! let report = pipeline::run_pipeline(
//!     &data,
//!     &config,
//!     0.5,
//!     Comparator::GreaterOrEqual,
//!     &pipeline::ClassifierConfig::default(),
//! )
//! .unwrap();
//! assert_eq!(report.final_labels.len(), 220);
//! ```

pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod gaussian;
pub mod kmeans;
pub mod pipeline;
pub mod split;
pub mod svm;

mod seed;

pub use dataset::{Dataset, PointId};
pub use error::{Error, Result};
