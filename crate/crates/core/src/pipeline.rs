//! End-to-end pipeline: score the ensemble, split the pools, train the
//! chosen one-class classifier on the consistent pool, and label the
//! inconsistent pool. Ships the named experiment presets.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PointId};
use crate::ensemble::{score_ensemble, EnsembleConfig};
use crate::error::{Error, Result};
use crate::gaussian::{fit_gaussian, gaussian_predict, GaussianConfig};
use crate::split::{split_pools, Comparator, PoolSplit};
use crate::svm::{ocsvm_predict, ocsvm_train, KernelKind, KernelParams, OcsvmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Gaussian,
    Svm,
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassifierKind::Gaussian => write!(f, "gaussian"),
            ClassifierKind::Svm => write!(f, "svm"),
        }
    }
}

/// How the SVM kernel gamma is chosen once the training pool is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRule {
    Fixed(f64),
    /// `1 / d` — the classic library default.
    InverseDim,
    /// `1 / (d * var(X))`, robust to unscaled feature spaces.
    Scale,
}

impl GammaRule {
    pub fn resolve(&self, pool: &Dataset) -> f64 {
        match self {
            GammaRule::Fixed(value) => *value,
            GammaRule::InverseDim => 1.0 / pool.dim() as f64,
            GammaRule::Scale => {
                let points = pool.points();
                let len = (points.nrows() * points.ncols()) as f64;
                let mean = points.sum() / len;
                let var = points.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
                if var > 1e-12 {
                    1.0 / (pool.dim() as f64 * var)
                } else {
                    1.0 / pool.dim() as f64
                }
            }
        }
    }
}

/// SVM settings at the pipeline level; gamma stays a rule until the
/// consistent pool exists to resolve it against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmSettings {
    pub nu: f64,
    pub kind: KernelKind,
    pub degree: u32,
    pub gamma: GammaRule,
    pub coef0: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub cache_cap: usize,
}

impl Default for SvmSettings {
    fn default() -> Self {
        Self {
            nu: 0.5,
            kind: KernelKind::Polynomial,
            degree: 3,
            gamma: GammaRule::InverseDim,
            coef0: 0.0,
            tol: 1e-3,
            max_passes: 300,
            cache_cap: 8192,
        }
    }
}

impl SvmSettings {
    pub fn resolve(&self, pool: &Dataset) -> OcsvmConfig {
        OcsvmConfig {
            nu: self.nu,
            kernel: KernelParams {
                kind: self.kind,
                degree: self.degree,
                gamma: self.gamma.resolve(pool),
                coef0: self.coef0,
            },
            tol: self.tol,
            max_passes: self.max_passes,
            cache_cap: self.cache_cap,
        }
    }
}

/// Which one-class backend labels the inconsistent pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierConfig {
    Gaussian(GaussianConfig),
    Svm(SvmSettings),
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig::Svm(SvmSettings::default())
    }
}

impl ClassifierConfig {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierConfig::Gaussian(_) => ClassifierKind::Gaussian,
            ClassifierConfig::Svm(_) => ClassifierKind::Svm,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    /// Also run the classifier over the consistent pool for audit. The
    /// consistent pool keeps its inlier label either way.
    pub score_consistent_pool: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pool {
    Consistent,
    Inconsistent,
}

impl std::fmt::Display for Pool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pool::Consistent => write!(f, "consistent"),
            Pool::Inconsistent => write!(f, "inconsistent"),
        }
    }
}

/// Final verdict for one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalLabel {
    pub id: PointId,
    pub pool: Pool,
    pub is_outlier: bool,
    /// Classifier value where one was computed (always for the inconsistent
    /// pool, for the consistent pool only under the audit option).
    pub decision_value: Option<f64>,
}

/// Ground-truth composition of the two pools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEvaluation {
    pub consistent_positive: usize,
    pub consistent_negative: usize,
    pub inconsistent_positive: usize,
    pub inconsistent_negative: usize,
}

/// Classifier outcome over the inconsistent pool against ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InconsistentPoolConfusion {
    /// True outliers flagged as outliers.
    pub true_positives: usize,
    /// Consistent-labeled points flagged as outliers.
    pub false_positives: usize,
    /// True outliers the classifier let through.
    pub misses: usize,
    /// Consistent-labeled points left alone.
    pub true_negatives: usize,
}

impl InconsistentPoolConfusion {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.misses + self.true_negatives
    }
}

/// Everything the pipeline produced for one run.
#[derive(Debug, Clone)]
pub struct DetectionReport {
    pub theta: f64,
    pub comparator: Comparator,
    pub classifier: ClassifierKind,
    pub k_schedule: Vec<usize>,
    pub base_seed: u64,
    /// Present when the dataset carried binary labels.
    pub split_evaluation: Option<SplitEvaluation>,
    pub confusion: Option<InconsistentPoolConfusion>,
    pub flagged_outliers: usize,
    pub final_labels: Vec<FinalLabel>,
}

impl DetectionReport {
    pub fn consistent_count(&self) -> usize {
        self.final_labels.iter().filter(|l| l.pool == Pool::Consistent).count()
    }

    pub fn inconsistent_count(&self) -> usize {
        self.final_labels.iter().filter(|l| l.pool == Pool::Inconsistent).count()
    }

    /// Human-readable summary table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "threshold {} ({}), classifier {}, schedule {:?}, seed {}\n",
            self.theta, self.comparator, self.classifier, self.k_schedule, self.base_seed
        ));
        out.push_str(&format!(
            "pools: {} consistent / {} inconsistent\n",
            self.consistent_count(),
            self.inconsistent_count()
        ));
        if let Some(eval) = &self.split_evaluation {
            out.push_str("pool           positives  negatives\n");
            out.push_str(&format!(
                "consistent     {:>9}  {:>9}\n",
                eval.consistent_positive, eval.consistent_negative
            ));
            out.push_str(&format!(
                "inconsistent   {:>9}  {:>9}\n",
                eval.inconsistent_positive, eval.inconsistent_negative
            ));
        }
        out.push_str(&format!("flagged outliers: {}\n", self.flagged_outliers));
        if let Some(c) = &self.confusion {
            out.push_str(&format!(
                "inconsistent-pool confusion: {} true positives, {} false positives, \
                 {} misses, {} true negatives\n",
                c.true_positives, c.false_positives, c.misses, c.true_negatives
            ));
        }
        out
    }

    /// Machine-readable key,value rows.
    pub fn to_delimited(&self) -> String {
        let mut rows = vec![
            format!("theta,{}", self.theta),
            format!("comparator,{}", self.comparator),
            format!("classifier,{}", self.classifier),
            format!(
                "k_schedule,{}",
                self.k_schedule.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
            ),
            format!("base_seed,{}", self.base_seed),
            format!("consistent_total,{}", self.consistent_count()),
            format!("inconsistent_total,{}", self.inconsistent_count()),
            format!("flagged_outliers,{}", self.flagged_outliers),
        ];
        if let Some(eval) = &self.split_evaluation {
            rows.push(format!("consistent_positive,{}", eval.consistent_positive));
            rows.push(format!("consistent_negative,{}", eval.consistent_negative));
            rows.push(format!("inconsistent_positive,{}", eval.inconsistent_positive));
            rows.push(format!("inconsistent_negative,{}", eval.inconsistent_negative));
        }
        if let Some(c) = &self.confusion {
            rows.push(format!("true_positives,{}", c.true_positives));
            rows.push(format!("false_positives,{}", c.false_positives));
            rows.push(format!("misses,{}", c.misses));
            rows.push(format!("true_negatives,{}", c.true_negatives));
        }
        rows.join("\n") + "\n"
    }
}

/// Per-pool positive/negative counts against binary ground truth.
pub fn evaluate_split(split: &PoolSplit, dataset: &Dataset) -> Result<SplitEvaluation> {
    let labels = dataset
        .binary_labels()
        .ok_or_else(|| Error::Data("split evaluation requires binary labels".into()))?;
    let index = dataset.index_by_id();
    let count = |ids: &[PointId]| -> Result<(usize, usize)> {
        let mut positive = 0;
        let mut negative = 0;
        for id in ids {
            let &row = index
                .get(id)
                .ok_or_else(|| Error::Data(format!("id {id} missing from dataset")))?;
            if labels[row] {
                positive += 1;
            } else {
                negative += 1;
            }
        }
        Ok((positive, negative))
    };
    let (consistent_positive, consistent_negative) = count(&split.consistent_ids)?;
    let (inconsistent_positive, inconsistent_negative) = count(&split.inconsistent_ids)?;
    Ok(SplitEvaluation {
        consistent_positive,
        consistent_negative,
        inconsistent_positive,
        inconsistent_negative,
    })
}

/// Runs score -> split -> fit-on-consistent -> label-inconsistent.
///
/// Points in the consistent pool are inliers by construction; only the
/// inconsistent pool goes through the classifier. Deterministic for fixed
/// seeds and configs.
pub fn run_pipeline(
    dataset: &Dataset,
    ensemble_config: &EnsembleConfig,
    theta: f64,
    comparator: Comparator,
    classifier_config: &ClassifierConfig,
) -> Result<DetectionReport> {
    run_pipeline_with_options(
        dataset,
        ensemble_config,
        theta,
        comparator,
        classifier_config,
        &PipelineOptions::default(),
    )
}

pub fn run_pipeline_with_options(
    dataset: &Dataset,
    ensemble_config: &EnsembleConfig,
    theta: f64,
    comparator: Comparator,
    classifier_config: &ClassifierConfig,
    options: &PipelineOptions,
) -> Result<DetectionReport> {
    let scores = score_ensemble(dataset, ensemble_config)?;
    let split = split_pools(&scores, theta, comparator)?;
    let (report, _) = detect_on_split(dataset, &split, classifier_config, options, &DetectMeta {
        k_schedule: ensemble_config.k_schedule.clone(),
        base_seed: ensemble_config.base_seed,
        score_summary: Some(summarize(scores.scores())),
    })?;
    Ok(report)
}

/// Schedule/seed stamped into the report, plus the score distribution for
/// the empty-pool diagnostic.
pub struct DetectMeta {
    pub k_schedule: Vec<usize>,
    pub base_seed: u64,
    pub score_summary: Option<(f64, f64, f64)>,
}

fn summarize(scores: &[f64]) -> (f64, f64, f64) {
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = *sorted.first().unwrap_or(&f64::NAN);
    let max = *sorted.last().unwrap_or(&f64::NAN);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(f64::NAN);
    (min, max, median)
}

/// A trained one-class backend, ready to label points or be serialized.
#[derive(Debug, Clone)]
pub enum FittedClassifier {
    Gaussian(crate::gaussian::GaussianModel),
    Svm(crate::svm::OcsvmModel),
}

impl FittedClassifier {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            FittedClassifier::Gaussian(_) => ClassifierKind::Gaussian,
            FittedClassifier::Svm(_) => ClassifierKind::Svm,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            FittedClassifier::Gaussian(model) => model.to_json(),
            FittedClassifier::Svm(model) => model.to_json(),
        }
    }

    /// (decision value, is_outlier) per row. Values are oriented so more
    /// negative means more outlying for both backends (the Gaussian side
    /// reports the negated Mahalanobis distance).
    pub fn predict(&self, pool: &Dataset) -> Result<Vec<(f64, bool)>> {
        match self {
            FittedClassifier::Gaussian(model) => Ok(gaussian_predict(pool.points(), model)?
                .into_iter()
                .map(|p| (-p.distance, p.is_outlier))
                .collect()),
            FittedClassifier::Svm(model) => Ok(ocsvm_predict(pool.points(), model)?
                .into_iter()
                .map(|p| (p.decision, p.is_outlier))
                .collect()),
        }
    }
}

/// Trains the configured backend on the consistent pool.
pub fn fit_classifier(
    consistent: &Dataset,
    classifier_config: &ClassifierConfig,
) -> Result<FittedClassifier> {
    match classifier_config {
        ClassifierConfig::Gaussian(config) => {
            Ok(FittedClassifier::Gaussian(fit_gaussian(consistent, config)?))
        }
        ClassifierConfig::Svm(settings) => {
            Ok(FittedClassifier::Svm(ocsvm_train(consistent, &settings.resolve(consistent))?))
        }
    }
}

/// Classifier stage alone, reusable when the split was loaded from files.
/// Returns the report together with the fitted model.
pub fn detect_on_split(
    dataset: &Dataset,
    split: &PoolSplit,
    classifier_config: &ClassifierConfig,
    options: &PipelineOptions,
    meta: &DetectMeta,
) -> Result<(DetectionReport, FittedClassifier)> {
    if split.consistent_ids.is_empty() {
        let (min, max, median) = meta.score_summary.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        return Err(Error::EmptyConsistentPool { theta: split.theta, min, max, median });
    }
    let consistent = dataset.subset(&split.consistent_ids)?;
    let fitted = fit_classifier(&consistent, classifier_config)?;
    let predict = |pool: &Dataset| fitted.predict(pool);

    let mut verdicts: std::collections::HashMap<PointId, (Pool, bool, Option<f64>)> =
        std::collections::HashMap::new();
    if options.score_consistent_pool {
        for (id, (value, _)) in split.consistent_ids.iter().zip(predict(&consistent)?) {
            verdicts.insert(*id, (Pool::Consistent, false, Some(value)));
        }
    } else {
        for id in &split.consistent_ids {
            verdicts.insert(*id, (Pool::Consistent, false, None));
        }
    }

    let mut flagged_outliers = 0;
    if !split.inconsistent_ids.is_empty() {
        let inconsistent = dataset.subset(&split.inconsistent_ids)?;
        for (id, (value, is_outlier)) in
            split.inconsistent_ids.iter().zip(predict(&inconsistent)?)
        {
            if is_outlier {
                flagged_outliers += 1;
            }
            verdicts.insert(*id, (Pool::Inconsistent, is_outlier, Some(value)));
        }
    }

    // report rows in dataset order
    let final_labels: Vec<FinalLabel> = dataset
        .ids()
        .iter()
        .map(|id| {
            let (pool, is_outlier, decision_value) = verdicts[id];
            FinalLabel { id: *id, pool, is_outlier, decision_value }
        })
        .collect();

    let labels = dataset.binary_labels();
    let split_evaluation = labels.as_ref().map(|_| evaluate_split(split, dataset)).transpose()?;
    let confusion = labels.map(|labels| {
        let index = dataset.index_by_id();
        let mut c = InconsistentPoolConfusion {
            true_positives: 0,
            false_positives: 0,
            misses: 0,
            true_negatives: 0,
        };
        for label in &final_labels {
            if label.pool != Pool::Inconsistent {
                continue;
            }
            let truly_outlier = !labels[index[&label.id]];
            match (truly_outlier, label.is_outlier) {
                (true, true) => c.true_positives += 1,
                (false, true) => c.false_positives += 1,
                (true, false) => c.misses += 1,
                (false, false) => c.true_negatives += 1,
            }
        }
        c
    });

    Ok(DetectionReport {
        theta: split.theta,
        comparator: split.comparator,
        classifier: classifier_config.kind(),
        k_schedule: meta.k_schedule.clone(),
        base_seed: meta.base_seed,
        split_evaluation,
        confusion,
        flagged_outliers,
        final_labels,
    })
}

/// Named experiment preset: k schedule, threshold, comparator, and the
/// gamma rule that keeps the SVM numerically sane on that dataset's scale.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub k_schedule: Vec<usize>,
    pub theta: f64,
    pub comparator: Comparator,
    pub svm_gamma: GammaRule,
}

/// Looks up a named preset: `ionosphere`, `arrhythmia`, or `musk`.
pub fn preset(name: &str) -> Option<Preset> {
    match name {
        "ionosphere" => Some(Preset {
            name: "ionosphere",
            k_schedule: vec![10, 15, 20, 25, 30, 50, 100, 150, 200, 300],
            theta: 0.1,
            comparator: Comparator::GreaterOrEqual,
            svm_gamma: GammaRule::InverseDim,
        }),
        "arrhythmia" => Some(Preset {
            name: "arrhythmia",
            k_schedule: vec![5, 6, 8, 10, 12, 14, 16, 20, 25, 30, 50, 100],
            theta: 0.95,
            comparator: Comparator::StrictGreater,
            svm_gamma: GammaRule::Scale,
        }),
        "musk" => Some(Preset {
            name: "musk",
            k_schedule: vec![10, 15, 20, 25, 30, 50, 100, 150, 200, 300, 500, 800, 1000, 1500],
            theta: 0.4,
            comparator: Comparator::StrictGreater,
            svm_gamma: GammaRule::Scale,
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_synthetic;
    use crate::split::suggest_threshold;

    fn small_synthetic(seed: u64) -> Dataset {
        generate_synthetic(150, 15, 4, seed).unwrap()
    }

    fn quick_config(seed: u64) -> EnsembleConfig {
        EnsembleConfig::new(vec![2, 5, 10, 25], seed)
    }

    #[test]
    fn conservation_across_pools() {
        let data = small_synthetic(1);
        let report = run_pipeline(
            &data,
            &quick_config(1),
            0.5,
            Comparator::GreaterOrEqual,
            &ClassifierConfig::default(),
        )
        .unwrap();
        assert_eq!(report.final_labels.len(), 165);
        assert_eq!(report.consistent_count() + report.inconsistent_count(), 165);

        let eval = report.split_evaluation.unwrap();
        assert_eq!(eval.consistent_positive + eval.inconsistent_positive, 150);
        assert_eq!(eval.consistent_negative + eval.inconsistent_negative, 15);
        let confusion = report.confusion.unwrap();
        assert_eq!(confusion.total(), report.inconsistent_count());
    }

    #[test]
    fn reports_are_deterministic() {
        let data = small_synthetic(2);
        let run = || {
            run_pipeline(
                &data,
                &quick_config(9),
                0.4,
                Comparator::StrictGreater,
                &ClassifierConfig::default(),
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.to_delimited(), b.to_delimited());
        assert_eq!(a.final_labels, b.final_labels);
    }

    #[test]
    fn empty_consistent_pool_is_a_structured_error() {
        let data = small_synthetic(3);
        let err = run_pipeline(
            &data,
            &quick_config(3),
            1.0,
            Comparator::StrictGreater,
            &ClassifierConfig::default(),
        )
        .unwrap_err();
        match err {
            Error::EmptyConsistentPool { theta, min, max, .. } => {
                assert_eq!(theta, 1.0);
                assert!(min <= max);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn near_one_gaussian_quantile_flags_nothing() {
        let data = small_synthetic(4);
        let config = ClassifierConfig::Gaussian(GaussianConfig {
            quantile: 0.999_999_999,
            ..GaussianConfig::default()
        });
        let report = run_pipeline(
            &data,
            &quick_config(4),
            0.5,
            Comparator::GreaterOrEqual,
            &config,
        )
        .unwrap();
        assert_eq!(report.flagged_outliers, 0);
    }

    #[test]
    fn consistent_pool_is_never_flagged() {
        let data = small_synthetic(5);
        let report = run_pipeline(
            &data,
            &quick_config(5),
            0.3,
            Comparator::GreaterOrEqual,
            &ClassifierConfig::default(),
        )
        .unwrap();
        for label in &report.final_labels {
            if label.pool == Pool::Consistent {
                assert!(!label.is_outlier);
                assert!(label.decision_value.is_none());
            } else {
                assert!(label.decision_value.is_some());
            }
        }
    }

    #[test]
    fn audit_option_scores_the_consistent_pool_too() {
        let data = small_synthetic(6);
        let options = PipelineOptions { score_consistent_pool: true };
        let report = run_pipeline_with_options(
            &data,
            &quick_config(6),
            0.3,
            Comparator::GreaterOrEqual,
            &ClassifierConfig::default(),
            &options,
        )
        .unwrap();
        for label in &report.final_labels {
            assert!(label.decision_value.is_some());
            if label.pool == Pool::Consistent {
                assert!(!label.is_outlier, "audit scoring must not relabel the pool");
            }
        }
    }

    #[test]
    fn synthetic_outliers_get_flagged_at_the_gap_threshold() {
        // RBF kernel here: the polynomial kernel's verdict depends on dot
        // products alone, which leaves 10-35% of the box-uniform outliers
        // looking aligned with the training blobs on some seeds.
        let svm = ClassifierConfig::Svm(SvmSettings {
            kind: KernelKind::Rbf,
            gamma: GammaRule::Scale,
            ..SvmSettings::default()
        });
        let data = generate_synthetic(1000, 70, 10, 0).unwrap();
        let config = EnsembleConfig::new(vec![2, 5, 10, 100, 500], 0);
        let scores = score_ensemble(&data, &config).unwrap();
        let theta = suggest_threshold(&scores).unwrap();
        let report =
            run_pipeline(&data, &config, theta, Comparator::GreaterOrEqual, &svm).unwrap();

        let labels = data.binary_labels().unwrap();
        let index = data.index_by_id();
        let flagged_true_outliers = report
            .final_labels
            .iter()
            .filter(|l| l.is_outlier && !labels[index[&l.id]])
            .count();
        let total_outliers = labels.iter().filter(|&&b| !b).count();
        assert!(
            flagged_true_outliers as f64 >= 0.9 * total_outliers as f64,
            "{flagged_true_outliers} of {total_outliers} outliers flagged"
        );
    }

    #[test]
    fn evaluate_split_with_all_positive_labels() {
        let points = ndarray::Array2::zeros((4, 2));
        let ids: Vec<PointId> = (0..4).map(PointId).collect();
        let labels = vec!["1".to_string(); 4];
        let data = Dataset::new(points, ids.clone(), Some(labels), None).unwrap();
        let split = PoolSplit {
            theta: 0.0,
            comparator: Comparator::GreaterOrEqual,
            consistent_ids: ids[..2].to_vec(),
            inconsistent_ids: ids[2..].to_vec(),
        };
        let eval = evaluate_split(&split, &data).unwrap();
        assert_eq!(eval.consistent_negative, 0);
        assert_eq!(eval.inconsistent_negative, 0);
        assert_eq!(eval.consistent_positive, 2);

        let unlabeled = Dataset::from_points(ndarray::Array2::zeros((4, 2))).unwrap();
        assert!(evaluate_split(&split, &unlabeled).is_err());
    }

    #[test]
    fn presets_carry_the_documented_schedules() {
        let iono = preset("ionosphere").unwrap();
        assert_eq!(iono.k_schedule, vec![10, 15, 20, 25, 30, 50, 100, 150, 200, 300]);
        assert_eq!(iono.theta, 0.1);
        assert_eq!(iono.comparator, Comparator::GreaterOrEqual);

        let arr = preset("arrhythmia").unwrap();
        assert_eq!(arr.k_schedule.len(), 12);
        assert_eq!(arr.theta, 0.95);
        assert_eq!(arr.comparator, Comparator::StrictGreater);

        let musk = preset("musk").unwrap();
        assert_eq!(musk.k_schedule.len(), 14);
        assert_eq!(*musk.k_schedule.last().unwrap(), 1500);
        assert_eq!(musk.theta, 0.4);

        assert!(preset("nope").is_none());
    }
}
