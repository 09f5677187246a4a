//! Flag, config-file, and preset resolution. Precedence, lowest to
//! highest: built-in defaults, config file, preset, explicit flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use cds_core::dataset::ColumnSelector;
use cds_core::gaussian::GaussianConfig;
use cds_core::pipeline::{GammaRule, Preset, SvmSettings};
use cds_core::split::Comparator;
use cds_core::svm::KernelKind;
use serde::Deserialize;

/// Structured config file (TOML), mirroring the stage flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub score: ScoreSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub detect: DetectSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreSection {
    pub k: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub theta: Option<f64>,
    pub comparator: Option<String>,
    pub bucket_width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectSection {
    pub classifier: Option<String>,
    pub nu: Option<f64>,
    pub kernel: Option<String>,
    pub degree: Option<u32>,
    pub gamma: Option<String>,
    pub coef0: Option<f64>,
    pub svm_tol: Option<f64>,
    pub max_passes: Option<usize>,
    pub cache_cap: Option<usize>,
    pub lambda: Option<f64>,
    pub epsilon: Option<String>,
    pub quantile: Option<f64>,
    pub score_consistent: Option<bool>,
}

pub fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
        }
    }
}

pub fn parse_label_column(value: &str) -> ColumnSelector {
    if value == "last" {
        ColumnSelector::Last
    } else if let Ok(index) = value.parse::<usize>() {
        ColumnSelector::Index(index)
    } else {
        ColumnSelector::Name(value.to_owned())
    }
}

pub fn parse_comparator(value: &str) -> Result<Comparator> {
    Ok(value.parse::<Comparator>()?)
}

pub fn parse_kernel_kind(value: &str) -> Result<KernelKind> {
    match value {
        "poly" | "polynomial" => Ok(KernelKind::Polynomial),
        "rbf" => Ok(KernelKind::Rbf),
        "linear" => Ok(KernelKind::Linear),
        other => bail!("unknown kernel {other:?} (expected poly, rbf, or linear)"),
    }
}

pub fn parse_gamma(value: &str) -> Result<GammaRule> {
    match value {
        "auto" => Ok(GammaRule::InverseDim),
        "scale" => Ok(GammaRule::Scale),
        number => {
            let gamma: f64 = number
                .parse()
                .with_context(|| format!("gamma must be auto, scale, or a number, got {number:?}"))?;
            Ok(GammaRule::Fixed(gamma))
        }
    }
}

pub fn parse_epsilon(value: &str) -> Result<Option<f64>> {
    match value {
        "auto" => Ok(None),
        number => {
            let epsilon: f64 = number
                .parse()
                .with_context(|| format!("epsilon must be auto or a number, got {number:?}"))?;
            Ok(Some(epsilon))
        }
    }
}

pub fn parse_k_list(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|token| token.trim().parse::<usize>().with_context(|| format!("bad k {token:?}")))
        .collect()
}

/// Scoring-stage parameters after resolution.
#[derive(Debug, Clone)]
pub struct ScoreParams {
    pub k_schedule: Vec<usize>,
    pub base_seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

pub fn resolve_score(
    flag_k: Option<&str>,
    flag_seed: Option<u64>,
    flag_max_iter: Option<usize>,
    flag_tol: Option<f64>,
    config: &ScoreSection,
    preset: Option<&Preset>,
) -> Result<ScoreParams> {
    let k_schedule = match flag_k {
        Some(list) => parse_k_list(list)?,
        None => match preset {
            Some(preset) => preset.k_schedule.clone(),
            None => match &config.k {
                Some(k) => k.clone(),
                None => bail!("no k schedule: pass --k, --preset, or set score.k in the config"),
            },
        },
    };
    Ok(ScoreParams {
        k_schedule,
        base_seed: flag_seed.or(config.seed).unwrap_or(0),
        max_iter: flag_max_iter.or(config.max_iter).unwrap_or(300),
        tol: flag_tol.or(config.tol).unwrap_or(1e-6),
    })
}

/// Split-stage parameters after resolution.
#[derive(Debug, Clone)]
pub struct SplitParams {
    pub theta: Option<f64>,
    pub suggest: bool,
    pub comparator: Comparator,
    pub bucket_width: f64,
}

pub fn resolve_split(
    flag_theta: Option<f64>,
    flag_suggest: bool,
    flag_comparator: Option<&str>,
    flag_bucket_width: Option<f64>,
    config: &SplitSection,
    preset: Option<&Preset>,
) -> Result<SplitParams> {
    let theta = flag_theta
        .or_else(|| if flag_suggest { None } else { preset.map(|p| p.theta) })
        .or(if flag_suggest { None } else { config.theta });
    if theta.is_none() && !flag_suggest {
        bail!("no threshold: pass --theta, --suggest-theta, --preset, or set split.theta");
    }
    let comparator = match flag_comparator {
        Some(text) => parse_comparator(text)?,
        None => match preset {
            Some(preset) => preset.comparator,
            None => match &config.comparator {
                Some(text) => parse_comparator(text)?,
                None => Comparator::StrictGreater,
            },
        },
    };
    Ok(SplitParams {
        theta,
        suggest: flag_suggest,
        comparator,
        bucket_width: flag_bucket_width.or(config.bucket_width).unwrap_or(0.1),
    })
}

/// Detect-stage flag bundle, shared by `detect` and `run`.
#[derive(Debug, Clone, clap::Args)]
pub struct DetectFlags {
    /// Classifier backend: svm or gaussian.
    #[arg(long)]
    pub classifier: Option<String>,
    /// SVM: training-outlier bound in (0, 1].
    #[arg(long)]
    pub nu: Option<f64>,
    /// SVM: kernel family (poly, rbf, linear).
    #[arg(long)]
    pub kernel: Option<String>,
    /// SVM: polynomial degree.
    #[arg(long)]
    pub degree: Option<u32>,
    /// SVM: kernel gamma (auto = 1/d, scale = 1/(d*var), or a number).
    #[arg(long)]
    pub gamma: Option<String>,
    /// SVM: kernel coef0.
    #[arg(long)]
    pub coef0: Option<f64>,
    /// SVM: solver stopping tolerance.
    #[arg(long)]
    pub svm_tol: Option<f64>,
    /// SVM: pass budget before the solver gives up.
    #[arg(long)]
    pub max_passes: Option<usize>,
    /// SVM: full Gram cache limit.
    #[arg(long)]
    pub cache_cap: Option<usize>,
    /// Gaussian: diagonal shrinkage in [0, 1].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Gaussian: covariance ridge (auto or a number).
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Gaussian: chi-square quantile for the distance threshold.
    #[arg(long)]
    pub quantile: Option<f64>,
    /// Also run the classifier over the consistent pool for audit.
    #[arg(long)]
    pub score_consistent: bool,
    /// Write the fitted model as JSON.
    #[arg(long)]
    pub save_model: Option<std::path::PathBuf>,
}

/// Detect-stage parameters after resolution.
#[derive(Debug, Clone)]
pub struct DetectParams {
    pub classifier: cds_core::pipeline::ClassifierConfig,
    pub score_consistent: bool,
    pub save_model: Option<std::path::PathBuf>,
}

pub fn resolve_detect(
    flags: &DetectFlags,
    config: &DetectSection,
    preset: Option<&Preset>,
) -> Result<DetectParams> {
    let classifier_name = flags
        .classifier
        .as_deref()
        .or(config.classifier.as_deref())
        .unwrap_or("svm");

    let classifier = match classifier_name {
        "svm" => {
            let defaults = SvmSettings::default();
            let gamma = match flags.gamma.as_deref().or(config.gamma.as_deref()) {
                Some(text) => parse_gamma(text)?,
                None => preset.map(|p| p.svm_gamma).unwrap_or(defaults.gamma),
            };
            let kind = match flags.kernel.as_deref().or(config.kernel.as_deref()) {
                Some(text) => parse_kernel_kind(text)?,
                None => defaults.kind,
            };
            cds_core::pipeline::ClassifierConfig::Svm(SvmSettings {
                nu: flags.nu.or(config.nu).unwrap_or(defaults.nu),
                kind,
                degree: flags.degree.or(config.degree).unwrap_or(defaults.degree),
                gamma,
                coef0: flags.coef0.or(config.coef0).unwrap_or(defaults.coef0),
                tol: flags.svm_tol.or(config.svm_tol).unwrap_or(defaults.tol),
                max_passes: flags.max_passes.or(config.max_passes).unwrap_or(defaults.max_passes),
                cache_cap: flags.cache_cap.or(config.cache_cap).unwrap_or(defaults.cache_cap),
            })
        }
        "gaussian" => {
            let defaults = GaussianConfig::default();
            let epsilon = match flags.epsilon.as_deref().or(config.epsilon.as_deref()) {
                Some(text) => parse_epsilon(text)?,
                None => defaults.epsilon,
            };
            cds_core::pipeline::ClassifierConfig::Gaussian(GaussianConfig {
                lambda: flags.lambda.or(config.lambda).unwrap_or(defaults.lambda),
                epsilon,
                quantile: flags.quantile.or(config.quantile).unwrap_or(defaults.quantile),
            })
        }
        other => bail!("unknown classifier {other:?} (expected svm or gaussian)"),
    };

    Ok(DetectParams {
        classifier,
        score_consistent: flags.score_consistent || config.score_consistent.unwrap_or(false),
        save_model: flags.save_model.clone(),
    })
}
