//! Stage-file formats. Every artifact is delimited text with a one-line
//! column header; score and pool files carry a leading `#` metadata line so
//! later stages can be rerun from files alone. Floats are written in the
//! shortest round-trip form, which makes staged reruns byte-identical to
//! single-shot runs.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cds_core::dataset::Dataset;
use cds_core::ensemble::ConsistencyScores;
use cds_core::pipeline::{DetectionReport, Pool};
use cds_core::split::{Comparator, PoolSplit, ScoreHistogram};
use cds_core::PointId;

/// Run parameters threaded through the stage files.
#[derive(Debug, Clone, Default)]
pub struct StageMeta {
    pub k_schedule: Vec<usize>,
    pub base_seed: u64,
    pub theta: Option<f64>,
    pub comparator: Option<Comparator>,
}

impl StageMeta {
    fn header_line(&self) -> String {
        let mut line = format!(
            "# k_schedule={}; base_seed={}",
            self.k_schedule.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "),
            self.base_seed
        );
        if let Some(theta) = self.theta {
            let _ = write!(line, "; theta={theta}");
        }
        if let Some(comparator) = self.comparator {
            let _ = write!(line, "; comparator={comparator}");
        }
        line
    }

    fn parse(line: &str) -> Result<Self> {
        let mut meta = StageMeta::default();
        let body = line.trim_start_matches('#').trim();
        for part in body.split(';') {
            let (key, value) = part
                .trim()
                .split_once('=')
                .with_context(|| format!("malformed metadata entry {part:?}"))?;
            match key.trim() {
                "k_schedule" => {
                    meta.k_schedule = value
                        .split_whitespace()
                        .map(|t| t.parse().context("bad k in metadata"))
                        .collect::<Result<_>>()?;
                }
                "base_seed" => meta.base_seed = value.trim().parse()?,
                "theta" => meta.theta = Some(value.trim().parse()?),
                "comparator" => meta.comparator = Some(value.trim().parse::<Comparator>()?),
                other => bail!("unknown metadata key {other:?}"),
            }
        }
        Ok(meta)
    }
}

/// Scores file: metadata line, `id,avg_sim_score[,label]`, rows sorted by
/// descending score.
pub fn write_scores(
    path: &Path,
    scores: &ConsistencyScores,
    dataset: &Dataset,
    meta: &StageMeta,
) -> Result<()> {
    let labels: Option<HashMap<PointId, &str>> = dataset.labels().map(|labels| {
        dataset.ids().iter().copied().zip(labels.iter().map(String::as_str)).collect()
    });
    let mut out = String::new();
    out.push_str(&meta.header_line());
    out.push('\n');
    out.push_str(if labels.is_some() { "id,avg_sim_score,label\n" } else { "id,avg_sim_score\n" });
    for (id, score) in scores.sorted_descending() {
        match &labels {
            Some(map) => {
                let _ = writeln!(out, "{id},{score},{}", map[&id]);
            }
            None => {
                let _ = writeln!(out, "{id},{score}");
            }
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Reload of a scores file: the scores (in file order), per-row binary
/// labels when the file carried a label column, and the run metadata.
pub fn read_scores(path: &Path) -> Result<(ConsistencyScores, Option<Vec<bool>>, StageMeta)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let meta_line = lines.next().context("empty scores file")?;
    if !meta_line.starts_with('#') {
        bail!("scores file is missing its metadata line");
    }
    let meta = StageMeta::parse(meta_line)?;
    let header = lines.next().context("scores file has no column header")?;
    let has_labels = match header {
        "id,avg_sim_score" => false,
        "id,avg_sim_score,label" => true,
        other => bail!("unexpected scores header {other:?}"),
    };

    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut labels = has_labels.then(Vec::new);
    for (number, line) in lines.enumerate() {
        let mut fields = line.split(',');
        let id: u64 = fields
            .next()
            .with_context(|| format!("row {} is empty", number + 1))?
            .parse()?;
        let score: f64 = fields
            .next()
            .with_context(|| format!("row {} has no score", number + 1))?
            .parse()?;
        ids.push(PointId(id));
        values.push(score);
        if let Some(labels) = labels.as_mut() {
            let label = fields
                .next()
                .with_context(|| format!("row {} has no label", number + 1))?;
            labels.push(match label {
                "1" => true,
                "0" => false,
                other => bail!("row {}: label {other:?} is not binary", number + 1),
            });
        }
    }
    let scores = ConsistencyScores::from_parts(ids, values, meta.k_schedule.clone())?;
    Ok((scores, labels, meta))
}

/// Pools file: metadata line (including theta and comparator), then
/// `id,score,pool` sorted by descending score.
pub fn write_pools(
    path: &Path,
    split: &PoolSplit,
    scores: &ConsistencyScores,
    meta: &StageMeta,
) -> Result<()> {
    let consistent: std::collections::HashSet<PointId> =
        split.consistent_ids.iter().copied().collect();
    let mut out = String::new();
    out.push_str(
        &StageMeta {
            theta: Some(split.theta),
            comparator: Some(split.comparator),
            ..meta.clone()
        }
        .header_line(),
    );
    out.push('\n');
    out.push_str("id,score,pool\n");
    for (id, score) in scores.sorted_descending() {
        let pool = if consistent.contains(&id) { "consistent" } else { "inconsistent" };
        let _ = writeln!(out, "{id},{score},{pool}");
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_pools(path: &Path) -> Result<(PoolSplit, StageMeta)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let meta_line = lines.next().context("empty pools file")?;
    if !meta_line.starts_with('#') {
        bail!("pools file is missing its metadata line");
    }
    let meta = StageMeta::parse(meta_line)?;
    let theta = meta.theta.context("pools metadata is missing theta")?;
    let comparator = meta.comparator.context("pools metadata is missing the comparator")?;
    let header = lines.next().context("pools file has no column header")?;
    if header != "id,score,pool" {
        bail!("unexpected pools header {header:?}");
    }

    let mut consistent_ids = Vec::new();
    let mut inconsistent_ids = Vec::new();
    for (number, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            bail!("pools row {} has {} fields", number + 1, fields.len());
        }
        let id = PointId(fields[0].parse()?);
        match fields[2] {
            "consistent" => consistent_ids.push(id),
            "inconsistent" => inconsistent_ids.push(id),
            other => bail!("pools row {}: unknown pool {other:?}", number + 1),
        }
    }
    Ok((PoolSplit { theta, comparator, consistent_ids, inconsistent_ids }, meta))
}

/// Histogram file, one row per bucket:
/// `bucket_low,bucket_high,count_label1,count_label0,count_total`.
/// The label columns are zero when the scores carried no labels.
pub fn write_histogram(path: &Path, histogram: &ScoreHistogram) -> Result<()> {
    let mut out = String::from("bucket_low,bucket_high,count_label1,count_label0,count_total\n");
    for bucket in 0..histogram.buckets() {
        let label1 = histogram.counts_label1.as_ref().map_or(0, |c| c[bucket]);
        let label0 = histogram.counts_label0.as_ref().map_or(0, |c| c[bucket]);
        let _ = writeln!(
            out,
            "{},{},{label1},{label0},{}",
            histogram.bucket_edges[bucket],
            histogram.bucket_edges[bucket + 1],
            histogram.counts_total[bucket]
        );
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Per-point outcomes: `id,pool,final_label,decision_value`, in dataset
/// order. The decision column is empty where no classifier value exists.
pub fn write_outcomes(path: &Path, report: &DetectionReport) -> Result<()> {
    let mut out = String::from("id,pool,final_label,decision_value\n");
    for label in &report.final_labels {
        let verdict = if label.is_outlier { 0 } else { 1 };
        let decision = label.decision_value.map(|v| v.to_string()).unwrap_or_default();
        let pool = match label.pool {
            Pool::Consistent => "consistent",
            Pool::Inconsistent => "inconsistent",
        };
        let _ = writeln!(out, "{},{pool},{verdict},{decision}", label.id);
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_report(dir: &Path, report: &DetectionReport) -> Result<()> {
    std::fs::write(dir.join("report.txt"), report.to_table())
        .with_context(|| format!("writing {}", dir.join("report.txt").display()))?;
    std::fs::write(dir.join("report.csv"), report.to_delimited())
        .with_context(|| format!("writing {}", dir.join("report.csv").display()))?;
    write_outcomes(&dir.join("outcomes.csv"), report)?;
    Ok(())
}
