//! Evaluation protocols: network reconstruction, link prediction and node
//! classification, plus the metrics they report.

mod logistic;
mod metrics;
mod tasks;

use std::collections::BTreeMap;
use std::io::Write;

use thiserror::Error;

use crate::autoencoder::TrainError;
use crate::embedding::EmbeddingError;
use crate::events::EventError;

pub use logistic::{train_logistic, LogisticConfig, OvrClassifier};
pub use metrics::{accuracy, auc, macro_f1, mean_std, micro_f1};
pub use tasks::{
    link_prediction, node_classification, reconstruct_network, split_links, LabeledNodes,
    NegativeSampler, SplitSpec,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("metric undefined: {0}")]
    MetricUndefined(String),
    #[error("negative sampling failed: {0}")]
    Sampling(String),
    #[error("split error: {0}")]
    Split(String),
    #[error("training labels contain {0} distinct class(es); at least 2 are required")]
    DegenerateLabels(usize),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Events(#[from] EventError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
    pub values: Vec<f64>,
}

impl MetricSummary {
    pub fn from_values(values: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&values);
        MetricSummary { mean, std, values }
    }
}

/// Outcome of one or more evaluation runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub task: String,
    pub split: String,
    pub seed: u64,
    pub runs: usize,
    pub metrics: BTreeMap<String, MetricSummary>,
    /// Bookkeeping counts (positives, negatives, skipped links, ...), summed
    /// over runs.
    pub counts: BTreeMap<String, usize>,
}

impl EvalReport {
    pub fn single(
        task: &str,
        split: String,
        seed: u64,
        metrics: impl IntoIterator<Item = (&'static str, f64)>,
        counts: impl IntoIterator<Item = (&'static str, usize)>,
    ) -> Self {
        EvalReport {
            task: task.to_string(),
            split,
            seed,
            runs: 1,
            metrics: metrics
                .into_iter()
                .map(|(k, v)| (k.to_string(), MetricSummary::from_values(vec![v])))
                .collect(),
            counts: counts
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.metrics.get(metric).map(|m| m.mean)
    }

    /// Pools several reports of the same task into one, recomputing mean and
    /// standard deviation over all runs. Seed and split come from the first.
    pub fn aggregate(reports: &[EvalReport]) -> Result<EvalReport, EvalError> {
        let first = reports
            .first()
            .ok_or_else(|| EvalError::Input("nothing to aggregate".to_string()))?;
        let mut values: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for r in reports {
            if r.task != first.task {
                return Err(EvalError::Input(format!(
                    "cannot aggregate `{}` with `{}`",
                    first.task, r.task
                )));
            }
            for (k, m) in &r.metrics {
                values.entry(k.clone()).or_default().extend(&m.values);
            }
            for (k, c) in &r.counts {
                *counts.entry(k.clone()).or_default() += c;
            }
        }
        Ok(EvalReport {
            task: first.task.clone(),
            split: first.split.clone(),
            seed: first.seed,
            runs: reports.iter().map(|r| r.runs).sum(),
            metrics: values
                .into_iter()
                .map(|(k, v)| (k, MetricSummary::from_values(v)))
                .collect(),
            counts,
        })
    }

    /// Flat `key=value` block.
    pub fn write_kv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "task={}", self.task)?;
        writeln!(w, "split={}", self.split)?;
        writeln!(w, "seed={}", self.seed)?;
        writeln!(w, "runs={}", self.runs)?;
        for (k, c) in &self.counts {
            writeln!(w, "count.{k}={c}")?;
        }
        for (k, m) in &self.metrics {
            writeln!(w, "{k}.mean={}", m.mean)?;
            if self.runs > 1 {
                writeln!(w, "{k}.std={}", m.std)?;
            }
        }
        Ok(())
    }

    /// `metric<TAB>mean<TAB>std`, one line per metric.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (k, m) in &self.metrics {
            writeln!(w, "{k}\t{}\t{}", m.mean, m.std)?;
        }
        Ok(())
    }
}
