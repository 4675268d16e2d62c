use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{auc, macro_f1, micro_f1, train_logistic, EvalError, EvalReport, LogisticConfig};
use crate::autoencoder::{train, TrainConfig};
use crate::embedding::{cosine, object_embeddings, ObjectEmbeddings};
use crate::events::{build_incident_matrices, generate_events, EventIdentifier};
use crate::hin::{Hin, Link, NodeId, TypeId};

/// Rejection attempts per requested negative before giving up.
const MAX_ATTEMPTS: usize = 10_000;

// Salts keep the sampling streams independent of the split stream.
const NEGATIVE_SALT: u64 = 0x6e65_6761_7469_7665;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_ratio: f64,
    pub seed: u64,
}

impl SplitSpec {
    fn describe(&self) -> String {
        format!("train_ratio={}", self.train_ratio)
    }
}

fn pair_key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Draws type-matched non-links: each negative copies the endpoint types of
/// a uniformly chosen positive, then draws both endpoints uniformly from the
/// eligible objects of those types, rejecting existing links and self-pairs.
pub struct NegativeSampler<'a> {
    hin: &'a Hin,
    linked: HashSet<(NodeId, NodeId)>,
    eligible: Vec<Vec<NodeId>>,
}

impl<'a> NegativeSampler<'a> {
    /// `hin` defines which pairs count as links; objects for which
    /// `eligible` is false are never drawn.
    pub fn new(hin: &'a Hin, eligible: impl Fn(NodeId) -> bool) -> Self {
        let linked = hin.links().iter().map(|l| pair_key(l.a, l.b)).collect();
        let eligible = (0..hin.schema().len())
            .map(|t| {
                hin.nodes_of_type(TypeId(t))
                    .iter()
                    .copied()
                    .filter(|&n| eligible(n))
                    .collect()
            })
            .collect();
        NegativeSampler {
            hin,
            linked,
            eligible,
        }
    }

    pub fn sample<R: Rng>(
        &self,
        positives: &[Link],
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Link>, EvalError> {
        if count > 0 && positives.is_empty() {
            return Err(EvalError::Sampling(
                "no positive links to match".to_string(),
            ));
        }
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let template = positives[rng.random_range(0..positives.len())];
            let ta = self.hin.type_of(template.a).0;
            let tb = self.hin.type_of(template.b).0;
            let (pa, pb) = (&self.eligible[ta], &self.eligible[tb]);
            if pa.is_empty() || pb.is_empty() {
                return Err(EvalError::Sampling(format!(
                    "no eligible objects for link type ({}, {})",
                    self.hin.schema().tag(TypeId(ta)),
                    self.hin.schema().tag(TypeId(tb))
                )));
            }
            let mut found = None;
            for _ in 0..MAX_ATTEMPTS {
                let a = pa[rng.random_range(0..pa.len())];
                let b = pb[rng.random_range(0..pb.len())];
                if a != b && !self.linked.contains(&pair_key(a, b)) {
                    found = Some(Link { a, b });
                    break;
                }
            }
            match found {
                Some(l) => out.push(l),
                None => {
                    return Err(EvalError::Sampling(format!(
                        "graph too dense: no non-link found for type pair ({}, {}) in {MAX_ATTEMPTS} draws",
                        self.hin.schema().tag(TypeId(ta)),
                        self.hin.schema().tag(TypeId(tb))
                    )))
                }
            }
        }
        Ok(out)
    }
}

fn negative_count(ratio: f64, positives: usize) -> Result<usize, EvalError> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(EvalError::Input(format!(
            "negative ratio must be positive, got {ratio}"
        )));
    }
    Ok(((ratio * positives as f64).round() as usize).max(1))
}

fn link_score(hin: &Hin, emb: &ObjectEmbeddings, link: &Link) -> Option<f64> {
    let a = emb.vector(hin, link.a)?;
    let b = emb.vector(hin, link.b)?;
    cosine(a, b).ok()
}

/// Scores links and sampled non-links by endpoint cosine and reports AUC.
fn score_links(
    hin: &Hin,
    forbidden: &Hin,
    emb: &ObjectEmbeddings,
    candidates: &[Link],
    negative_ratio: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, usize, usize, usize), EvalError> {
    let mut positives = Vec::new();
    let mut pos_scores = Vec::new();
    for link in candidates {
        if let Some(s) = link_score(hin, emb, link) {
            positives.push(*link);
            pos_scores.push(s);
        }
    }
    let skipped = candidates.len() - positives.len();
    if positives.is_empty() {
        return Err(EvalError::MetricUndefined(
            "every candidate link touches an object without embedding".to_string(),
        ));
    }
    let count = negative_count(negative_ratio, positives.len())?;
    let sampler = NegativeSampler::new(forbidden, |n| emb.vector(hin, n).is_some());
    let negatives = sampler.sample(&positives, count, rng)?;
    let neg_scores: Vec<f64> = negatives
        .iter()
        .map(|l| link_score(hin, emb, l).expect("sampler only draws embedded objects"))
        .collect();
    Ok((
        auc(&pos_scores, &neg_scores)?,
        positives.len(),
        negatives.len(),
        skipped,
    ))
}

/// AUC of telling observed links from type-matched non-links by cosine.
pub fn reconstruct_network(
    hin: &Hin,
    embeddings: &ObjectEmbeddings,
    negative_ratio: f64,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ NEGATIVE_SALT);
    let (value, pos, neg, skipped) =
        score_links(hin, hin, embeddings, hin.links(), negative_ratio, &mut rng)?;
    Ok(EvalReport::single(
        "reconstruction",
        format!("all_links,negative_ratio={negative_ratio}"),
        seed,
        [("auc", value)],
        [
            ("positives", pos),
            ("negatives", neg),
            ("skipped_links", skipped),
        ],
    ))
}

/// Uniform link-level split. The training network keeps every object.
pub fn split_links(hin: &Hin, spec: &SplitSpec) -> Result<(Hin, Vec<Link>), EvalError> {
    if !(spec.train_ratio > 0.0 && spec.train_ratio < 1.0) {
        return Err(EvalError::Split(format!(
            "train ratio must lie in (0, 1), got {}",
            spec.train_ratio
        )));
    }
    let n = hin.link_count();
    let n_train = (spec.train_ratio * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let mut train_idx = order[..n_train].to_vec();
    let mut test_idx = order[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let links = hin.links();
    let train = hin.with_links(train_idx.iter().map(|&i| links[i]).collect());
    Ok((train, test_idx.iter().map(|&i| links[i]).collect()))
}

/// Trains on the training split only, then scores held-out links against
/// type-matched pairs that are non-links in the full network.
pub fn link_prediction<R: EventIdentifier + ?Sized>(
    hin: &Hin,
    spec: &SplitSpec,
    train_config: &TrainConfig,
    rule: &R,
    negative_ratio: f64,
) -> Result<EvalReport, EvalError> {
    let (train_hin, test) = split_links(hin, spec)?;
    if test.is_empty() {
        return Err(EvalError::Split("test split is empty".to_string()));
    }
    let events = generate_events(&train_hin, rule)?;
    let matrices = build_incident_matrices(&events, &train_hin);
    let model = train(&matrices, train_config)?;
    let emb = object_embeddings(&model.embeddings, &matrices)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ NEGATIVE_SALT);
    let (value, pos, neg, skipped) =
        score_links(&train_hin, hin, &emb, &test, negative_ratio, &mut rng)?;
    Ok(EvalReport::single(
        "link_prediction",
        format!("{},negative_ratio={negative_ratio}", spec.describe()),
        spec.seed,
        [("auc", value)],
        [
            ("positives", pos),
            ("negatives", neg),
            ("skipped_links", skipped),
            ("train_links", train_hin.link_count()),
            ("events", events.len()),
        ],
    ))
}

/// Object labels. File format: `id<TAB>type<TAB>label[<TAB>label...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledNodes {
    pub label_names: Vec<String>,
    pub entries: Vec<(NodeId, Vec<usize>)>,
    pub single_label: bool,
}

impl LabeledNodes {
    pub fn new(entries: Vec<(NodeId, Vec<String>)>) -> Result<Self, EvalError> {
        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        for (_, labels) in &entries {
            if labels.is_empty() {
                return Err(EvalError::Input("object with no labels".to_string()));
            }
            for l in labels {
                let next = names.len();
                names.entry(l.clone()).or_insert(next);
            }
        }
        // stable, sorted label order
        let label_names: Vec<String> = names.keys().cloned().collect();
        let index: BTreeMap<&str, usize> = label_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let single_label = entries.iter().all(|(_, l)| l.len() == 1);
        let entries = entries
            .into_iter()
            .map(|(n, labels)| {
                let mut ids: Vec<usize> = labels.iter().map(|l| index[l.as_str()]).collect();
                ids.sort_unstable();
                ids.dedup();
                (n, ids)
            })
            .collect();
        Ok(LabeledNodes {
            label_names,
            entries,
            single_label,
        })
    }

    /// Reads a label file; objects unknown to `hin` are skipped and counted.
    pub fn read<R: BufRead>(reader: R, hin: &Hin) -> Result<(Self, usize), EvalError> {
        let mut entries = Vec::new();
        let mut unknown = 0;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() < 3 {
                return Err(EvalError::Input(format!(
                    "labels line {}: expected id<TAB>type<TAB>label...",
                    i + 1
                )));
            }
            match hin.find(f[0], f[1]) {
                Some(n) => entries.push((n, f[2..].iter().map(|s| s.to_string()).collect())),
                None => unknown += 1,
            }
        }
        Ok((LabeledNodes::new(entries)?, unknown))
    }

    pub fn label_count(&self) -> usize {
        self.label_names.len()
    }
}

fn standardize(train: &mut Array2<f64>, test: &mut Array2<f64>) {
    let mean = train.mean_axis(Axis(0)).expect("nonempty training set");
    let mut std = train.std_axis(Axis(0), 0.0);
    std.mapv_inplace(|s| if s > 1e-12 { s } else { 1.0 });
    for m in [train, test] {
        *m -= &mean;
        *m /= &std;
    }
}

/// Logistic-regression node classification on object embeddings.
///
/// Single-label data: argmax prediction; reports `precision` (accuracy),
/// `micro_f1` and macro one-vs-rest `auc`. Multi-label data: 0.5 threshold;
/// reports `micro_f1` and `macro_f1`. Each run reshuffles with `seed + run`.
pub fn node_classification(
    hin: &Hin,
    embeddings: &ObjectEmbeddings,
    labels: &LabeledNodes,
    train_fraction: f64,
    seed: u64,
    runs: usize,
    logistic: &LogisticConfig,
) -> Result<EvalReport, EvalError> {
    let usable: Vec<&(NodeId, Vec<usize>)> = labels
        .entries
        .iter()
        .filter(|(n, _)| embeddings.vector(hin, *n).is_some())
        .collect();
    if usable.is_empty() {
        return Err(EvalError::Input(
            "no labeled object has an embedding".to_string(),
        ));
    }
    let n = usable.len();
    let n_train = (train_fraction * n as f64).round() as usize;
    if !(train_fraction > 0.0 && train_fraction < 1.0) || n_train == 0 || n_train == n {
        return Err(EvalError::Split(format!(
            "train fraction {train_fraction} leaves an empty side with {n} labeled objects"
        )));
    }
    let dim = embeddings.dim();
    let n_labels = labels.label_count();
    let mut reports = Vec::with_capacity(runs);
    for run in 0..runs.max(1) {
        let run_seed = seed.wrapping_add(run as u64);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(run_seed));
        let (tr, te) = order.split_at(n_train);
        let gather = |idx: &[usize]| {
            let mut x = Array2::zeros((idx.len(), dim));
            for (r, &k) in idx.iter().enumerate() {
                let v = embeddings.vector(hin, usable[k].0).expect("filtered above");
                x.row_mut(r).assign(&v);
            }
            let y: Vec<Vec<usize>> = idx.iter().map(|&k| usable[k].1.clone()).collect();
            (x, y)
        };
        let (mut x_train, y_train) = gather(tr);
        let (mut x_test, y_test) = gather(te);
        standardize(&mut x_train, &mut x_test);
        let cfg = LogisticConfig {
            seed: run_seed,
            ..logistic.clone()
        };
        let clf = train_logistic(x_train.view(), &y_train, n_labels, &cfg)?;
        let mut metrics: Vec<(&'static str, f64)> = Vec::new();
        if labels.single_label {
            let pred: Vec<Vec<usize>> = clf
                .predict_argmax(x_test.view())
                .into_iter()
                .map(|l| vec![l])
                .collect();
            let correct = pred.iter().zip(&y_test).filter(|(p, t)| p == t).count();
            metrics.push(("precision", correct as f64 / y_test.len() as f64));
            metrics.push(("micro_f1", micro_f1(&y_test, &pred, n_labels)));
            let proba = clf.predict_proba(x_test.view());
            let mut per_label = Vec::new();
            for l in 0..n_labels {
                let (mut pos, mut neg) = (Vec::new(), Vec::new());
                for (r, t) in y_test.iter().enumerate() {
                    if t.contains(&l) {
                        pos.push(proba[[r, l]]);
                    } else {
                        neg.push(proba[[r, l]]);
                    }
                }
                if let Ok(a) = auc(&pos, &neg) {
                    per_label.push(a);
                }
            }
            if !per_label.is_empty() {
                metrics.push((
                    "auc",
                    per_label.iter().sum::<f64>() / per_label.len() as f64,
                ));
            }
        } else {
            let pred = clf.predict_threshold(x_test.view(), 0.5);
            metrics.push(("micro_f1", micro_f1(&y_test, &pred, n_labels)));
            metrics.push(("macro_f1", macro_f1(&y_test, &pred, n_labels)));
        }
        reports.push(EvalReport::single(
            "node_classification",
            format!("train_fraction={train_fraction}"),
            seed,
            metrics,
            [("train_objects", tr.len()), ("test_objects", te.len())],
        ));
    }
    EvalReport::aggregate(&reports)
}
