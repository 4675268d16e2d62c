use std::cmp::Ordering;

use super::EvalError;

/// ROC AUC as the Mann-Whitney statistic with midrank ties:
/// `P(pos > neg) + 0.5 · P(pos = neg)`.
///
/// O((n + m) log(n + m)); scores must not be NaN.
pub fn auc(positive: &[f64], negative: &[f64]) -> Result<f64, EvalError> {
    if positive.is_empty() || negative.is_empty() {
        return Err(EvalError::MetricUndefined(
            "AUC needs at least one positive and one negative score".to_string(),
        ));
    }
    if positive.iter().chain(negative).any(|s| s.is_nan()) {
        return Err(EvalError::MetricUndefined("NaN score".to_string()));
    }
    let mut all: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    // Rank sums in doubled units so midranks stay integral.
    let mut pos_rank_x2: u128 = 0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // ranks i+1..=j, midrank = (i + 1 + j) / 2
        let mid_x2 = (i + 1 + j) as u128;
        let pos_in_group = all[i..j].iter().filter(|x| x.1).count() as u128;
        pos_rank_x2 += mid_x2 * pos_in_group;
        i = j;
    }
    let p = positive.len() as u128;
    let n = negative.len() as u128;
    // U = R_pos - p(p+1)/2, doubled
    let u_x2 = pos_rank_x2 - p * (p + 1);
    let total = 2 * p * n;
    // Dividing the smaller side keeps auc(p, n) + auc(n, p) == 1 exact.
    if 2 * u_x2 > total {
        Ok(1.0 - (total - u_x2) as f64 / total as f64)
    } else {
        Ok(u_x2 as f64 / total as f64)
    }
}

/// Fraction of rows whose predicted label set equals the true label set.
pub fn accuracy(truth: &[Vec<usize>], predicted: &[Vec<usize>]) -> f64 {
    assert_eq!(truth.len(), predicted.len());
    if truth.is_empty() {
        return 0.0;
    }
    let hits = truth
        .iter()
        .zip(predicted)
        .filter(|(t, p)| {
            let mut t = (*t).clone();
            let mut p = (*p).clone();
            t.sort_unstable();
            p.sort_unstable();
            t == p
        })
        .count();
    hits as f64 / truth.len() as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

fn f1(c: Counts) -> Option<f64> {
    let denom = 2 * c.tp + c.fp + c.fn_;
    (denom > 0).then(|| 2.0 * c.tp as f64 / denom as f64)
}

fn label_counts(truth: &[Vec<usize>], predicted: &[Vec<usize>], labels: usize) -> Vec<Counts> {
    assert_eq!(truth.len(), predicted.len());
    let mut counts = vec![Counts::default(); labels];
    for (t, p) in truth.iter().zip(predicted) {
        for &l in p {
            if t.contains(&l) {
                counts[l].tp += 1;
            } else {
                counts[l].fp += 1;
            }
        }
        for &l in t {
            if !p.contains(&l) {
                counts[l].fn_ += 1;
            }
        }
    }
    counts
}

/// F1 over pooled true/false positive counts of all labels.
pub fn micro_f1(truth: &[Vec<usize>], predicted: &[Vec<usize>], labels: usize) -> f64 {
    let total =
        label_counts(truth, predicted, labels)
            .into_iter()
            .fold(Counts::default(), |a, c| Counts {
                tp: a.tp + c.tp,
                fp: a.fp + c.fp,
                fn_: a.fn_ + c.fn_,
            });
    f1(total).unwrap_or(0.0)
}

/// Unweighted mean of per-label F1. Labels that are neither present nor
/// predicted are skipped.
pub fn macro_f1(truth: &[Vec<usize>], predicted: &[Vec<usize>], labels: usize) -> f64 {
    let scores: Vec<f64> = label_counts(truth, predicted, labels)
        .into_iter()
        .filter_map(f1)
        .collect();
    if scores.is_empty() {
        0.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    }
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
