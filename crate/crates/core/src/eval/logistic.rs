//! One-vs-rest logistic regression trained by full-batch gradient descent on
//! the L2-regularised mean log-loss.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::autoencoder::sigmoid;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticConfig {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1e-4,
            learning_rate: 0.1,
            epochs: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OvrClassifier {
    /// `labels × features`
    pub weights: Array2<f64>,
    pub intercepts: Array1<f64>,
}

impl OvrClassifier {
    pub fn labels(&self) -> usize {
        self.intercepts.len()
    }

    /// Independent per-label probabilities, `rows × labels`.
    pub fn predict_proba(&self, features: ArrayView2<f64>) -> Array2<f64> {
        let mut logits = features.dot(&self.weights.t());
        logits += &self.intercepts;
        logits.mapv_inplace(sigmoid);
        logits
    }

    /// Highest-scoring label per row.
    pub fn predict_argmax(&self, features: ArrayView2<f64>) -> Vec<usize> {
        self.predict_proba(features)
            .rows()
            .into_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (l, &p)| {
                        if p > best.1 {
                            (l, p)
                        } else {
                            best
                        }
                    })
                    .0
            })
            .collect()
    }

    /// Labels whose probability is at least `threshold`, per row.
    pub fn predict_threshold(&self, features: ArrayView2<f64>, threshold: f64) -> Vec<Vec<usize>> {
        self.predict_proba(features)
            .rows()
            .into_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &p)| p >= threshold)
                    .map(|(l, _)| l)
                    .collect()
            })
            .collect()
    }
}

/// `targets[i]` lists the label indices (< `labels`) of row `i`.
pub fn train_logistic(
    features: ArrayView2<f64>,
    targets: &[Vec<usize>],
    labels: usize,
    config: &LogisticConfig,
) -> Result<OvrClassifier, EvalError> {
    let (n, f) = features.dim();
    if n != targets.len() {
        return Err(EvalError::Input(format!(
            "{n} feature rows but {} target rows",
            targets.len()
        )));
    }
    let mut y = Array2::<f64>::zeros((n, labels));
    for (i, t) in targets.iter().enumerate() {
        for &l in t {
            if l >= labels {
                return Err(EvalError::Input(format!("label {l} out of range")));
            }
            y[[i, l]] = 1.0;
        }
    }
    let present = y.sum_axis(Axis(0)).iter().filter(|&&c| c > 0.0).count();
    if present < 2 {
        return Err(EvalError::DegenerateLabels(present));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut weights = Array2::from_shape_fn((labels, f), |_| rng.random_range(-0.01..0.01));
    let mut intercepts = Array1::<f64>::zeros(labels);
    let inv_n = 1.0 / n as f64;
    for _ in 0..config.epochs {
        let mut residual = features.dot(&weights.t());
        residual += &intercepts;
        residual.mapv_inplace(sigmoid);
        residual -= &y;
        let mut grad_w = residual.t().dot(&features);
        grad_w *= inv_n;
        grad_w.scaled_add(config.l2, &weights);
        let grad_b = residual.sum_axis(Axis(0)) * inv_n;
        weights.scaled_add(-config.learning_rate, &grad_w);
        intercepts.scaled_add(-config.learning_rate, &grad_b);
    }
    Ok(OvrClassifier {
        weights,
        intercepts,
    })
}
