//! Multi-branch autoencoder over event incidence columns.
//!
//! Every object type owns one encoder branch and one decoder branch. An
//! event's embedding is the sum of the sigmoid outputs of all encoder
//! branches; each decoder branch reconstructs that type's incidence column
//! from the shared embedding. A branch whose type is absent from an event
//! still contributes `σ(b_t)` to the sum.
//!
//! The objective over a batch is the β-weighted squared reconstruction error
//! plus `α·Σ‖W‖²` over weight matrices (biases are not regularised), and it
//! is minimised by plain mini-batch SGD.

use ndarray::{Array1, Array2, ArrayView1, Zip};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::events::IncidentMatrices;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cannot train on an empty event set")]
    NoEvents,
    #[error("training diverged (non-finite loss) at epoch {epoch}, batch {batch}")]
    Divergence { epoch: usize, batch: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Embedding dimension `d`.
    pub dim: usize,
    /// Weight on the reconstruction error of nonzero incidence entries.
    pub beta: f64,
    /// L2 penalty rate on weight matrices.
    pub alpha: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Number of hidden layers. 1 is the standard model; extra layers are
    /// `d × d` sigmoid layers stacked on the encoder side (experimental).
    pub depth: usize,
    /// Stop early once an epoch improves the loss by less than this fraction.
    pub min_rel_improvement: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 64,
            beta: 2.0,
            alpha: 1e-4,
            learning_rate: 0.025,
            epochs: 100,
            batch_size: 16,
            seed: 0,
            depth: 1,
            min_rel_improvement: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.beta.is_finite() && self.beta >= 1.0) {
            return bad("beta must be a finite value >= 1");
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad("alpha must be a finite value >= 0");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.depth == 0 {
            return bad("depth must be at least 1");
        }
        if let Some(tol) = self.min_rel_improvement {
            if tol.is_nan() || tol < 0.0 {
                return bad("min_rel_improvement must be >= 0");
            }
        }
        Ok(())
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Encoder and decoder weights for one object type.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// `d × |V^t|`
    pub enc_w: Array2<f64>,
    /// `d`
    pub enc_b: Array1<f64>,
    /// `|V^t| × d`
    pub dec_w: Array2<f64>,
    /// `|V^t|`
    pub dec_b: Array1<f64>,
}

impl Branch {
    fn zeros(dim: usize, size: usize) -> Self {
        Branch {
            enc_w: Array2::zeros((dim, size)),
            enc_b: Array1::zeros(dim),
            dec_w: Array2::zeros((size, dim)),
            dec_b: Array1::zeros(size),
        }
    }

    pub fn size(&self) -> usize {
        self.dec_b.len()
    }
}

/// A shared `d × d` hidden layer (only present when depth > 1).
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

/// Model parameters. Also used as the gradient bundle, since gradients have
/// exactly the parameters' shape.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderParams {
    pub dim: usize,
    pub branches: Vec<Branch>,
    pub hidden: Vec<HiddenLayer>,
}

fn uniform_fill<R: Rng>(m: &mut Array2<f64>, fan_in: usize, rng: &mut R) {
    if fan_in == 0 {
        return;
    }
    let bound = 1.0 / (fan_in as f64).sqrt();
    m.iter_mut()
        .for_each(|w| *w = rng.random_range(-bound..bound));
}

/// Per-type active rows of one event (the sparse form of a binary column).
pub type SparseColumns<'a> = [&'a [usize]];

struct Forward {
    branch_out: Vec<Array1<f64>>,
    /// `layers[0]` is the branch sum; the last entry is the embedding.
    layers: Vec<Array1<f64>>,
    outputs: Vec<Array1<f64>>,
}

impl Forward {
    fn embedding(&self) -> &Array1<f64> {
        self.layers.last().expect("at least one layer")
    }
}

impl AutoencoderParams {
    pub fn zeros(type_sizes: &[usize], dim: usize, depth: usize) -> Self {
        AutoencoderParams {
            dim,
            branches: type_sizes.iter().map(|&n| Branch::zeros(dim, n)).collect(),
            hidden: (1..depth.max(1))
                .map(|_| HiddenLayer {
                    w: Array2::zeros((dim, dim)),
                    b: Array1::zeros(dim),
                })
                .collect(),
        }
    }

    /// Weights uniform in `±1/sqrt(fan_in)`, biases zero.
    pub fn init<R: Rng>(type_sizes: &[usize], dim: usize, depth: usize, rng: &mut R) -> Self {
        let mut p = Self::zeros(type_sizes, dim, depth);
        for br in &mut p.branches {
            let n = br.size();
            uniform_fill(&mut br.enc_w, n, rng);
            uniform_fill(&mut br.dec_w, dim, rng);
        }
        for layer in &mut p.hidden {
            uniform_fill(&mut layer.w, dim, rng);
        }
        p
    }

    pub fn zeros_like(&self) -> Self {
        let sizes: Vec<usize> = self.type_sizes();
        Self::zeros(&sizes, self.dim, self.depth())
    }

    pub fn type_sizes(&self) -> Vec<usize> {
        self.branches.iter().map(Branch::size).collect()
    }

    pub fn depth(&self) -> usize {
        self.hidden.len() + 1
    }

    /// Visits every parameter block in checkpoint order.
    pub fn blocks(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for br in &self.branches {
            out.push(br.enc_w.as_slice().expect("standard layout"));
            out.push(br.enc_b.as_slice().expect("standard layout"));
            out.push(br.dec_w.as_slice().expect("standard layout"));
            out.push(br.dec_b.as_slice().expect("standard layout"));
        }
        for layer in &self.hidden {
            out.push(layer.w.as_slice().expect("standard layout"));
            out.push(layer.b.as_slice().expect("standard layout"));
        }
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for br in &mut self.branches {
            out.push(br.enc_w.as_slice_mut().expect("standard layout"));
            out.push(br.enc_b.as_slice_mut().expect("standard layout"));
            out.push(br.dec_w.as_slice_mut().expect("standard layout"));
            out.push(br.dec_b.as_slice_mut().expect("standard layout"));
        }
        for layer in &mut self.hidden {
            out.push(layer.w.as_slice_mut().expect("standard layout"));
            out.push(layer.b.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.blocks()
            .iter()
            .all(|b| b.iter().all(|x| x.is_finite()))
    }

    /// `Σ‖W‖²` over all weight matrices.
    pub fn weight_norm_sq(&self) -> f64 {
        let sq = |m: &Array2<f64>| m.iter().map(|w| w * w).sum::<f64>();
        self.branches
            .iter()
            .map(|b| sq(&b.enc_w) + sq(&b.dec_w))
            .sum::<f64>()
            + self.hidden.iter().map(|l| sq(&l.w)).sum::<f64>()
    }

    /// `self += scale · other`, block by block.
    pub fn scaled_add(&mut self, scale: f64, other: &AutoencoderParams) {
        for (dst, src) in self.blocks_mut().into_iter().zip(other.blocks()) {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += scale * s);
        }
    }

    fn check_columns(&self, columns: &SparseColumns) -> Result<(), TrainError> {
        if columns.len() != self.branches.len() {
            return Err(TrainError::Shape(format!(
                "expected {} per-type columns, got {}",
                self.branches.len(),
                columns.len()
            )));
        }
        for (t, (col, br)) in columns.iter().zip(&self.branches).enumerate() {
            if let Some(&i) = col.iter().find(|&&i| i >= br.size()) {
                return Err(TrainError::Shape(format!(
                    "row {i} out of range for type {t} with {} objects",
                    br.size()
                )));
            }
        }
        Ok(())
    }

    fn stack(&self, z1: Array1<f64>) -> Vec<Array1<f64>> {
        let mut layers = vec![z1];
        for layer in &self.hidden {
            let prev = layers.last().expect("nonempty");
            let next = (layer.w.dot(prev) + &layer.b).mapv(sigmoid);
            layers.push(next);
        }
        layers
    }

    fn forward(&self, columns: &SparseColumns) -> Forward {
        let mut z1 = Array1::zeros(self.dim);
        let mut branch_out = Vec::with_capacity(self.branches.len());
        for (br, col) in self.branches.iter().zip(columns) {
            let mut pre = br.enc_b.clone();
            for &i in *col {
                pre += &br.enc_w.column(i);
            }
            pre.mapv_inplace(sigmoid);
            z1 += &pre;
            branch_out.push(pre);
        }
        let layers = self.stack(z1);
        let outputs = self.decode_unchecked(layers.last().expect("nonempty").view());
        Forward {
            branch_out,
            layers,
            outputs,
        }
    }

    fn decode_unchecked(&self, z: ArrayView1<f64>) -> Vec<Array1<f64>> {
        self.branches
            .iter()
            .map(|br| (br.dec_w.dot(&z) + &br.dec_b).mapv(sigmoid))
            .collect()
    }

    /// Event embedding from per-type active rows.
    pub fn encode(&self, columns: &SparseColumns) -> Result<Array1<f64>, TrainError> {
        self.check_columns(columns)?;
        let mut layers = self.forward_encoder(columns);
        Ok(layers.pop().expect("nonempty"))
    }

    fn forward_encoder(&self, columns: &SparseColumns) -> Vec<Array1<f64>> {
        let mut z1 = Array1::zeros(self.dim);
        for (br, col) in self.branches.iter().zip(columns) {
            let mut pre = br.enc_b.clone();
            for &i in *col {
                pre += &br.enc_w.column(i);
            }
            z1 += &pre.mapv(sigmoid);
        }
        self.stack(z1)
    }

    /// Event embedding from dense per-type input vectors.
    pub fn encode_dense(&self, inputs: &[ArrayView1<f64>]) -> Result<Array1<f64>, TrainError> {
        if inputs.len() != self.branches.len() {
            return Err(TrainError::Shape(format!(
                "expected {} per-type inputs, got {}",
                self.branches.len(),
                inputs.len()
            )));
        }
        let mut z1 = Array1::zeros(self.dim);
        for (t, (br, x)) in self.branches.iter().zip(inputs).enumerate() {
            if x.len() != br.size() {
                return Err(TrainError::Shape(format!(
                    "input for type {t} has length {}, expected {}",
                    x.len(),
                    br.size()
                )));
            }
            z1 += &(br.enc_w.dot(x) + &br.enc_b).mapv(sigmoid);
        }
        Ok(self.stack(z1).pop().expect("nonempty"))
    }

    /// Per-type reconstructions, entries in (0, 1).
    pub fn decode(&self, z: ArrayView1<f64>) -> Result<Vec<Array1<f64>>, TrainError> {
        if z.len() != self.dim {
            return Err(TrainError::Shape(format!(
                "embedding has length {}, expected {}",
                z.len(),
                self.dim
            )));
        }
        Ok(self.decode_unchecked(z))
    }

    fn check_matrices(&self, matrices: &IncidentMatrices) -> Result<(), TrainError> {
        if matrices.type_sizes() != self.type_sizes() {
            return Err(TrainError::Shape(format!(
                "incident matrices have type sizes {:?}, model has {:?}",
                matrices.type_sizes(),
                self.type_sizes()
            )));
        }
        Ok(())
    }
}

/// Walks the dense index range `0..n`, yielding whether each row is active.
fn for_each_row(n: usize, active: &[usize], mut f: impl FnMut(usize, bool)) {
    let mut p = 0;
    for j in 0..n {
        let on = p < active.len() && active[p] == j;
        if on {
            p += 1;
        }
        f(j, on);
    }
}

fn weighted_error(outputs: &[Array1<f64>], columns: &SparseColumns, beta: f64) -> f64 {
    let mut loss = 0.0;
    for (o, col) in outputs.iter().zip(columns) {
        for_each_row(o.len(), col, |j, on| {
            let (x, lam) = if on { (1.0, beta) } else { (0.0, 1.0) };
            let r = (x - o[j]) * lam;
            loss += r * r;
        });
    }
    loss
}

fn check_batch(batch: &[usize], matrices: &IncidentMatrices) -> Result<(), TrainError> {
    if batch.is_empty() {
        return Err(TrainError::Shape("empty batch".to_string()));
    }
    if let Some(&j) = batch.iter().find(|&&j| j >= matrices.event_count()) {
        return Err(TrainError::Shape(format!(
            "event {j} out of range ({} events)",
            matrices.event_count()
        )));
    }
    Ok(())
}

/// β-weighted reconstruction error summed over `batch`.
pub fn reconstruction_loss(
    params: &AutoencoderParams,
    matrices: &IncidentMatrices,
    batch: &[usize],
    beta: f64,
) -> Result<f64, TrainError> {
    params.check_matrices(matrices)?;
    check_batch(batch, matrices)?;
    Ok(batch
        .iter()
        .map(|&j| {
            let cols = matrices.event_columns(j);
            let fwd = params.forward(&cols);
            weighted_error(&fwd.outputs, &cols, beta)
        })
        .sum())
}

/// Unweighted squared reconstruction error summed over `batch`.
pub fn plain_reconstruction_loss(
    params: &AutoencoderParams,
    matrices: &IncidentMatrices,
    batch: &[usize],
) -> Result<f64, TrainError> {
    params.check_matrices(matrices)?;
    check_batch(batch, matrices)?;
    Ok(batch
        .iter()
        .map(|&j| {
            let cols = matrices.event_columns(j);
            let fwd = params.forward(&cols);
            let mut loss = 0.0;
            for (o, col) in fwd.outputs.iter().zip(&cols) {
                for_each_row(o.len(), col, |i, on| {
                    let r = if on { 1.0 } else { 0.0 } - o[i];
                    loss += r * r;
                });
            }
            loss
        })
        .sum())
}

/// Full objective on a batch: weighted reconstruction error + α·Σ‖W‖².
pub fn loss(
    params: &AutoencoderParams,
    matrices: &IncidentMatrices,
    batch: &[usize],
    config: &TrainConfig,
) -> Result<f64, TrainError> {
    Ok(reconstruction_loss(params, matrices, batch, config.beta)?
        + config.alpha * params.weight_norm_sq())
}

/// Loss and its exact gradient with respect to every parameter.
pub fn loss_and_gradients(
    params: &AutoencoderParams,
    matrices: &IncidentMatrices,
    batch: &[usize],
    config: &TrainConfig,
) -> Result<(f64, AutoencoderParams), TrainError> {
    params.check_matrices(matrices)?;
    check_batch(batch, matrices)?;
    let mut grad = params.zeros_like();
    let mut total = 0.0;
    for &j in batch {
        let cols = matrices.event_columns(j);
        let fwd = params.forward(&cols);
        total += backward(params, &cols, &fwd, config.beta, &mut grad);
    }
    let alpha = config.alpha;
    if alpha != 0.0 {
        for (g, p) in grad.branches.iter_mut().zip(&params.branches) {
            g.enc_w.scaled_add(2.0 * alpha, &p.enc_w);
            g.dec_w.scaled_add(2.0 * alpha, &p.dec_w);
        }
        for (g, p) in grad.hidden.iter_mut().zip(&params.hidden) {
            g.w.scaled_add(2.0 * alpha, &p.w);
        }
    }
    Ok((total + alpha * params.weight_norm_sq(), grad))
}

pub fn gradients(
    params: &AutoencoderParams,
    matrices: &IncidentMatrices,
    batch: &[usize],
    config: &TrainConfig,
) -> Result<AutoencoderParams, TrainError> {
    loss_and_gradients(params, matrices, batch, config).map(|(_, g)| g)
}

/// Accumulates one event's reconstruction gradient into `grad` and returns
/// its weighted reconstruction error.
fn backward(
    params: &AutoencoderParams,
    columns: &SparseColumns,
    fwd: &Forward,
    beta: f64,
    grad: &mut AutoencoderParams,
) -> f64 {
    let z = fwd.embedding();
    let mut loss = 0.0;
    let mut dz = Array1::<f64>::zeros(params.dim);
    for (t, (br, col)) in params.branches.iter().zip(columns).enumerate() {
        let o = &fwd.outputs[t];
        let mut dpre = Array1::<f64>::zeros(o.len());
        for_each_row(o.len(), col, |j, on| {
            let (x, lam) = if on { (1.0, beta) } else { (0.0, 1.0) };
            let r = (x - o[j]) * lam;
            loss += r * r;
            dpre[j] = -2.0 * r * lam * o[j] * (1.0 - o[j]);
        });
        let g = &mut grad.branches[t];
        for (j, &d) in dpre.iter().enumerate() {
            if d != 0.0 {
                g.dec_w.row_mut(j).scaled_add(d, z);
            }
        }
        g.dec_b += &dpre;
        dz += &br.dec_w.t().dot(&dpre);
    }
    for l in (0..params.hidden.len()).rev() {
        let out = &fwd.layers[l + 1];
        let mut dpre = dz;
        Zip::from(&mut dpre)
            .and(out)
            .for_each(|d, &y| *d *= y * (1.0 - y));
        let g = &mut grad.hidden[l];
        for (r, &d) in dpre.iter().enumerate() {
            g.w.row_mut(r).scaled_add(d, &fwd.layers[l]);
        }
        g.b += &dpre;
        dz = params.hidden[l].w.t().dot(&dpre);
    }
    for (t, col) in columns.iter().enumerate() {
        let h = &fwd.branch_out[t];
        let mut da = dz.clone();
        Zip::from(&mut da)
            .and(h)
            .for_each(|d, &y| *d *= y * (1.0 - y));
        let g = &mut grad.branches[t];
        for &i in *col {
            let mut c = g.enc_w.column_mut(i);
            c += &da;
        }
        g.enc_b += &da;
    }
    loss
}

/// Event embeddings `Z`, row `j` belonging to event `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventEmbeddings {
    pub z: Array2<f64>,
}

impl EventEmbeddings {
    pub fn dim(&self) -> usize {
        self.z.ncols()
    }

    pub fn len(&self) -> usize {
        self.z.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.z.nrows() == 0
    }
}

pub fn encode_all(
    params: &AutoencoderParams,
    matrices: &IncidentMatrices,
) -> Result<EventEmbeddings, TrainError> {
    params.check_matrices(matrices)?;
    let mut z = Array2::zeros((matrices.event_count(), params.dim));
    for j in 0..matrices.event_count() {
        let row = params.forward_encoder(&matrices.event_columns(j));
        z.row_mut(j).assign(row.last().expect("nonempty"));
    }
    Ok(EventEmbeddings { z })
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub params: AutoencoderParams,
    pub embeddings: EventEmbeddings,
    /// Sum of batch objectives per completed epoch.
    pub epoch_losses: Vec<f64>,
}

pub fn train(
    matrices: &IncidentMatrices,
    config: &TrainConfig,
) -> Result<TrainedModel, TrainError> {
    train_with(matrices, config, |_, _| {})
}

/// Like [`train`], calling `on_epoch(epoch, loss)` after every epoch.
pub fn train_with(
    matrices: &IncidentMatrices,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<TrainedModel, TrainError> {
    config.validate()?;
    let n = matrices.event_count();
    if n == 0 {
        return Err(TrainError::NoEvents);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params =
        AutoencoderParams::init(&matrices.type_sizes(), config.dim, config.depth, &mut rng);
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            let (l, grad) = loss_and_gradients(&params, matrices, batch, config)?;
            if !l.is_finite() {
                return Err(TrainError::Divergence { epoch, batch: b });
            }
            params.scaled_add(-config.learning_rate, &grad);
            if !params.is_finite() {
                return Err(TrainError::Divergence { epoch, batch: b });
            }
            epoch_loss += l;
        }
        on_epoch(epoch, epoch_loss);
        let prev = epoch_losses.last().copied();
        epoch_losses.push(epoch_loss);
        if let (Some(tol), Some(prev)) = (config.min_rel_improvement, prev) {
            if prev - epoch_loss < tol * prev.abs() {
                break;
            }
        }
    }
    let embeddings = encode_all(&params, matrices)?;
    Ok(TrainedModel {
        params,
        embeddings,
        epoch_losses,
    })
}
