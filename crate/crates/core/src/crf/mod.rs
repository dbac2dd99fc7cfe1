//! Linear-chain CRF over the three holder labels: path scoring, exact
//! partition function and marginals by forward-backward in log space,
//! regularized maximum-likelihood training, and Viterbi decoding.
//!
//! Parameters live in one dense weight vector. A feature string observed at
//! position `t` contributes its weight for the label at `t` (emission);
//! label bigrams, including a distinguished START predecessor for `t = 0`,
//! contribute transition weights. Feature strings unseen at training time
//! have no id and silently score zero.

pub mod io;
pub mod math;
pub mod optimizer;

use std::collections::HashMap;

use thiserror::Error;

use crate::corpus::{validate_bio, HolderLabel};
use crate::features::FeatureVector;
use math::{logsumexp, logsumexp2};
pub use optimizer::OptimizerKind;

/// Number of output labels.
const L: usize = HolderLabel::COUNT;
/// Transition-table row index of the virtual start state.
const START: usize = L;

#[derive(Debug, Error)]
pub enum CrfError {
    #[error("feature sequence has {features} positions but label sequence has {labels}")]
    LengthMismatch { features: usize, labels: usize },
    #[error("sequence must have at least one position")]
    EmptySequence,
    #[error("training data is empty")]
    EmptyBatch,
    #[error("sequence {index} has invalid BIO labels at position {position}")]
    InvalidBio { index: usize, position: usize },
    #[error("objective or gradient became non-finite during training")]
    DivergedObjective,
    #[error("weight vector has {found} entries, model needs {expected}")]
    WeightCountMismatch { expected: usize, found: usize },
    #[error("model weights must be finite")]
    NonFiniteWeight,
    #[error("duplicate feature string in index: `{0}`")]
    DuplicateFeature(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model format version `{found}`")]
    VersionMismatch { found: String },
    #[error("corrupt model weights: {reason}")]
    CorruptWeights { reason: String },
    #[error("corrupt feature index: {reason}")]
    CorruptIndex { reason: String },
    #[error("model declares unknown label `{label}`")]
    UnknownLabel { label: String },
}

/// Dense id assignment for feature strings and label transitions.
///
/// Emission parameters occupy ids `[0, 3F)` as `fid * 3 + label`; transition
/// parameters follow as `3F + prev * 3 + label` with `prev` ranging over the
/// three labels plus START. Ids are assigned in first-encounter order, which
/// makes index construction deterministic for a fixed data order.
#[derive(Debug, Clone, Default)]
pub struct FeatureIndex {
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl FeatureIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds an index from an ordered name list (model loading).
    pub fn from_names(names: Vec<String>) -> Result<Self, CrfError> {
        let mut ids = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if ids.insert(name.clone(), i as u32).is_some() {
                return Err(CrfError::DuplicateFeature(name.clone()));
            }
        }
        Ok(Self { ids, names })
    }

    fn intern(&mut self, feature: &str) -> u32 {
        if let Some(&id) = self.ids.get(feature) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(feature.to_string(), id);
        self.names.push(feature.to_string());
        id
    }

    pub fn feature_id(&self, feature: &str) -> Option<u32> {
        self.ids.get(feature).copied()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn num_feature_strings(&self) -> usize {
        self.names.len()
    }

    /// Total parameter count: emissions plus the (L+1) x L transition table.
    pub fn num_parameters(&self) -> usize {
        self.names.len() * L + (L + 1) * L
    }

    #[inline]
    fn emission_param(fid: u32, label: usize) -> usize {
        fid as usize * L + label
    }

    #[inline]
    fn transition_param(&self, prev: usize, label: usize) -> usize {
        self.names.len() * L + prev * L + label
    }
}

/// One training example: per-token feature vectors and gold labels.
#[derive(Debug, Clone)]
pub struct LabeledSequence {
    pub features: Vec<FeatureVector>,
    pub labels: Vec<HolderLabel>,
}

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// L2 regularizer sigma^2; `f64::INFINITY` disables regularization.
    pub sigma2: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            sigma2: 10.0,
            max_iters: 200,
            tol: 1e-6,
            optimizer: OptimizerKind::Lbfgs,
        }
    }
}

/// Training provenance stored alongside the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainMeta {
    pub sigma2: f64,
    pub iterations: usize,
    pub objective: f64,
}

impl Default for TrainMeta {
    fn default() -> Self {
        Self {
            sigma2: f64::INFINITY,
            iterations: 0,
            objective: 0.0,
        }
    }
}

/// Per-position and per-edge posteriors of a sequence.
#[derive(Debug, Clone)]
pub struct Marginals {
    /// `positions[t][j] = p(y_t = j | x)`.
    pub positions: Vec<[f64; L]>,
    /// `edges[t][i][j] = p(y_t = i, y_{t+1} = j | x)`; length `T - 1`. The
    /// START edge is `positions[0]` itself.
    pub edges: Vec<[[f64; L]; L]>,
    pub log_z: f64,
}

/// How decoding treats structurally invalid BIO output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BioMode {
    /// Return the argmax path untouched.
    Raw,
    /// Rewrite orphan I-Holder (at start or after Non-Holder) to B-Holder.
    #[default]
    Repair,
    /// Decode with the invalid transitions pinned to -inf.
    ForbidInvalid,
}

#[derive(Debug, Clone)]
pub struct CrfModel {
    index: FeatureIndex,
    weights: Vec<f64>,
    meta: TrainMeta,
}

impl CrfModel {
    /// Assembles a model from an index and a weight vector. Lengths must
    /// agree and every weight must be finite.
    pub fn from_parts(
        index: FeatureIndex,
        weights: Vec<f64>,
        meta: TrainMeta,
    ) -> Result<Self, CrfError> {
        if weights.len() != index.num_parameters() {
            return Err(CrfError::WeightCountMismatch {
                expected: index.num_parameters(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(CrfError::NonFiniteWeight);
        }
        Ok(Self {
            index,
            weights,
            meta,
        })
    }

    pub fn index(&self) -> &FeatureIndex {
        &self.index
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn meta(&self) -> &TrainMeta {
        &self.meta
    }

    pub fn labels(&self) -> [HolderLabel; L] {
        HolderLabel::ALL
    }

    /// Maps feature vectors to known feature ids, dropping unseen strings.
    fn index_tokens(&self, x: &[FeatureVector]) -> Vec<Vec<u32>> {
        x.iter()
            .map(|fv| {
                fv.features
                    .iter()
                    .filter_map(|f| self.index.feature_id(f))
                    .collect()
            })
            .collect()
    }

    fn emissions(&self, fids: &[u32]) -> [f64; L] {
        emissions_of(&self.weights, fids)
    }

    fn transition(&self, prev: usize, label: usize) -> f64 {
        self.weights[self.index.transition_param(prev, label)]
    }

    /// Unnormalized log-potential of one path (the summed exponent of the
    /// model's path weight).
    pub fn score_path(&self, x: &[FeatureVector], y: &[HolderLabel]) -> Result<f64, CrfError> {
        if x.len() != y.len() {
            return Err(CrfError::LengthMismatch {
                features: x.len(),
                labels: y.len(),
            });
        }
        if x.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let tokens = self.index_tokens(x);
        let labels: Vec<usize> = y.iter().map(|l| l.index()).collect();
        Ok(path_score(&self.index, &self.weights, &tokens, &labels))
    }

    /// log Z(x) by the forward recursion.
    pub fn log_partition(&self, x: &[FeatureVector]) -> Result<f64, CrfError> {
        if x.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let tokens = self.index_tokens(x);
        let (_, log_z) = forward(&self.index, &self.weights, &tokens);
        Ok(log_z)
    }

    /// log Z(x) by the backward recursion; equal to [`Self::log_partition`]
    /// up to rounding.
    pub fn log_partition_backward(&self, x: &[FeatureVector]) -> Result<f64, CrfError> {
        if x.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let tokens = self.index_tokens(x);
        let beta = backward(&self.index, &self.weights, &tokens);
        let emit0 = self.emissions(&tokens[0]);
        let mut terms = [0.0; L];
        for j in 0..L {
            terms[j] = self.transition(START, j) + emit0[j] + beta[0][j];
        }
        Ok(logsumexp(&terms))
    }

    /// Position and edge posteriors by forward-backward.
    pub fn marginals(&self, x: &[FeatureVector]) -> Result<Marginals, CrfError> {
        if x.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let tokens = self.index_tokens(x);
        Ok(marginals_of(&self.index, &self.weights, &tokens))
    }

    /// Regularized negative log-likelihood and its gradient at the model's
    /// current weights. Features of `batch` unseen at training time are
    /// dropped, exactly as in decoding.
    pub fn nll_and_gradient(
        &self,
        batch: &[LabeledSequence],
        sigma2: f64,
    ) -> Result<(f64, Vec<f64>), CrfError> {
        let indexed = index_batch(&self.index, batch)?;
        let observed = observed_counts(&self.index, &indexed);
        Ok(nll_grad(
            &self.index,
            &self.weights,
            &indexed,
            &observed,
            sigma2,
        ))
    }

    /// Argmax label path, ties broken toward the lower label ordinal.
    pub fn viterbi_raw(&self, x: &[FeatureVector]) -> Result<Vec<HolderLabel>, CrfError> {
        self.decode(x, BioMode::Raw)
    }

    /// [`Self::decode`] with the default repair mode.
    pub fn viterbi(&self, x: &[FeatureVector]) -> Result<Vec<HolderLabel>, CrfError> {
        self.decode(x, BioMode::Repair)
    }

    pub fn decode(&self, x: &[FeatureVector], mode: BioMode) -> Result<Vec<HolderLabel>, CrfError> {
        if x.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let tokens = self.index_tokens(x);
        let forbid = mode == BioMode::ForbidInvalid;
        let mut path = viterbi_path(&self.index, &self.weights, &tokens, forbid);
        if mode == BioMode::Repair {
            repair_bio(&mut path);
        }
        Ok(path.into_iter().map(HolderLabel::from_index).collect())
    }
}

fn emissions_of(weights: &[f64], fids: &[u32]) -> [f64; L] {
    let mut scores = [0.0; L];
    for &fid in fids {
        let base = fid as usize * L;
        for (j, s) in scores.iter_mut().enumerate() {
            *s += weights[base + j];
        }
    }
    scores
}

fn path_score(index: &FeatureIndex, weights: &[f64], tokens: &[Vec<u32>], labels: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut prev = START;
    for (fids, &label) in tokens.iter().zip(labels) {
        for &fid in fids {
            total += weights[FeatureIndex::emission_param(fid, label)];
        }
        total += weights[index.transition_param(prev, label)];
        prev = label;
    }
    total
}

fn forward(index: &FeatureIndex, weights: &[f64], tokens: &[Vec<u32>]) -> (Vec<[f64; L]>, f64) {
    let mut alpha = Vec::with_capacity(tokens.len());
    let emit0 = emissions_of(weights, &tokens[0]);
    let mut first = [0.0; L];
    for j in 0..L {
        first[j] = emit0[j] + weights[index.transition_param(START, j)];
    }
    alpha.push(first);
    for fids in &tokens[1..] {
        let emit = emissions_of(weights, fids);
        let prev = *alpha.last().expect("alpha starts non-empty");
        let mut next = [0.0; L];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut acc = f64::NEG_INFINITY;
            for (i, &p) in prev.iter().enumerate() {
                acc = logsumexp2(acc, p + weights[index.transition_param(i, j)]);
            }
            *slot = acc + emit[j];
        }
        alpha.push(next);
    }
    let log_z = logsumexp(alpha.last().expect("non-empty"));
    (alpha, log_z)
}

fn backward(index: &FeatureIndex, weights: &[f64], tokens: &[Vec<u32>]) -> Vec<[f64; L]> {
    let t_len = tokens.len();
    let mut beta = vec![[0.0; L]; t_len];
    for t in (0..t_len - 1).rev() {
        let emit_next = emissions_of(weights, &tokens[t + 1]);
        for i in 0..L {
            let mut acc = f64::NEG_INFINITY;
            for j in 0..L {
                acc = logsumexp2(
                    acc,
                    weights[index.transition_param(i, j)] + emit_next[j] + beta[t + 1][j],
                );
            }
            beta[t][i] = acc;
        }
    }
    beta
}

fn marginals_of(index: &FeatureIndex, weights: &[f64], tokens: &[Vec<u32>]) -> Marginals {
    let (alpha, log_z) = forward(index, weights, tokens);
    let beta = backward(index, weights, tokens);
    let t_len = tokens.len();
    let mut positions = vec![[0.0; L]; t_len];
    for t in 0..t_len {
        for j in 0..L {
            positions[t][j] = (alpha[t][j] + beta[t][j] - log_z).exp();
        }
    }
    let mut edges = vec![[[0.0; L]; L]; t_len.saturating_sub(1)];
    for t in 0..t_len.saturating_sub(1) {
        let emit_next = emissions_of(weights, &tokens[t + 1]);
        for i in 0..L {
            for j in 0..L {
                edges[t][i][j] = (alpha[t][i]
                    + weights[index.transition_param(i, j)]
                    + emit_next[j]
                    + beta[t + 1][j]
                    - log_z)
                    .exp();
            }
        }
    }
    Marginals {
        positions,
        edges,
        log_z,
    }
}

struct IndexedSequence {
    tokens: Vec<Vec<u32>>,
    labels: Vec<usize>,
}

fn index_batch(
    index: &FeatureIndex,
    batch: &[LabeledSequence],
) -> Result<Vec<IndexedSequence>, CrfError> {
    batch
        .iter()
        .enumerate()
        .map(|(i, seq)| {
            if seq.features.len() != seq.labels.len() {
                return Err(CrfError::LengthMismatch {
                    features: seq.features.len(),
                    labels: seq.labels.len(),
                });
            }
            if seq.features.is_empty() {
                return Err(CrfError::EmptySequence);
            }
            if let Err(position) = validate_bio(&seq.labels) {
                return Err(CrfError::InvalidBio { index: i, position });
            }
            Ok(IndexedSequence {
                tokens: seq
                    .features
                    .iter()
                    .map(|fv| {
                        fv.features
                            .iter()
                            .filter_map(|f| index.feature_id(f))
                            .collect()
                    })
                    .collect(),
                labels: seq.labels.iter().map(|l| l.index()).collect(),
            })
        })
        .collect()
}

/// Gold feature counts, the data-dependent constant part of the gradient.
fn observed_counts(index: &FeatureIndex, batch: &[IndexedSequence]) -> Vec<f64> {
    let mut counts = vec![0.0; index.num_parameters()];
    for seq in batch {
        let mut prev = START;
        for (fids, &label) in seq.tokens.iter().zip(&seq.labels) {
            for &fid in fids {
                counts[FeatureIndex::emission_param(fid, label)] += 1.0;
            }
            counts[index.transition_param(prev, label)] += 1.0;
            prev = label;
        }
    }
    counts
}

/// Objective `sum_i [log Z(x_i) - score(x_i, y_i)] + |w|^2 / (2 sigma^2)`
/// and its gradient `E_model[f] - observed[f] + w / sigma^2`.
fn nll_grad(
    index: &FeatureIndex,
    weights: &[f64],
    batch: &[IndexedSequence],
    observed: &[f64],
    sigma2: f64,
) -> (f64, Vec<f64>) {
    let mut objective = 0.0;
    let mut grad = vec![0.0; weights.len()];
    for seq in batch {
        let m = marginals_of(index, weights, &seq.tokens);
        objective += m.log_z - path_score(index, weights, &seq.tokens, &seq.labels);
        for (t, fids) in seq.tokens.iter().enumerate() {
            for &fid in fids {
                for j in 0..L {
                    grad[FeatureIndex::emission_param(fid, j)] += m.positions[t][j];
                }
            }
        }
        for j in 0..L {
            grad[index.transition_param(START, j)] += m.positions[0][j];
        }
        for edge in &m.edges {
            for i in 0..L {
                for j in 0..L {
                    grad[index.transition_param(i, j)] += edge[i][j];
                }
            }
        }
    }
    for (g, o) in grad.iter_mut().zip(observed) {
        *g -= o;
    }
    if sigma2.is_finite() {
        for (g, w) in grad.iter_mut().zip(weights) {
            *g += w / sigma2;
        }
        objective += weights.iter().map(|w| w * w).sum::<f64>() / (2.0 * sigma2);
    }
    (objective, grad)
}

fn viterbi_path(
    index: &FeatureIndex,
    weights: &[f64],
    tokens: &[Vec<u32>],
    forbid_invalid: bool,
) -> Vec<usize> {
    let trans = |prev: usize, label: usize| -> f64 {
        if forbid_invalid
            && label == HolderLabel::IHolder.index()
            && (prev == START || prev == HolderLabel::NonHolder.index())
        {
            return f64::NEG_INFINITY;
        }
        weights[index.transition_param(prev, label)]
    };
    let t_len = tokens.len();
    let mut delta = vec![[0.0; L]; t_len];
    let mut back = vec![[0usize; L]; t_len];
    let emit0 = emissions_of(weights, &tokens[0]);
    for j in 0..L {
        delta[0][j] = emit0[j] + trans(START, j);
    }
    for t in 1..t_len {
        let emit = emissions_of(weights, &tokens[t]);
        for j in 0..L {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for (i, &prev) in delta[t - 1].iter().enumerate() {
                let score = prev + trans(i, j);
                // Strict improvement keeps the lowest ordinal on ties.
                if score > best {
                    best = score;
                    arg = i;
                }
            }
            delta[t][j] = best + emit[j];
            back[t][j] = arg;
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut label = 0;
    for (j, &score) in delta[t_len - 1].iter().enumerate() {
        if score > best {
            best = score;
            label = j;
        }
    }
    let mut path = vec![0usize; t_len];
    path[t_len - 1] = label;
    for t in (1..t_len).rev() {
        path[t - 1] = back[t][path[t]];
    }
    path
}

fn repair_bio(path: &mut [usize]) {
    let i_holder = HolderLabel::IHolder.index();
    let b_holder = HolderLabel::BHolder.index();
    let non_holder = HolderLabel::NonHolder.index();
    let mut prev = non_holder;
    for label in path.iter_mut() {
        if *label == i_holder && prev == non_holder {
            *label = b_holder;
        }
        prev = *label;
    }
}

/// Trains a model on `data`. The feature index is frozen over the training
/// data; optimization starts from zero weights and is fully deterministic
/// given the config and data order.
pub fn train(data: &[LabeledSequence], cfg: &TrainConfig) -> Result<CrfModel, CrfError> {
    if data.is_empty() {
        return Err(CrfError::EmptyBatch);
    }
    let mut index = FeatureIndex::new();
    for seq in data {
        for fv in &seq.features {
            for feature in &fv.features {
                index.intern(feature);
            }
        }
    }
    let indexed = index_batch(&index, data)?;
    let observed = observed_counts(&index, &indexed);
    let outcome = optimizer::minimize(
        cfg.optimizer,
        |w| nll_grad(&index, w, &indexed, &observed, cfg.sigma2),
        vec![0.0; index.num_parameters()],
        cfg.max_iters,
        cfg.tol,
    )?;
    let meta = TrainMeta {
        sigma2: cfg.sigma2,
        iterations: outcome.iterations,
        objective: outcome.objective,
    };
    CrfModel::from_parts(index, outcome.point, meta)
}
