//! One-layer text CNN: token embedding, valid 1-D convolution, ReLU, global
//! max pooling, dense softmax.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{softmax, xavier, TrainConfig, TrainHistory};
use crate::corpus::Dataset;
use crate::features::{char_ngrams, Vocabulary};
use crate::label::argmax;
use crate::math::{axpy, dot, ln};
use crate::{rng, Error, Label, Result, NUM_LABELS};

/// Reserved sequence index for padding. Its embedding row is pinned at zero.
pub const PAD: u32 = 0;
/// Reserved sequence index for n-grams missing from the vocabulary.
pub const UNK: u32 = 1;
const RESERVED: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CnnConfig {
    /// Character n-gram order of the input tokens.
    pub gram: usize,
    pub embed_dim: usize,
    pub filters: usize,
    pub kernel: usize,
    /// Sequences are padded or truncated to this many tokens.
    pub max_len: usize,
    pub train: TrainConfig,
}

impl Default for CnnConfig {
    fn default() -> Self {
        Self { gram: 2, embed_dim: 16, filters: 64, kernel: 3, max_len: 128, train: TrainConfig::cnn_default() }
    }
}

impl CnnConfig {
    fn validate(&self) -> Result<()> {
        if self.gram == 0 || self.embed_dim == 0 || self.filters == 0 || self.kernel == 0 {
            return Err(Error::InvalidConfig("gram, embed_dim, filters and kernel must be positive"));
        }
        if self.kernel > self.max_len {
            return Err(Error::InvalidConfig("kernel must not exceed max_len"));
        }
        self.train.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnModel {
    pub gram: usize,
    pub vocab: Vocabulary,
    pub embed_dim: usize,
    pub filters: usize,
    pub kernel: usize,
    pub max_len: usize,
    /// `(vocab.len() + 2) × embed_dim`; row 0 is padding, row 1 unknown.
    pub embedding: Vec<f64>,
    /// `filters × kernel × embed_dim`
    pub conv_w: Vec<f64>,
    pub conv_b: Vec<f64>,
    /// `6 × filters`
    pub dense_w: Vec<f64>,
    pub dense_b: Vec<f64>,
}

/// Gradient with the model's parameter layout. The padding row of
/// `embedding` is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CnnGradient {
    pub embedding: Vec<f64>,
    pub conv_w: Vec<f64>,
    pub conv_b: Vec<f64>,
    pub dense_w: Vec<f64>,
    pub dense_b: Vec<f64>,
}

impl CnnGradient {
    fn zeros_like(m: &CnnModel) -> Self {
        Self {
            embedding: vec![0.0; m.embedding.len()],
            conv_w: vec![0.0; m.conv_w.len()],
            conv_b: vec![0.0; m.conv_b.len()],
            dense_w: vec![0.0; m.dense_w.len()],
            dense_b: vec![0.0; m.dense_b.len()],
        }
    }

    fn clear(&mut self) {
        for v in [&mut self.embedding, &mut self.conv_w, &mut self.conv_b, &mut self.dense_w, &mut self.dense_b] {
            v.fill(0.0);
        }
    }
}

struct Forward {
    /// `positions × filters` pre-activations.
    conv: Vec<f64>,
    pooled: Vec<f64>,
    argmax: Vec<usize>,
    posterior: Vec<f64>,
}

impl CnnModel {
    /// Seeded initialization for a given vocabulary: embeddings uniform in
    /// ±0.05, convolution and dense weights Xavier-uniform, biases zero.
    pub fn init(vocab: Vocabulary, cfg: &CnnConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = rng::seeded(cfg.train.seed);
        let rows = vocab.len() + RESERVED;
        let e = cfg.embed_dim;
        let mut embedding: Vec<f64> = (0..rows * e).map(|_| rng.random_range(-0.05..0.05)).collect();
        embedding[..e].fill(0.0);
        let fan_in = cfg.kernel * e;
        Ok(Self {
            gram: cfg.gram,
            vocab,
            embed_dim: e,
            filters: cfg.filters,
            kernel: cfg.kernel,
            max_len: cfg.max_len,
            embedding,
            conv_w: xavier(&mut rng, fan_in, cfg.filters, cfg.filters * fan_in),
            conv_b: vec![0.0; cfg.filters],
            dense_w: xavier(&mut rng, cfg.filters, NUM_LABELS, NUM_LABELS * cfg.filters),
            dense_b: vec![0.0; NUM_LABELS],
        })
    }

    pub fn vocab_rows(&self) -> usize {
        self.vocab.len() + RESERVED
    }

    /// Token indices for `text`, padded with [`PAD`] or truncated to `max_len`.
    pub fn encode(&self, text: &str) -> Result<Vec<u32>> {
        let mut seq: Vec<u32> = char_ngrams(text, self.gram)
            .take(self.max_len)
            .map(|g| self.vocab.get(g).map_or(UNK, |i| (i + RESERVED) as u32))
            .collect();
        if seq.is_empty() {
            return Err(Error::SequenceTooShort);
        }
        seq.resize(self.max_len, PAD);
        Ok(seq)
    }

    pub fn conv_positions(&self) -> usize {
        self.max_len - self.kernel + 1
    }

    fn check(&self, seq: &[u32]) -> Result<()> {
        if seq.len() != self.max_len {
            return Err(Error::DimensionMismatch { expected: self.max_len, found: seq.len() });
        }
        if let Some(&bad) = seq.iter().find(|&&t| t as usize >= self.vocab_rows()) {
            return Err(Error::DimensionMismatch { expected: self.vocab_rows(), found: bad as usize + 1 });
        }
        if seq[0] == PAD {
            return Err(Error::SequenceTooShort);
        }
        Ok(())
    }

    #[inline]
    fn emb(&self, token: u32) -> &[f64] {
        let e = self.embed_dim;
        &self.embedding[token as usize * e..(token as usize + 1) * e]
    }

    #[inline]
    fn filter(&self, f: usize) -> &[f64] {
        let w = self.kernel * self.embed_dim;
        &self.conv_w[f * w..(f + 1) * w]
    }

    fn run(&self, seq: &[u32]) -> Forward {
        let (h, e, nf) = (self.kernel, self.embed_dim, self.filters);
        let positions = self.conv_positions();
        let real = seq.iter().position(|&t| t == PAD).unwrap_or(seq.len());
        let mut conv = vec![0.0; positions * nf];
        for t in 0..positions {
            let out = &mut conv[t * nf..(t + 1) * nf];
            out.copy_from_slice(&self.conv_b);
            // windows lying wholly in the padding see only zero rows
            if t >= real {
                continue;
            }
            for j in 0..h {
                let tok = seq[t + j];
                if tok == PAD {
                    continue;
                }
                let x = self.emb(tok);
                for (f, o) in out.iter_mut().enumerate() {
                    *o += dot(&self.filter(f)[j * e..(j + 1) * e], x);
                }
            }
        }
        let mut pooled = vec![0.0; nf];
        let mut arg = vec![0usize; nf];
        for f in 0..nf {
            let mut best = 0;
            for t in 1..positions {
                if conv[t * nf + f] > conv[best * nf + f] {
                    best = t;
                }
            }
            arg[f] = best;
            pooled[f] = conv[best * nf + f].max(0.0);
        }
        let logits: Vec<f64> = (0..NUM_LABELS)
            .map(|k| self.dense_b[k] + dot(&self.dense_w[k * nf..(k + 1) * nf], &pooled))
            .collect();
        Forward { conv, pooled, argmax: arg, posterior: softmax(&logits) }
    }

    /// ReLU of the convolution, `(max_len − kernel + 1) × filters`, row-major.
    pub fn conv_activations(&self, seq: &[u32]) -> Result<Vec<f64>> {
        self.check(seq)?;
        Ok(self.run(seq).conv.into_iter().map(|x| x.max(0.0)).collect())
    }

    pub fn pooled(&self, seq: &[u32]) -> Result<Vec<f64>> {
        self.check(seq)?;
        Ok(self.run(seq).pooled)
    }

    pub fn forward(&self, seq: &[u32]) -> Result<Vec<f64>> {
        self.check(seq)?;
        Ok(self.run(seq).posterior)
    }

    pub fn predict(&self, text: &str) -> Result<(Label, Vec<f64>)> {
        let p = self.forward(&self.encode(text)?)?;
        Ok((Label::ALL[argmax(&p)], p))
    }

    pub fn loss_and_gradient(&self, seq: &[u32], y: Label) -> Result<(f64, CnnGradient)> {
        self.check(seq)?;
        let mut g = CnnGradient::zeros_like(self);
        let loss = self.accumulate(seq, y, 1.0, &mut g);
        Ok((loss, g))
    }

    fn accumulate(&self, seq: &[u32], y: Label, scale: f64, g: &mut CnnGradient) -> f64 {
        let (e, nf) = (self.embed_dim, self.filters);
        let fw = self.kernel * e;
        let fwd = self.run(seq);
        let loss = -ln(fwd.posterior[y.index()].max(super::CCE_FLOOR));
        let mut dz = fwd.posterior;
        dz[y.index()] -= 1.0;
        let mut dpooled = vec![0.0; nf];
        for k in 0..NUM_LABELS {
            g.dense_b[k] += scale * dz[k];
            axpy(scale * dz[k], &fwd.pooled, &mut g.dense_w[k * nf..(k + 1) * nf]);
            axpy(dz[k], &self.dense_w[k * nf..(k + 1) * nf], &mut dpooled);
        }
        for f in 0..nf {
            let t = fwd.argmax[f];
            // ReLU after pooling: no gradient when the winning activation is clipped
            if fwd.conv[t * nf + f] <= 0.0 {
                continue;
            }
            let ds = scale * dpooled[f];
            g.conv_b[f] += ds;
            for j in 0..self.kernel {
                let tok = seq[t + j];
                if tok == PAD {
                    continue;
                }
                let x = self.emb(tok);
                axpy(ds, x, &mut g.conv_w[f * fw + j * e..f * fw + (j + 1) * e]);
                let w = &self.conv_w[f * fw + j * e..f * fw + (j + 1) * e];
                let row = tok as usize * e;
                axpy(ds, w, &mut g.embedding[row..row + e]);
            }
        }
        loss
    }

    fn apply(&mut self, g: &CnnGradient, lr: f64) {
        axpy(-lr, &g.embedding, &mut self.embedding);
        axpy(-lr, &g.conv_w, &mut self.conv_w);
        axpy(-lr, &g.conv_b, &mut self.conv_b);
        axpy(-lr, &g.dense_w, &mut self.dense_w);
        axpy(-lr, &g.dense_b, &mut self.dense_b);
    }
}

/// Builds the n-gram vocabulary from `train`, then runs mini-batch SGD.
pub fn cnn_train(train: &Dataset, test: Option<&Dataset>, cfg: &CnnConfig) -> Result<(CnnModel, TrainHistory)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for s in train {
        for g in char_ngrams(s.text(), cfg.gram) {
            *counts.entry(String::from(g)).or_insert(0) += 1;
        }
    }
    let mut model = CnnModel::init(Vocabulary::from_counts(counts, None), cfg)?;

    let mut examples: Vec<(Vec<u32>, Label)> = Vec::with_capacity(train.len());
    for s in train {
        // sentences too short for the gram order carry no tokens
        if let Ok(seq) = model.encode(s.text()) {
            examples.push((seq, s.label()));
        }
    }
    if examples.is_empty() {
        return Err(Error::SequenceTooShort);
    }
    let test_set: Option<Vec<(Result<Vec<u32>>, Label)>> =
        test.map(|t| t.iter().map(|s| (model.encode(s.text()), s.label())).collect());

    let mut rng = rng::seeded(cfg.train.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut grad = CnnGradient::zeros_like(&model);
    let mut history = TrainHistory::default();
    for _ in 0..cfg.train.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.train.batch_size) {
            grad.clear();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                epoch_loss += model.accumulate(&examples[i].0, examples[i].1, scale, &mut grad);
            }
            model.apply(&grad, cfg.train.learning_rate);
        }
        history.train_loss.push(epoch_loss / examples.len() as f64);
        if let Some(ts) = &test_set {
            let correct = ts
                .iter()
                .filter(|(seq, y)| matches!(seq, Ok(s) if Label::ALL[argmax(&model.run(s).posterior)] == *y))
                .count();
            history.test_accuracy.push(correct as f64 / ts.len().max(1) as f64);
        }
    }
    Ok((model, history))
}

/// One trained configuration of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry {
    pub gram: usize,
    pub kernel: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn accuracy(&self, gram: usize, kernel: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.gram == gram && e.kernel == kernel).map(|e| e.accuracy)
    }
}

/// Trains one CNN per `(gram, kernel)` pair and records test accuracy.
/// Test sentences that cannot be encoded count as errors.
pub fn kernel_size_sweep(
    train: &Dataset,
    test: &Dataset,
    grams: &[usize],
    kernels: &[usize],
    cfg: &CnnConfig,
) -> Result<SweepResult> {
    if test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut result = SweepResult::default();
    for &gram in grams {
        for &kernel in kernels {
            let run_cfg = CnnConfig { gram, kernel, ..cfg.clone() };
            let (model, _) = cnn_train(train, None, &run_cfg)?;
            let correct = test
                .iter()
                .filter(|s| matches!(model.predict(s.text()), Ok((l, _)) if l == s.label()))
                .count();
            result.entries.push(SweepEntry { gram, kernel, accuracy: correct as f64 / test.len() as f64 });
        }
    }
    Ok(result)
}
