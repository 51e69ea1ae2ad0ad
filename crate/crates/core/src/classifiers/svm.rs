use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{check_dim, common_dim, Example};
use crate::features::FeatureVector;
use crate::label::argmax;
use crate::{rng, Error, Label, Result, NUM_LABELS};

#[derive(Debug, Clone, PartialEq)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { lambda: 1e-4, epochs: 50, seed: 42 }
    }
}

/// Six one-vs-rest linear scorers `w_k · x + b_k`. `weights` is `6 × dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub biases: [f64; NUM_LABELS],
    pub config: SvmConfig,
}

impl SvmModel {
    pub fn zeros(dim: usize, config: SvmConfig) -> Self {
        Self { dim, weights: vec![0.0; NUM_LABELS * dim], biases: [0.0; NUM_LABELS], config }
    }

    pub fn scores(&self, x: &FeatureVector) -> Result<[f64; NUM_LABELS]> {
        check_dim(self.dim, x)?;
        let mut s = self.biases;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += x.dot(&self.weights[k * self.dim..(k + 1) * self.dim]);
        }
        Ok(s)
    }

    /// Sum over the six binary problems of `λ/2 (‖w_k‖² + b_k²)` plus mean
    /// hinge loss. The bias is regularized because it is trained as the
    /// weight of a constant feature.
    pub fn objective(&self, data: &[Example]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyInput);
        }
        let lambda = self.config.lambda;
        let mut total = 0.0;
        for k in 0..NUM_LABELS {
            let w = &self.weights[k * self.dim..(k + 1) * self.dim];
            let norm: f64 = w.iter().map(|v| v * v).sum::<f64>() + self.biases[k] * self.biases[k];
            total += 0.5 * lambda * norm;
        }
        let mut hinge = 0.0;
        for (x, y) in data {
            let s = self.scores(x)?;
            for (k, sk) in s.iter().enumerate() {
                let yk = if y.index() == k { 1.0 } else { -1.0 };
                hinge += (1.0 - yk * sk).max(0.0);
            }
        }
        Ok(total + hinge / data.len() as f64)
    }
}

/// Scaled weight vector `scale · v`, so the Pegasos shrink step is O(1).
struct Scaled {
    scale: f64,
    v: Vec<f64>,
}

impl Scaled {
    fn score(&self, x: &FeatureVector, dim: usize) -> f64 {
        self.scale * (x.dot(&self.v[..dim]) + self.v[dim])
    }

    fn shrink(&mut self, factor: f64) {
        if factor == 0.0 {
            self.v.fill(0.0);
            self.scale = 1.0;
            return;
        }
        self.scale *= factor;
        if self.scale < 1e-9 {
            for x in &mut self.v {
                *x *= self.scale;
            }
            self.scale = 1.0;
        }
    }

    fn add(&mut self, alpha: f64, x: &FeatureVector, dim: usize) {
        let a = alpha / self.scale;
        x.add_scaled_to(a, &mut self.v[..dim]);
        self.v[dim] += a;
    }
}

/// Pegasos on the L2-regularized hinge loss, one-vs-rest. Step `t` uses
/// `η = 1/(λt)`; all six problems share the per-epoch shuffle. The returned
/// weights are the running average of all iterates.
pub fn train_svm(train: &[Example], cfg: &SvmConfig) -> Result<SvmModel> {
    Ok(train_svm_traced(train, cfg)?.0)
}

/// As [`train_svm`], also returning the objective of the averaged weights
/// at the end of every epoch.
pub fn train_svm_traced(train: &[Example], cfg: &SvmConfig) -> Result<(SvmModel, Vec<f64>)> {
    let dim = common_dim(train)?;
    if !(cfg.lambda > 0.0) || cfg.lambda.is_infinite() {
        return Err(Error::InvalidConfig("lambda must be positive"));
    }
    let mut ws: Vec<Scaled> = (0..NUM_LABELS).map(|_| Scaled { scale: 1.0, v: vec![0.0; dim + 1] }).collect();
    let mut rng = rng::seeded(cfg.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut model = SvmModel::zeros(dim, cfg.clone());
    // running sums of the iterates
    let mut avg: Vec<Vec<f64>> = vec![vec![0.0; dim + 1]; NUM_LABELS];
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (cfg.lambda * t as f64);
            let (x, y) = &train[i];
            for (k, w) in ws.iter_mut().enumerate() {
                let yk = if y.index() == k { 1.0 } else { -1.0 };
                let violated = yk * w.score(x, dim) < 1.0;
                w.shrink(1.0 - 1.0 / t as f64);
                if violated {
                    w.add(eta * yk, x, dim);
                }
                crate::math::axpy(w.scale, &w.v, &mut avg[k]);
            }
        }
        let n = t as f64;
        for (k, a) in avg.iter().enumerate() {
            for (dst, &v) in model.weights[k * dim..(k + 1) * dim].iter_mut().zip(a) {
                *dst = v / n;
            }
            model.biases[k] = a[dim] / n;
        }
        history.push(model.objective(train)?);
    }
    Ok((model, history))
}

pub fn svm_predict(model: &SvmModel, x: &FeatureVector) -> Result<Label> {
    Ok(Label::ALL[argmax(&model.scores(x)?)])
}
