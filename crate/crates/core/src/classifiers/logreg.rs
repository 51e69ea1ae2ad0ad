use alloc::vec;
use alloc::vec::Vec;

use super::{check_dim, common_dim, Example};
use crate::features::FeatureVector;
use crate::label::argmax;
use crate::neural::{cce_loss, softmax};
use crate::{Error, Label, Result, NUM_LABELS};

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Recorded for reproducibility; full-batch training draws no randomness.
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self { learning_rate: 0.5, epochs: 500, seed: 42 }
    }
}

/// Multinomial softmax regression. `weights` is `6 × (dim + 1)` row-major
/// with the bias in the last column.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub config: LogRegConfig,
}

impl LogRegModel {
    pub fn zeros(dim: usize, config: LogRegConfig) -> Self {
        Self { dim, weights: vec![0.0; NUM_LABELS * (dim + 1)], config }
    }

    fn row(&self, k: usize) -> &[f64] {
        let w = self.dim + 1;
        &self.weights[k * w..(k + 1) * w]
    }

    pub fn scores(&self, x: &FeatureVector) -> Result<[f64; NUM_LABELS]> {
        check_dim(self.dim, x)?;
        let mut z = [0.0; NUM_LABELS];
        for (k, zk) in z.iter_mut().enumerate() {
            let row = self.row(k);
            *zk = x.dot(row) + row[self.dim];
        }
        Ok(z)
    }

    pub fn posterior(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        Ok(softmax(&self.scores(x)?))
    }

    /// Mean cross-entropy over `data` and its gradient with respect to
    /// `weights`.
    pub fn loss_and_gradient(&self, data: &[Example]) -> Result<(f64, Vec<f64>)> {
        if data.is_empty() {
            return Err(Error::EmptyInput);
        }
        let w = self.dim + 1;
        let mut grad = vec![0.0; self.weights.len()];
        let mut loss = 0.0;
        let scale = 1.0 / data.len() as f64;
        for (x, y) in data {
            let mut p = self.posterior(x)?;
            loss += cce_loss(&p, *y);
            p[y.index()] -= 1.0;
            for (k, &pk) in p.iter().enumerate() {
                let row = &mut grad[k * w..(k + 1) * w];
                x.add_scaled_to(scale * pk, row);
                row[self.dim] += scale * pk;
            }
        }
        Ok((loss * scale, grad))
    }
}

/// Full-batch gradient descent on mean cross-entropy from zero weights.
pub fn train_logreg(train: &[Example], cfg: &LogRegConfig) -> Result<LogRegModel> {
    let dim = common_dim(train)?;
    if !(cfg.learning_rate > 0.0) {
        return Err(Error::InvalidConfig("learning rate must be positive"));
    }
    let mut model = LogRegModel::zeros(dim, cfg.clone());
    for _ in 0..cfg.epochs {
        let (_, grad) = model.loss_and_gradient(train)?;
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * g;
        }
    }
    Ok(model)
}

pub fn logreg_predict(model: &LogRegModel, x: &FeatureVector) -> Result<(Label, Vec<f64>)> {
    let p = model.posterior(x)?;
    Ok((Label::ALL[argmax(&p)], p))
}
