//! Dense and convolutional classifiers with explicit backpropagation.

mod cnn;
mod mlp;

pub use cnn::{cnn_train, kernel_size_sweep, CnnConfig, CnnGradient, CnnModel, SweepEntry, SweepResult, PAD, UNK};
pub use mlp::{mlp_train, DenseLayer, MlpGradient, MlpModel};

use alloc::vec::Vec;

use rand::Rng as _;

use crate::math::{exp, ln, sqrt};
use crate::{Error, Label, Result};

/// Componentwise `max(0, z)`.
pub fn relu(z: &[f64]) -> Vec<f64> {
    z.iter().map(|&x| x.max(0.0)).collect()
}

/// Softmax with max-subtraction.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|&x| exp(x - m)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Probabilities are clamped here before taking the log.
pub const CCE_FLOOR: f64 = 1e-12;

/// `-ln pred[y]` for a single posterior.
pub fn cce_loss(pred: &[f64], y: Label) -> f64 {
    -ln(pred[y.index()].max(CCE_FLOOR))
}

/// Mean categorical cross-entropy over a batch.
pub fn cce_loss_batch(preds: &[Vec<f64>], ys: &[Label]) -> Result<f64> {
    if preds.len() != ys.len() {
        return Err(Error::LengthMismatch(preds.len(), ys.len()));
    }
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(preds.iter().zip(ys).map(|(p, &y)| cce_loss(p, y)).sum::<f64>() / preds.len() as f64)
}

/// `(1/n) Σ (pred_i − target_i)²`
pub fn mse_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch(pred.len(), target.len()));
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(pred.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / pred.len() as f64)
}

/// Mini-batch SGD settings shared by the MLP and the CNN.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn mlp_default() -> Self {
        Self { learning_rate: 0.1, epochs: 10, batch_size: 32, seed: 42 }
    }

    pub fn cnn_default() -> Self {
        Self { learning_rate: 0.05, epochs: 10, batch_size: 32, seed: 42 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig("learning rate, epochs and batch size must be positive"));
        }
        Ok(())
    }
}

/// Per-epoch training loss, plus held-out accuracy when a test set is given.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub test_accuracy: Vec<f64>,
}

pub(crate) fn xavier(rng: &mut crate::rng::Rng, fan_in: usize, fan_out: usize, n: usize) -> Vec<f64> {
    let limit = sqrt(6.0 / (fan_in + fan_out) as f64);
    (0..n).map(|_| rng.random_range(-limit..limit)).collect()
}
