use alloc::vec;
use alloc::vec::Vec;

use super::{check_dim, common_dim, Example};
use crate::features::FeatureVector;
use crate::label::argmax;
use crate::math::ln;
use crate::{Error, Label, Result, NUM_LABELS};

pub const DEFAULT_ALPHA: f64 = 1.0;

/// Multinomial naive Bayes with additive smoothing. `log_likelihoods` is
/// `6 × dim` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    pub alpha: f64,
    pub dim: usize,
    pub log_priors: [f64; NUM_LABELS],
    pub log_likelihoods: Vec<f64>,
}

/// Priors are label frequencies. With `alpha = 0`, features never seen
/// with a label get log-likelihood `-inf`.
pub fn train_nb(train: &[Example], alpha: f64) -> Result<NbModel> {
    let dim = common_dim(train)?;
    if !(alpha >= 0.0) || alpha.is_infinite() {
        return Err(Error::InvalidConfig("alpha must be finite and non-negative"));
    }
    let mut counts = vec![0.0; NUM_LABELS * dim];
    let mut totals = [0.0f64; NUM_LABELS];
    let mut docs = [0usize; NUM_LABELS];
    for (x, y) in train {
        let k = y.index();
        docs[k] += 1;
        for (i, v) in x.iter() {
            if v < 0.0 {
                return Err(Error::NegativeCount { index: i, value: v });
            }
            counts[k * dim + i] += v;
            totals[k] += v;
        }
    }
    let n = train.len() as f64;
    let mut log_priors = [0.0; NUM_LABELS];
    for k in 0..NUM_LABELS {
        log_priors[k] = ln(docs[k] as f64 / n);
    }
    let log_likelihoods = counts
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let denom = totals[j / dim.max(1)] + alpha * dim as f64;
            if denom == 0.0 {
                f64::NEG_INFINITY
            } else {
                ln((c + alpha) / denom)
            }
        })
        .collect();
    Ok(NbModel { alpha, dim, log_priors, log_likelihoods })
}

impl NbModel {
    /// `log p(C_k) + Σ_i x_i log p(i | C_k)` per label. Zero entries of `x`
    /// contribute nothing even when the likelihood is zero.
    pub fn log_scores(&self, x: &FeatureVector) -> Result<[f64; NUM_LABELS]> {
        check_dim(self.dim, x)?;
        let mut s = self.log_priors;
        for (k, sk) in s.iter_mut().enumerate() {
            let row = &self.log_likelihoods[k * self.dim..(k + 1) * self.dim];
            for (i, v) in x.iter() {
                *sk += v * row[i];
            }
        }
        Ok(s)
    }
}

pub fn nb_predict(model: &NbModel, x: &FeatureVector) -> Result<(Label, [f64; NUM_LABELS])> {
    let s = model.log_scores(x)?;
    Ok((Label::ALL[argmax(&s)], s))
}
