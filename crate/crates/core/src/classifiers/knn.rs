use alloc::vec::Vec;

use super::{check_dim, common_dim, Example};
use crate::features::FeatureVector;
use crate::math::sqrt;
use crate::{Error, Label, Result, NUM_LABELS};

pub const DEFAULT_K: usize = 3;

/// Brute-force k-nearest neighbours under Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub dim: usize,
    pub points: Vec<FeatureVector>,
    pub labels: Vec<Label>,
}

pub fn train_knn(train: &[Example], k: usize) -> Result<KnnModel> {
    let dim = common_dim(train)?;
    if k == 0 || k > train.len() {
        return Err(Error::InvalidK { k, n: train.len() });
    }
    Ok(KnnModel {
        k,
        dim,
        points: train.iter().map(|e| e.0.clone()).collect(),
        labels: train.iter().map(|e| e.1).collect(),
    })
}

impl KnnModel {
    /// The `k` nearest training indices with their squared distances,
    /// nearest first; equal distances keep training order.
    pub fn neighbours(&self, x: &FeatureVector) -> Result<Vec<(usize, f64)>> {
        check_dim(self.dim, x)?;
        let mut best: Vec<(usize, f64)> = Vec::with_capacity(self.k + 1);
        for (i, p) in self.points.iter().enumerate() {
            let d = p.squared_distance(x);
            if best.len() == self.k && d >= best[self.k - 1].1 {
                continue;
            }
            let pos = best.partition_point(|b| b.1 <= d);
            best.insert(pos, (i, d));
            best.truncate(self.k);
        }
        Ok(best)
    }
}

/// Majority vote of the `k` nearest points. Vote ties go to the label with
/// the smaller summed distance, then to the earlier label.
pub fn knn_predict(model: &KnnModel, x: &FeatureVector) -> Result<Label> {
    let mut votes = [0usize; NUM_LABELS];
    let mut dist = [0.0f64; NUM_LABELS];
    for (i, d2) in model.neighbours(x)? {
        let l = model.labels[i].index();
        votes[l] += 1;
        dist[l] += sqrt(d2);
    }
    let mut best = 0;
    for l in 1..NUM_LABELS {
        if votes[l] > votes[best] || (votes[l] == votes[best] && votes[l] > 0 && dist[l] < dist[best]) {
            best = l;
        }
    }
    Ok(Label::ALL[best])
}
