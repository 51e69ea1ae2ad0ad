//! Two-dimensional projections of feature vectors: PCA by power iteration
//! and exact t-SNE.

mod pca;
mod tsne;

pub use pca::{covariance, pca_project, top_eigenpairs, CovarianceMatrix, EigenPair, PcaResult, EIGEN_MAX_ITER, EIGEN_TOL};
pub use tsne::{
    tsne_affinities, tsne_optimize, Affinities, TsneConfig, TsneResult, DEFAULT_PERPLEXITY, GRADIENT_CLAMP,
    PERPLEXITY_TOL,
};

use alloc::vec::Vec;

use crate::{Error, Label, Result};

/// Labelled 2-D coordinates, one row per input point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Projection2D {
    pub points: Vec<(Label, f64, f64)>,
}

impl Projection2D {
    /// Pairs labels with the first two coordinates of each row.
    pub fn from_coords(labels: &[Label], coords: &[Vec<f64>]) -> Result<Self> {
        if labels.len() != coords.len() {
            return Err(Error::LengthMismatch(labels.len(), coords.len()));
        }
        let points = labels
            .iter()
            .zip(coords)
            .map(|(&l, c)| (l, c.first().copied().unwrap_or(0.0), c.get(1).copied().unwrap_or(0.0)))
            .collect();
        Ok(Self { points })
    }
}

/// Validates that `data` holds at least `min` rows of one common length.
fn check_rows(data: &[Vec<f64>], min: usize) -> Result<usize> {
    if data.len() < min {
        return Err(Error::TooFewPoints(data.len()));
    }
    let d = data[0].len();
    if let Some(bad) = data.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
    }
    Ok(d)
}
