//! Classical supervised models over sparse [`FeatureVector`] inputs.
//!
//! Dense sentence embeddings go through [`FeatureVector::from_dense`].

mod knn;
mod logreg;
mod nb;
mod svm;

pub use knn::{knn_predict, train_knn, KnnModel, DEFAULT_K};
pub use logreg::{logreg_predict, train_logreg, LogRegConfig, LogRegModel};
pub use nb::{nb_predict, train_nb, NbModel, DEFAULT_ALPHA};
pub use svm::{svm_predict, train_svm, train_svm_traced, SvmConfig, SvmModel};

use crate::features::FeatureVector;
use crate::{Error, Label, Result};

/// A training example.
pub type Example = (FeatureVector, Label);

/// Common dimension of all examples.
fn common_dim(train: &[Example]) -> Result<usize> {
    let dim = train.first().ok_or(Error::EmptyInput)?.0.dim();
    for (x, _) in train {
        check_dim(dim, x)?;
    }
    Ok(dim)
}

fn check_dim(expected: usize, x: &FeatureVector) -> Result<()> {
    if x.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: x.dim() });
    }
    Ok(())
}
