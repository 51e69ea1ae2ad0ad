//! Language identification for six closely related Nordic languages.
//!
//! This crate holds the algorithmic half of the toolkit and builds without the
//! standard library (it needs `alloc`). File formats, model persistence and the
//! command-line frontend live in the companion `ndsl` crate.
//!
//! The pipeline runs left to right through the modules:
//!
//! - [`corpus`]: sentence extraction, character cleaning, stratified sampling
//!   and seeded train/test splits.
//! - [`features`]: character n-gram and word vocabularies, sparse count vectors,
//!   per-language character profiles.
//! - [`embeddings`]: CBOW and skip-gram embeddings with subword buckets, plus a
//!   supervised averaged-embedding classifier.
//! - [`classifiers`]: k-nearest neighbours, softmax regression, multinomial
//!   naive Bayes and a one-vs-rest linear SVM.
//! - [`neural`]: a multilayer perceptron and a one-layer text CNN with
//!   hand-written backpropagation.
//! - [`reduce`]: PCA by power iteration and exact t-SNE.
//! - [`eval`]: confusion matrices, accuracy and length-based failure analysis.
//!
//! All training is single-threaded and seeded, so identical inputs give
//! bit-identical models.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classifiers;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod eval;
pub mod features;
mod label;
pub(crate) mod math;
pub mod neural;
pub mod pipeline;
pub mod reduce;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use label::{Label, NUM_LABELS};
