//! Checks shared between this crate's tests and the workspace acceptance suite.
#![allow(dead_code)]

pub mod adjacency;
pub mod gradients;
pub mod oracles;
pub mod tsne;
