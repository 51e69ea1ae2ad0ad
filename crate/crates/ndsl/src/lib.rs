//! File formats, model persistence and the command-line frontend for the
//! `ndsl-core` language identification library.
//!
//! Text artifacts are UTF-8 TSV/CSV/JSON (see [`formats`]); trained models are
//! stored in the binary `NDSL1` container (see [`model_file`]).

pub mod cli;
pub mod error;
pub mod formats;
pub mod ingest;
pub mod model_file;

pub use error::{Error, Result};
