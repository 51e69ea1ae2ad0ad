use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing label file `{code}.txt` in {}", dir.display())]
    MissingLabelFile { dir: PathBuf, code: String },
    #[error("{}: invalid UTF-8 at byte {offset}", file.display())]
    InvalidUtf8 { file: PathBuf, offset: usize },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ndsl_core::Error,
    },
    #[error("{}: not a valid model file: {reason}", path.display())]
    ModelFormat { path: PathBuf, reason: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ndsl_core::Error),
}

/// Exit status for input errors (missing or unparsable files).
pub const EXIT_INPUT: u8 = 2;
/// Exit status for invalid flags or incompatible feature/model choices.
pub const EXIT_CONFIG: u8 = 3;
/// Exit status for numerical failures.
pub const EXIT_NUMERIC: u8 = 4;

fn core_exit_code(e: &ndsl_core::Error) -> u8 {
    use ndsl_core::Error as E;
    match e {
        E::InvalidConfig(_) | E::InvalidRatio(_) | E::InvalidK { .. } => EXIT_CONFIG,
        E::ConvergenceFailure { .. } | E::PerplexityInfeasible { .. } => EXIT_NUMERIC,
        E::Prediction { source, .. } => core_exit_code(source),
        _ => EXIT_INPUT,
    }
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => EXIT_CONFIG,
            Error::Core(e) | Error::Parse { source: e, .. } => core_exit_code(e),
            _ => EXIT_INPUT,
        }
    }
}
