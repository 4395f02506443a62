use std::path::PathBuf;

use prefchoice::Phase;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("alpha = {alpha} is not above alpha_c = {alpha_c} (phase {phase}); {what} undefined")]
    Phase {
        alpha: f64,
        alpha_c: f64,
        phase: Phase,
        what: String,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("missing input {}: {reason}", path.display())]
    MissingInput { path: PathBuf, reason: String },
    #[error("{} was written under config {found}, expected {expected}", path.display())]
    HashMismatch {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] prefchoice::Error),
}

impl CliError {
    /// 0 ok, 1 other, 2 phase, 3 unwritable output, 4 missing or mismatched inputs.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Phase { .. } | CliError::Model(prefchoice::Error::Phase { .. }) => 2,
            CliError::Write { .. } => 3,
            CliError::MissingInput { .. } | CliError::HashMismatch { .. } => 4,
            CliError::Config(_) | CliError::Model(_) => 1,
        }
    }

    pub(crate) fn write(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Write { path, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
