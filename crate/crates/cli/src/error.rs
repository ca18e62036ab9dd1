use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] stimemit::Error),

    #[error("invalid request: {0}")]
    InvalidSpec(String),

    #[error("{path}:{line}: {message}")]
    PulseFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("acceptance checks failed: {}", .0.join(", "))]
    AcceptanceFailed(Vec<String>),
}

impl CliError {
    /// Process exit status: 1 for bad input, 2 for failed acceptance
    /// checks, 3 when a numerical engine did not converge.
    pub fn exit_code(&self) -> i32 {
        use stimemit::Error as E;
        match self {
            CliError::AcceptanceFailed(_) => 2,
            CliError::Core(E::NotConverged { .. } | E::QuadratureNotConverged { .. } | E::ComplexCrossTerm { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::InvalidSpec("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(stimemit::Error::NonPositiveAlpha(0.0)).exit_code(), 1);
        assert_eq!(CliError::AcceptanceFailed(vec![]).exit_code(), 2);
        assert_eq!(
            CliError::Core(stimemit::Error::NotConverged { residual: 0.1 }).exit_code(),
            3
        );
    }
}
