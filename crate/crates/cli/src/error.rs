use eigenscale::matcore::MatrixError;
use eigenscale::{EigenError, ModelError, ScalingError, VarminError};
use thiserror::Error;

/// Failure of a command, carrying its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input file.
    #[error("{0}")]
    Input(String),
    /// Degenerate data or invalid sweep cells.
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Convergence(String),
    /// Failure writing results.
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Data(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        let msg = e.to_string();
        match e {
            MatrixError::DimensionTooSmall(_) | MatrixError::InvalidSpec(_) => CliError::Usage(msg),
            MatrixError::DegenerateEnsemble { .. } => CliError::Data(msg),
            MatrixError::MalformedHeader(_)
            | MatrixError::MalformedEntry { .. }
            | MatrixError::IndexOutOfRange { .. }
            | MatrixError::DuplicateEntry { .. }
            | MatrixError::Io(_) => CliError::Input(msg),
        }
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        let msg = e.to_string();
        match e {
            EigenError::NoConvergence { .. } => CliError::Convergence(msg),
            EigenError::DimensionTooLargeForDense(_) | EigenError::InvalidConfig(_) => {
                CliError::Usage(msg)
            }
            EigenError::ZeroVector | EigenError::LengthMismatch { .. } => CliError::Data(msg),
        }
    }
}

impl From<ScalingError> for CliError {
    fn from(e: ScalingError) -> Self {
        match e {
            ScalingError::Matrix(e) => e.into(),
            ScalingError::Eigen(e) => e.into(),
            ScalingError::InvalidSweep(msg) => CliError::Usage(format!("invalid sweep: {msg}")),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Matrix(e) => e.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<VarminError> for CliError {
    fn from(e: VarminError) -> Self {
        match e {
            VarminError::RowSums(e) => e.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
