use nade_core::{
    BoundError, CodingError, EntropyError, ExpansionError, MatrixError, SequenceError, SystemError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, or arguments that do not fit together.
    #[error("{0}")]
    Input(String),
    /// A hypothesis required by the command does not hold.
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Hypothesis(_) => 2,
            CliError::Input(_) | CliError::Output { .. } => 3,
            CliError::NonConvergence(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Hypothesis(_) => "hypothesis",
            CliError::NonConvergence(_) => "non_convergence",
            CliError::Output { .. } => "output",
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::NoConvergence { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::NotATransitionMatrix(m) => m.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CodingError> for CliError {
    fn from(e: CodingError) -> Self {
        match e {
            CodingError::NotCoupledExpanding { .. } => CliError::Hypothesis(e.to_string()),
            CodingError::NoContraction { lambda, .. } if lambda <= 1.0 => {
                CliError::Hypothesis(format!("(ii_a): {e}"))
            }
            CodingError::NoContraction { .. } => CliError::NonConvergence(e.to_string()),
            CodingError::Matrix(m) => m.into(),
            CodingError::Expansion(x) => x.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        match e {
            BoundError::Refused { .. } => CliError::Hypothesis(e.to_string()),
            BoundError::Matrix(m) => m.into(),
            BoundError::Expansion(x) => x.into(),
        }
    }
}
