use kobalt::c01::C01Error;
use kobalt::domains::DomainError;
use kobalt::holo::{ContinuationError, EvalError, ParseError};
use kobalt::kobayashi::KobayashiError;
use kobalt::poincare::GeometryError;
use kobalt::rescaling::RescalingError;
use kobalt::theorems::TheoremError;
use thiserror::Error;

/// A failed run. Invalid input exits with 1, numerical failure with 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn validation(e: impl ToString) -> CliError {
    CliError::Validation(e.to_string())
}

fn numeric(e: impl ToString) -> CliError {
    CliError::Numeric(e.to_string())
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        validation(e)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        validation(e)
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        validation(e)
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        numeric(e)
    }
}

impl From<ContinuationError> for CliError {
    fn from(e: ContinuationError) -> Self {
        match e {
            ContinuationError::EmptyPath | ContinuationError::BaseMismatch { .. } => validation(e),
            _ => numeric(e),
        }
    }
}

impl From<C01Error> for CliError {
    fn from(e: C01Error) -> Self {
        match e {
            C01Error::Continuation { .. } | C01Error::Eval(_) => numeric(e),
            _ => validation(e),
        }
    }
}

impl From<KobayashiError> for CliError {
    fn from(e: KobayashiError) -> Self {
        match e {
            KobayashiError::Domain(d) => d.into(),
            KobayashiError::C01(c) => c.into(),
            KobayashiError::Quadrature(_) | KobayashiError::InconsistentBounds { .. } => numeric(e),
            _ => validation(e),
        }
    }
}

impl From<RescalingError> for CliError {
    fn from(e: RescalingError) -> Self {
        match e {
            RescalingError::Eval(_) => numeric(e),
            RescalingError::Continuation(c) => c.into(),
            _ => validation(e),
        }
    }
}

impl From<TheoremError> for CliError {
    fn from(e: TheoremError) -> Self {
        match e {
            TheoremError::C01(c) => c.into(),
            TheoremError::Domain(d) => d.into(),
            TheoremError::Kobayashi(k) => k.into(),
            _ => validation(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
