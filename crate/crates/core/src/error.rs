//! Crate-level error with the process exit code each failure maps to.

use serde_json::{json, Value};
use thiserror::Error;

use crate::automata::AutomataError;
use crate::closure::ClosureError;
use crate::exactlin::LinAlgError;
use crate::facttree::TreeError;
use crate::lang::LangError;
use crate::reduce::ReduceError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Io(_) => 2,
            Error::Infeasible(_) => 3,
            Error::OracleDisagreement(_) => 4,
            Error::Internal(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Schema(_) => "schema",
            Error::Io(_) => "io",
            Error::Infeasible(_) => "infeasible",
            Error::OracleDisagreement(_) => "oracle_disagreement",
            Error::Internal(_) => "internal",
        }
    }

    /// Structured form for the error stream.
    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() })
    }
}

impl From<ClosureError> for Error {
    fn from(e: ClosureError) -> Self {
        match e {
            ClosureError::Infeasible(m) => Error::Infeasible(m),
            ClosureError::Argument(m) => Error::Schema(m),
            ClosureError::Internal(m) => Error::Internal(m),
            ClosureError::Automata(a) => a.into(),
            ClosureError::Lang(l) => l.into(),
        }
    }
}

impl From<AutomataError> for Error {
    fn from(e: AutomataError) -> Self {
        match e {
            AutomataError::Infeasible { .. } => Error::Infeasible(e.to_string()),
            AutomataError::Tree(TreeError::Invariant(m)) => Error::Internal(m),
            other => Error::Schema(other.to_string()),
        }
    }
}

impl From<LangError> for Error {
    fn from(e: LangError) -> Self {
        match e {
            LangError::CapExceeded(_) => Error::Infeasible(e.to_string()),
            other => Error::Schema(other.to_string()),
        }
    }
}

impl From<LinAlgError> for Error {
    fn from(e: LinAlgError) -> Self {
        Error::Schema(e.to_string())
    }
}

impl From<ReduceError> for Error {
    fn from(e: ReduceError) -> Self {
        Error::Schema(e.to_string())
    }
}

impl From<TreeError> for Error {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Invariant(m) => Error::Internal(m),
            other => Error::Schema(other.to_string()),
        }
    }
}
