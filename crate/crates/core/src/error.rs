use std::fmt;

use thiserror::Error;

use crate::formula::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which resource cap was hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    SatCalls,
    Timeout,
    Enumeration,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::SatCalls => "SAT-call budget exhausted",
            LimitKind::Timeout => "deadline exceeded",
            LimitKind::Enumeration => "enumeration cap exceeded",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid specification: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsatisfiable formula")]
    Unsatisfiable,
    #[error("assignment is not total over the inputs (missing variable {0})")]
    PartialAssignment(u32),
    #[error("resource limit: {0}")]
    Limit(LimitKind),
    #[error("sampler gave up after {0} rejected cells")]
    SamplerExhausted(usize),
    #[error("external oracle: {0}")]
    External(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, Error::Limit(_))
    }
}

fn join(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
