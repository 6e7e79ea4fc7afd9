use thiserror::Error;

/// Every domain failure the library reports.
///
/// The variant name doubles as the machine-readable `kind` in CLI error
/// documents, so renaming a variant is a wire-format change.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("some challenge is met by no response")]
    NoCover,
    #[error("{0} is not a member of the chain set")]
    NotInA(String),
    #[error("no member of the class outside the chain set at or above {floor} (searched up to {bound})")]
    ClassCaptured { floor: String, bound: String },
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("{count} decoding candidates survive, more than the bound {bound}")]
    CandidateOverflow { count: usize, bound: usize },
    #[error("side conditions are not comparable on their finite representations")]
    IncomparableSideConditions,
    #[error("no bounded extension determines coordinate {0}")]
    DeterminationFailed(usize),
    #[error("no bounded extension ensures coordinate {0}")]
    EnsureFailed(usize),
    #[error("chain code at level {level} would exceed {max_bits} bits")]
    TooLarge { level: usize, max_bits: u64 },
    #[error("node state is not reachable")]
    NotReachable,
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::NoCover => "NoCover",
            Error::NotInA(_) => "NotInA",
            Error::ClassCaptured { .. } => "ClassCaptured",
            Error::BoundExceeded(_) => "BoundExceeded",
            Error::CandidateOverflow { .. } => "CandidateOverflow",
            Error::IncomparableSideConditions => "IncomparableSideConditions",
            Error::DeterminationFailed(_) => "DeterminationFailed",
            Error::EnsureFailed(_) => "EnsureFailed",
            Error::TooLarge { .. } => "TooLarge",
            Error::NotReachable => "NotReachable",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
