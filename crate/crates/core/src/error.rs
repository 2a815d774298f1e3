use thiserror::Error;

/// Errors raised by the geometry, lattice and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("body is unbounded in the queried direction")]
    UnboundedBody,
    #[error("linear program infeasible: {0}")]
    LpInfeasible(String),
    #[error("origin is not inside the body")]
    OriginOutside,
    #[error("enumeration budget exceeded: {candidates} candidate points > {limit}")]
    BudgetExceeded { candidates: f64, limit: f64 },
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("empty lattice point set")]
    EmptyLattice,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("unit ball is not contained in the body (inradius lower bound {0})")]
    BallNotContained(f64),
    #[error("rotation budget must be positive")]
    RotationBudgetZero,
    #[error("sample budget must be positive")]
    ZeroBudget,
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
