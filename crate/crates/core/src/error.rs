use thiserror::Error;

/// Errors raised by the simulator and the analytics pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("margin is undefined for a firm without employees")]
    UndefinedMargin,
    #[error("margin {0} is outside the domain of the operation")]
    MarginDomain(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("size {size} exceeds the exact-enumeration limit of {limit}")]
    OracleTooLarge { size: u64, limit: u64 },
    #[error("{requested} moves requested but at most {feasible} are feasible")]
    InfeasibleMoves { requested: u64, feasible: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
