use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension {n} exceeds the {what} limit of {limit}")]
    DimensionTooLarge { what: &'static str, n: usize, limit: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("profile for n={n} must have {expected} values, got {got}")]
    ProfileLength { n: usize, expected: usize, got: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exponent m={0} must be odd")]
    EvenExponent(u32),

    #[error("bound denominator {0} is not positive; certificate is infeasible or degenerate")]
    NonPositiveDenominator(String),

    #[error("dual profile is not feasible: {0}")]
    InfeasibleDual(String),

    #[error("no feasible certificate for n={n}, d={d} in the search grid")]
    NoFeasibleCertificate { n: usize, d: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
