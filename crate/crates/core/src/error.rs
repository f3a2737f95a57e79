use thiserror::Error;

use crate::numerics::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid rational `{0}`")]
    Parse(String),

    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("row {row} sums to {sum}, expected 1")]
    RowSum { row: usize, sum: Rational },

    #[error("negative entry {value} at row {row}, column {column}")]
    NegativeEntry {
        row: usize,
        column: usize,
        value: Rational,
    },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("size must be at least 1, got {0}")]
    SizeBelowOne(Rational),

    #[error("weight has size 1; the residual experiment is undefined")]
    DegenerateWeight,

    #[error("prior does not have full support")]
    PriorNotFullSupport,

    #[error("experiments do not match: {0}")]
    Mismatch(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("conditional experiment rejected: {0}")]
    Conditional(String),

    #[error("signal {signal} has zero probability under the current belief")]
    ZeroProbabilitySignal { signal: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("payoff {0} lies outside [-1, 1]")]
    PayoffOutOfRange(Rational),

    #[error("belief tree too large: horizon {horizon} with {signals} signals")]
    TreeTooLarge { horizon: usize, signals: usize },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
