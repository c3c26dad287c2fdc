use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the scoring core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("empty distribution after clipping")]
    EmptyAfterClipping,
    #[error("document too short for n={n}")]
    DocumentTooShort { n: usize },
    #[error("degenerate baseline")]
    DegenerateBaseline,
    #[error("scaled length must be at least 1, got {0}")]
    ScaledLengthBelowOne(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("config mismatch")]
    ConfigMismatch,
    #[error("classifier signature carries no threshold")]
    MissingThreshold,
    #[error("malformed signature field `{field}`: {reason}")]
    MalformedSignature { field: &'static str, reason: String },
    #[error("unknown signature version `{0}`")]
    UnknownVersion(String),
    #[error("empty positive class")]
    EmptyPositiveClass,
    #[error("empty negative class")]
    EmptyNegativeClass,
    #[error("no positive gold labels")]
    NoPositiveGold,
    #[error("degenerate class weights")]
    DegenerateWeights,
    #[error("task has {got} documents, need at least {need}")]
    TooFewDocuments { need: usize, got: usize },
    #[error("requested top {k} but only {available} configurations are ranked")]
    NotEnoughRanked { k: usize, available: usize },
    #[error("empty grid")]
    EmptyGrid,
    #[error("non-finite loss at the initial point")]
    NonFiniteInitialLoss,
    #[error("empirical table has no rank 1 entry for n={0}")]
    MissingRankOne(usize),
    #[error("empirical table is empty")]
    EmptyTable,
}
