//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by moment-sequence operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operation needs {needed} moments, got {got}")]
    InsufficientMoments { needed: usize, got: usize },

    #[error("entry s_{index} = {value} is not a finite real")]
    NonFiniteEntry { index: usize, value: f64 },

    #[error("eigensolver did not converge after {iterations} iterations{}", order_suffix(.order))]
    ConvergenceFailure {
        iterations: usize,
        order: Option<usize>,
    },

    #[error("order {order} exceeds the subset enumeration cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("needs at least {needed} specified entries, got {got}")]
    TooFewEntries { needed: usize, got: usize },

    #[error("offset {0} must be even")]
    OddOffset(usize),

    #[error("extraction step must be at least 1")]
    ZeroStep,

    #[error("tolerance {0} must be positive")]
    InvalidTolerance(f64),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("moment computation overflowed the f64 range")]
    Overflow,

    #[error("atom count must be at least 1")]
    ZeroAtoms,

    #[error("moment matrix has numerical rank {0}; retry with that atom count")]
    RankDeficient(usize),

    #[error("sequence is not a positive sequence; no representing measure exists")]
    NotPositive,

    #[error("specified subsequence is not a positive sequence")]
    SubsequenceNotPositive,

    #[error("even step {step} requires nonnegative recovered nodes, found {node}")]
    EvenStepNegativeNode { step: usize, node: f64 },

    #[error("recovered atom at zero cannot absorb offset {offset}")]
    ZeroNodeWithOffset { offset: usize },

    #[error("completion could not reproduce specified entry {index} (deviation {deviation:e})")]
    CompletionMismatch { index: usize, deviation: f64 },

    #[error("pattern is not an arithmetic progression with even offset")]
    NonArithmeticPattern,

    #[error("trajectory entry {index} = {value} is not strictly positive")]
    NonPositiveTrajectory { index: usize, value: f64 },

    #[error("trajectory of length {len} is shorter than the fit window {window}")]
    TrajectoryTooShort { len: usize, window: usize },

    #[error("fit window {0} must be at least 2")]
    WindowTooSmall(usize),

    #[error("perturbation node {node} matches more than one base atom within tolerance")]
    AmbiguousMatch { node: f64 },

    #[error("measure does not represent the sequence (max deviation {deviation:e})")]
    MeasureMismatch { deviation: f64 },

    #[error("lambda must have a nonzero imaginary part")]
    RealLambda,

    #[error("duplicate node {0} in atomic measure")]
    DuplicateNode(f64),

    #[error("atom weight {0} must be strictly positive")]
    NonPositiveWeight(f64),

    #[error("node {0} is not a finite real")]
    NonFiniteNode(f64),

    #[error("sequence carries no exact rational entries")]
    MissingExact,

    #[error("cannot parse {0:?} as a rational number")]
    BadRational(String),

    #[error("cannot parse {0:?} as a number")]
    BadNumber(String),

    #[error("exact entry {index} does not round to the float entry ({exact} vs {float})")]
    ExactFloatDisagreement {
        index: usize,
        exact: f64,
        float: f64,
    },

    #[error("horizon {horizon} is smaller than the largest specified index {max_index}")]
    HorizonTooSmall { horizon: usize, max_index: usize },
}

impl Error {
    /// Attaches a Hankel order to a convergence failure so trajectory
    /// callers can report which matrix broke.
    pub(crate) fn tag_order(self, order: usize) -> Self {
        match self {
            Error::ConvergenceFailure { iterations, .. } => Error::ConvergenceFailure {
                iterations,
                order: Some(order),
            },
            other => other,
        }
    }
}

fn order_suffix(order: &Option<usize>) -> String {
    match order {
        Some(n) => format!(" at order {n}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
