use thiserror::Error;

/// Errors raised by frame construction, D-number validation and combination.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frame must contain at least one label")]
    EmptyFrame,
    #[error("duplicate frame label `{0}`")]
    DuplicateLabel(String),
    #[error("frame has {size} labels, at most {max} are supported")]
    FrameTooLarge { size: usize, max: usize },
    #[error("frame has {size} labels, matrix expansion supports at most {max}")]
    FrameTooLargeForMatrix { size: usize, max: usize },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("subset {bits:#b} lies outside a frame of {size} elements")]
    ForeignSubset { bits: u32, size: usize },
    #[error("weight {0} assigned to the empty set")]
    EmptySetAssignment(f64),
    #[error("weight {0} is negative or not finite")]
    NegativeWeight(f64),
    #[error("weight {0} exceeds 1")]
    WeightAboveOne(f64),
    #[error("total mass {total} exceeds 1")]
    MassOverflow { total: f64 },
    #[error("the empty set has no non-exclusive degree")]
    EmptySubset,
    #[error("operands are defined on different frames")]
    FrameMismatch,
    #[error("rule requires complete inputs, got total mass {q}")]
    IncompleteInput { q: f64 },
    #[error("total conflict ({conflict}), combination is undefined")]
    TotalConflict { conflict: f64 },
    #[error("degree {0} lies outside [0, 1]")]
    InvalidDegree(f64),
    #[error("element pair ({0}, {1}) is not a pair of distinct elements")]
    InvalidElementPair(usize, usize),
    #[error("override targets intersecting subsets, whose degree is fixed at 1")]
    OverrideOnIntersectingPair,
    #[error("completeness function `{name}` violates its constraints: {reason}")]
    InvalidAggregator { name: String, reason: String },
    #[error("need at least two D numbers, got {0}")]
    TooFewInputs(usize),
    #[error("combination step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips any `Step` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
