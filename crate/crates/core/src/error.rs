use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vertex {vertex} has invalid measure {value} (must be finite and positive)")]
    InvalidMeasure { vertex: VertexId, value: f64 },

    #[error("edge ({u}, {v}) has invalid weight {weight} (must be finite and positive)")]
    InvalidWeight {
        u: VertexId,
        v: VertexId,
        weight: f64,
    },

    #[error("loop at vertex {0}")]
    SelfLoop(VertexId),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),

    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: VertexId, count: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter {name} = {value}: {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("empty vertex set")]
    EmptySet,

    #[error("ball of radius {radius} about {center} reaches the truncation frontier")]
    BallTouchesFrontier { center: VertexId, radius: f64 },

    #[error("function is nonzero at vertex {0}, outside the permitted support")]
    SupportViolation(VertexId),

    #[error("set of size {size} exceeds the enumeration cap {cap}")]
    SubsetTooLarge { size: usize, cap: usize },

    #[error("realization with {count} {what} exceeds the cap {cap}")]
    RealizationTooLarge {
        what: &'static str,
        count: u128,
        cap: u128,
    },

    #[error("step function is not nonincreasing and nonnegative")]
    NotDecreasing,

    #[error("vertex {0} is not in the Dirichlet domain")]
    NotInDomain(VertexId),

    #[error("function has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
