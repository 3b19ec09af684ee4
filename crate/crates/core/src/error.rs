use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {0} exceeds the degree bound")]
    DegreeExceeded(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("gave up after {0} rejected attempts")]
    RetryExhausted(usize),
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("vertex {vertex} lies at distance {distance} from the root, beyond radius {radius}")]
    RadiusExceeded {
        vertex: usize,
        distance: usize,
        radius: usize,
    },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("distributions live on different spaces: (r={r1}, k={k1}) vs (r={r2}, k={k2})")]
    SpaceMismatch { r1: usize, k1: u32, r2: usize, k2: u32 },
    #[error("distribution set is empty")]
    EmptySet,
    #[error("palette overflow: needed {needed} colors, bound is {bound}")]
    PaletteOverflow { needed: u64, bound: u64 },
    #[error("edge ({0}, {1}) does not have a unique color intersection")]
    AmbiguousIntersection(usize, usize),
    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid color {color} at vertex {vertex} for palette {k}")]
    InvalidColor { vertex: usize, color: u32, k: u32 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown {kind} `{name}`; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}
