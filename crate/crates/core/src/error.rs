use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("vertex {vertex} has nonpositive or non-finite measure {value}")]
    NonpositiveMeasure { vertex: usize, value: f64 },
    #[error("vertex measure sums to {sum}, outside the renormalization tolerance")]
    UnnormalizedMeasure { sum: f64 },
    #[error("expected {expected} vertex measures, got {got}")]
    MeasureLength { expected: usize, got: usize },
    #[error("edge ({i}, {j}) has a negative or non-finite weight")]
    NegativeWeight { i: usize, j: usize },
    #[error("edge ({i}, {j}) has a nonpositive or non-finite length")]
    BadEdgeLength { i: usize, j: usize },
    #[error("edge ({i}, {j}) appears more than once")]
    DuplicateEdge { i: usize, j: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("function is identically zero")]
    ZeroFunction,
    #[error("function takes a negative value at vertex {0}")]
    NegativeFunction(usize),
    #[error("vertex set has zero measure")]
    EmptySet,

    #[error("requested {requested} eigenpairs but the graph has {n} vertices")]
    KTooLarge { requested: usize, n: usize },
    #[error("iterative eigensolver did not converge after {iterations} products (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("function is not an eigenfunction for a positive eigenvalue (relative residual {residual:e})")]
    NotAnEigenfunction { residual: f64 },
    #[error("eigenfunction does not change sign")]
    OneSidedFunction,

    #[error("bad resolution: {0}")]
    BadResolution(String),
    #[error("bad model parameter: {0}")]
    BadParameter(String),
    #[error("model would have {vertices} vertices, above the cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("lattice enumeration box of {points} points exceeds the cap of {cap}")]
    EnumerationOverflow { points: u128, cap: u128 },

    #[error("negative argument {0}")]
    NegativeInput(f64),
    #[error("function is constant")]
    DegenerateFunction,
    #[error("eigenvalue index {k} must be positive with a positive eigenvalue")]
    DegenerateSpectrum { k: usize },
    #[error("functions {0} and {1} share support")]
    NotDisjoint(usize, usize),
    #[error("{n} vertices exceeds the exact-enumeration cap of {cap}")]
    TooLargeForExact { n: usize, cap: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("lower-bound check needs an exact Cheeger constant")]
    H1NotExact,

    #[error("kappa must lie in (0, 1), got {0}")]
    BadKappa(f64),
    #[error("graph has edges without lengths")]
    NoEdgeLengths,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
