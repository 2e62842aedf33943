use thiserror::Error;

/// Structural problems with a quiver, dimension vector or parameter.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuiverError {
    #[error("duplicate vertex id '{0}'")]
    DuplicateVertex(String),
    #[error("dangling endpoint: edge {edge} references undeclared vertex '{vertex}'")]
    DanglingEndpoint { edge: usize, vertex: String },
    #[error("unknown infinity id '{0}'")]
    UnknownInfinity(String),
    #[error("quiver has no infinity vertex")]
    MissingInfinity,
    #[error("dimension at the infinity vertex must be 1, found {0}")]
    InfinityDimension(usize),
    #[error("keys do not match the quiver vertices: {0}")]
    KeyMismatch(String),
    #[error("negative framing entry at vertex '{0}'")]
    NegativeFraming(String),
    #[error("slope of the zero dimension vector")]
    ZeroRank,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("cannot parse weight '{0}'")]
    BadWeight(String),
    #[error("quiver already has an infinity vertex")]
    AlreadyFramed,
}

/// Errors raised by the representation algebra and everything built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular group element at vertex {vertex} (condition number {cond:e})")]
    Singular { vertex: usize, cond: f64 },
    #[error("unpaired edge: quiver carries no doubling pairing")]
    Unpaired,
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("missing handsaw label: {0}")]
    MissingLabel(String),
}

/// Errors from critical-point analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("not critical: gradient norm {grad_norm:e} exceeds {limit:e}")]
    NotCritical { grad_norm: f64, limit: f64 },
    #[error("block structure violated: off-diagonal residual {0:e}")]
    BlockStructure(f64),
    #[error("eigenvalue {eigenvalue} differs from block slope {slope}")]
    SlopeMismatch { eigenvalue: f64, slope: f64 },
    #[error("not a C0 critical point: {0}")]
    NotTwoBlock(String),
    #[error("stratum codimension mismatch: expected {expected}, found {found}")]
    CodimMismatch { expected: usize, found: usize },
    #[error("vertex {0} is the infinity vertex")]
    InfinityVertex(usize),
}

/// Errors from the correspondence layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrespondenceError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("quiver has loops")]
    HasLoops,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("intertwiner is not injective: {0}")]
    NotInjective(String),
    #[error("degenerate restriction: norm {0:e}")]
    Degenerate(f64),
    #[error("flow did not converge: {0}")]
    NotConverged(String),
}

/// Errors from the flow integrator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("non-finite state at t={t} after {steps} steps")]
    NaN { t: f64, steps: usize },
    #[error("invalid options: {0}")]
    Options(String),
}

/// Errors from the thin-representation oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("non-thin input: vertex '{0}' has dimension > 1")]
    NonThin(String),
    #[error("too many vertices for subset enumeration: {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Correspondence(#[from] CorrespondenceError),
}

/// Errors from JSON reading and writing.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("io error on {path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Rep(#[from] RepError),
}
