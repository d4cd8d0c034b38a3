use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{m} exceeds the limit {limit}")]
    TooLarge { p: u64, m: usize, limit: u64 },
    #[error("elements belong to different fields")]
    ContextMismatch,
    #[error("zero has no inverse")]
    InverseOfZero,
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("coefficient out of range for p = {p}")]
    CoefficientOutOfRange { p: u32 },
    #[error("modulus must be monic")]
    NotMonic,
    #[error("modulus {0:?} is reducible")]
    Reducible(Vec<u32>),
    #[error("modulus has {len} coefficients, expected m + 1 = {}", m + 1)]
    ModulusDegree { m: usize, len: usize },
    #[error("trace Gram matrix is singular (internal error)")]
    SingularGram,
    #[error("basis is not linearly independent")]
    SingularBasis,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("label has {got} qudits, expected {expected}")]
    QuditCount { expected: usize, got: usize },
    #[error("dimension {dim} exceeds the dense limit {limit}")]
    DenseLimit { dim: u64, limit: u64 },
    #[error("enumeration of {count} labels exceeds the limit {limit}")]
    EnumerationLimit { count: u128, limit: u64 },
    #[error("state has length {got}, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("cannot parse Pauli label: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
}

#[derive(Debug, Error)]
pub enum CodeSpaceError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("malformed code-space file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported format_version {0}")]
    FormatVersion(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("basis deviates from orthonormality by {deviation:.3e} (reorthonormalize is off)")]
    NotOrthonormal { deviation: f64 },
    #[error("basis vectors are linearly dependent")]
    RankDeficient,
    #[error("k = {k} exceeds n = {n}")]
    InvalidK { n: usize, k: usize },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("state lies outside the code space (residual {residual:.3e})")]
    OutsideCodeSpace { residual: f64 },
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    CodeSpace(#[from] CodeSpaceError),
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("epsilon {epsilon} fell below the proved lower bound {bound}: this is a bug")]
    BoundViolated { epsilon: f64, bound: f64 },
}
