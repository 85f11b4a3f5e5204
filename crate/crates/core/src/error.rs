use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("product left the lattice (non-integral second-kind coordinates)")]
    NonIntegral,
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveScale(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("resource cap exceeded: more than {cap} points")]
    ResourceCap { cap: usize },
    #[error("generator set is empty")]
    NoGenerators,
    #[error("ball table too small: need r_max >= {need}, have {have}")]
    TableTooSmall { need: usize, have: usize },
    #[error("degenerate ball table: counts do not grow")]
    Degenerate,
    #[error("point {0:?} lies outside the materialized ball")]
    OutsideBall(Vec<i64>),
    #[error("ball table was not materialized")]
    NotMaterialized,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("coset representatives are not a transversal: {0}")]
    NotTransversal(String),
    #[error("ball too small to certify orbit count: {0}")]
    BallTooSmall(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HaarError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("region is unbounded or malformed: {0}")]
    BadRegion(String),
    #[error("enumeration cap exceeded: window holds {window} points, cap {cap}")]
    EnumerationCap { window: u128, cap: u128 },
    #[error("scale must be positive, got {0}")]
    BadScale(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PercolationError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Haar(#[from] HaarError),
    #[error("lambda {lambda} exceeds the normalizing denominator {denom}")]
    LambdaTooLarge { lambda: f64, denom: f64 },
    #[error("window too large: {0} vertices")]
    WindowTooLarge(usize),
    #[error("invalid window: {0}")]
    BadWindow(String),
    #[error("need at least {need} seeds, got {got}")]
    InsufficientSeeds { need: usize, got: usize },
    #[error("bracket failure: lambda = {upper} is not supercritical")]
    BracketFailure { upper: f64 },
    #[error("region below unit scale: interior measure vanishes")]
    RegionTooSmall,
    #[error("translates at Z^2-distance {distance} > K = {k} overlap: {detail}")]
    OverlapViolation { distance: u32, k: u32, detail: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("invalid quotient: {0}")]
    InvalidQuotient(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("coset representatives are not a transversal: {0}")]
    NotTransversal(String),
    #[error("distance bound violated: d = {distance} > {bound}")]
    DistanceBound { distance: usize, bound: usize },
    #[error("need at least {need} seeds, got {got}")]
    InsufficientSeeds { need: usize, got: usize },
}
