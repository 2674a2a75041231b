use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrices over different coefficient rings")]
    RingMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("differential does not square to zero at degree {degree}")]
    InvalidDifferential { degree: usize },
    #[error("cochain of degree {degree} is not a cocycle")]
    NotACocycle { degree: usize },
    #[error("degree {0} out of range")]
    InvalidDegree(usize),

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),
    #[error("eigenvalues {index} and {} are closer than the gap tolerance ({gap:e})", index + 1)]
    DegenerateSpectrum { index: usize, gap: f64 },
    #[error("critical point {0} does not belong to this datum")]
    ForeignCriticalPoint(String),
    #[error("connection needs adjacent indices, got {hi} and {lo}")]
    IndexGap { hi: usize, lo: usize },
    #[error("point is not on the space (defect {0:e})")]
    NotOnSpace(f64),
    #[error("coefficient ring {0} is not supported for {1}")]
    UnsupportedRing(crate::coefficients::RingTag, String),
    #[error("resampling budget exhausted after {0} attempts")]
    ResamplingBudget(usize),

    #[error("spectra are not in general position: {0}")]
    Genericity(String),
    #[error("expected intersection dimension is {0}, not zero")]
    ExpectedDimensionNonZero(i64),
    #[error("transversality failure: {0}")]
    Transversality(String),
    #[error("degenerate determinant in orientation computation")]
    DegenerateDeterminant,
    #[error("flow direction is not a nonzero vector of the subspace")]
    FlowDirection,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("data live on different isolating neighborhoods: {0}")]
    MismatchedNeighborhoods(String),
    #[error("cup structure sources do not match: {0}")]
    SourceMismatch(String),
    #[error("isolation compatibility fails for ({0})")]
    NotIsolationCompatible(String),

    #[error("eigen-coefficient support is empty")]
    AmbiguousSupport,
    #[error("trajectory leaves the isolating neighborhood")]
    ExitsNeighborhood,
    #[error("limit prediction disagrees with the integrated flow (distance {0:e})")]
    LimitMismatch(f64),
    #[error("brute-force oracle is limited to n <= {max}, got n = {n}")]
    DimensionBudget { n: usize, max: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
