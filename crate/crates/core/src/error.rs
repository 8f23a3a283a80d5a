use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("constraint matrix has rank {rank}, expected full column rank {n}")]
    RankDeficient { rank: usize, n: usize },

    #[error("point is not in the strict interior (min slack {min_slack:e})")]
    NotInterior { min_slack: f64 },

    #[error("metric factorization failed; point is too close to the boundary")]
    Factorization,

    #[error("Newton iteration did not converge in {iters} iterations; polytope may be unbounded or empty")]
    IterationLimit { iters: usize },

    #[error("phase-one search could not find an interior point")]
    PhaseOneFailed,

    #[error("frame is not orthonormal in the local metric (deviation {deviation:e})")]
    FrameNotOrthonormal { deviation: f64 },

    #[error("fixed-point iteration is not contracting")]
    NonContraction,

    #[error("collocation did not reach tolerance (residual {residual:e})")]
    NotConverged { residual: f64 },

    #[error("time {t} is outside the curve domain [0, {len}]")]
    OutOfRange { t: f64, len: f64 },

    #[error("duplicate collocation nodes")]
    DuplicateNodes,

    #[error("geodesic exited the polytope")]
    GeodesicExit,

    #[error("Jacobi matrix is numerically singular")]
    SingularJacobian,

    #[error("polytope is unbounded along the requested direction")]
    Unbounded,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("linear system is singular")]
    Singular,

    #[error("{0}")]
    Parse(String),
}

impl Error {
    /// True for failures that mean a trial point left the polytope interior.
    pub fn is_domain_exit(&self) -> bool {
        matches!(
            self,
            Error::NotInterior { .. } | Error::Factorization | Error::GeodesicExit
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
