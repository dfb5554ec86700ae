use thiserror::Error;

/// Which hypothesis of the bilinear product estimate failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ProductCondition {
    /// `s1 < n / p1`
    FirstRegularity,
    /// `s2 < n / p2`
    SecondRegularity,
    /// `s1 + s2 > 0`
    PositiveSum,
    /// `1/p <= 1/p1 + 1/p2`
    Integrability,
}

impl std::fmt::Display for ProductCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::FirstRegularity => "s1 < n/p1",
            Self::SecondRegularity => "s2 < n/p2",
            Self::PositiveSum => "s1 + s2 > 0",
            Self::Integrability => "1/p <= 1/p1 + 1/p2",
        };
        f.write_str(s)
    }
}

/// Why a Picard iteration was abandoned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PicardFailureKind {
    NotContractive,
    MaxIterations,
    NonFinite,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Lebesgue exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("negative power {0} of the Laplacian is singular on a field with a nonzero mean")]
    SingularMode(f64),

    #[error("field is not divergence free (relative divergence {0:.3e})")]
    NotSolenoidal(f64),

    #[error("shell index {j} outside 0..={j_max}")]
    ShellOutOfRange { j: usize, j_max: usize },

    #[error("{requested} shells requested but the lattice supports at most {max}")]
    TooManyShells { requested: usize, max: usize },

    #[error("product estimate hypothesis violated: {0}")]
    ProductHypothesis(ProductCondition),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },

    #[error(
        "Picard iteration failed ({kind:?}) at iterate {iterate}: contraction ratio {ratio:.3e}, increment {increment:.3e}"
    )]
    Picard {
        kind: PicardFailureKind,
        iterate: usize,
        ratio: f64,
        increment: f64,
    },

    #[error("tail target {target:.3e} unreachable; smallest tail norm is {achievable:.3e}")]
    SplitUnreachable { target: f64, achievable: f64 },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("no state stored at time {0}")]
    MissingTime(f64),

    #[error("malformed field container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
