use thiserror::Error;

use crate::slope::Slope;

pub type Result<T> = std::result::Result<T, FareyError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FareyError {
    #[error("the zero vector does not determine a slope")]
    ZeroVector,

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("slopes {0} and {1} are not adjacent (intersection number {2})")]
    NotAdjacent(Slope, Slope, u128),

    #[error("1/0 has no finite continued fraction")]
    InfiniteSlope,

    #[error("invalid window {max_a}x{max_b}: bounds must lie in 1..={limit}")]
    InvalidWindow { max_a: i64, max_b: i64, limit: i64 },

    #[error("matrix ({p},{q};{r},{s}) has determinant {det}, expected +1 or -1")]
    NotUnimodular {
        p: i64,
        q: i64,
        r: i64,
        s: i64,
        det: i128,
    },

    #[error("invalid matrix {0:?}: expected four comma-separated integers \"p,q,r,s\"")]
    ParseMatrix(String),

    #[error("classification requires determinant +1, got {0}")]
    OrientationReversing(i128),

    #[error("expected an Anosov class (|trace| > 2), got trace {0}")]
    NotAnosov(i128),

    #[error("invalid cone: lower bound {lo} is not below upper bound {hi}")]
    EmptyCone { lo: String, hi: String },

    #[error("radius must be at least {min}, got {got}")]
    RadiusTooSmall { min: u32, got: u32 },

    #[error("step count must be positive")]
    NoSteps,

    #[error("cover certification failed: {0}")]
    CoverFailed(String),

    #[error("no safe cone at this window; {} obstructing members", .obstructing.len())]
    NoSafeCone { obstructing: Vec<Slope> },

    #[error("distance between {0} and {1} did not stabilise under window doubling")]
    Unstable(Slope, Slope),

    #[error("invalid slope {input:?} at column {column}: {reason}")]
    ParseSlope {
        input: String,
        column: usize,
        reason: &'static str,
    },

    #[error("{0}")]
    Surd(String),
}
