use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a positive fundamental discriminant")]
    NotFundamental(i64),
    #[error("generators do not span a rank-2 lattice")]
    RankDeficient,
    #[error("cannot scale a lattice by zero")]
    ZeroScalar,
    #[error("unit search exceeded the exponent cap {cap}")]
    SearchCap { cap: u64 },
    #[error("matrix {0} does not have determinant 1")]
    NotUnimodular(String),
    #[error("matrix {0} has non-integral entries")]
    NotIntegralMatrix(String),
    #[error("matrix {0} is not hyperbolic")]
    NotHyperbolic(String),
    #[error("matrix {0} has c = 0; its axis is a vertical line")]
    ParabolicAxis(String),
    #[error("lattice {0} is not contained in the ring of integers")]
    NotIntegralIdeal(String),
    #[error("lattice {0} is not stable under the ring of integers")]
    NotAnIdeal(String),
    #[error("matrix is singular")]
    Singular,
    #[error("{which} = {matrix} does not lie in SL2(Z)")]
    IntegralityViolation { which: String, matrix: String },
    #[error("point {0} is not in the upper half plane")]
    NotUpperHalfPlane(String),
    #[error(
        "series truncation bound {bound:e} exceeds tolerance {tolerance:e}; raise the precision"
    )]
    PrecisionTooLow { bound: f64, tolerance: f64 },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("triple {0} does not describe a lattice (need a > 0 and d > 0)")]
    NotALattice(String),
    #[error("lattice enumeration would scan {0} rows; the unit is too large for this precision")]
    EnumerationTooLarge(u64),
    #[error("direct Dedekind sum needs |c| below 2^40, got {0}")]
    TooLargeForDirect(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
