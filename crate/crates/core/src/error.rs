use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero matrix")]
    ZeroMatrix,

    #[error("form value is not real: {re} + {im}i")]
    NonRealResult { re: f64, im: f64 },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("reciprocal of {0} is neither an integer nor infinite")]
    NonIntegerOrder(String),

    #[error("cone angle {0} is outside (0, 2π)")]
    AngleOutOfRange(String),

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    #[error("configuration mismatch: {left} vs {right}")]
    ConfigMismatch { left: String, right: String },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("line points are dependent")]
    SingularSystem,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("point is at infinity in this frame")]
    PointAtInfinity,

    #[error("unsupported degeneracy: {0}")]
    UnsupportedDegeneracy(String),

    #[error("bound {0} exceeded")]
    ExceededBound(usize),

    #[error("hash collision between matrices at distance {0:e}")]
    HashCollisionAmbiguity(f64),

    #[error("ridge {0} collapses for this lattice")]
    RidgeCollapsed(String),

    #[error("ridge {0} has no sign-table procedure")]
    UnsupportedRidge(String),

    #[error("({0},{1},{2}) is not a catalog signature")]
    NotCatalog(u32, u32, u32),
}

pub type Result<T> = std::result::Result<T, Error>;
