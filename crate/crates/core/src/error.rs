use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid Dynkin type `{0}`")]
    InvalidType(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("simple root index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("not a root of the active system")]
    NotARoot,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("division by the simple root α_{0} left a remainder")]
    InexactDivision(usize),
    #[error("rank {0} is too large for the full Giambelli formula (limit 4)")]
    RankGuard(usize),
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("no preimage: {0}")]
    NoPreimage(String),
    #[error("codimensions {0} and {1} are not complementary")]
    NotComplementary(usize, usize),
    #[error("class is not homogeneous")]
    Inhomogeneous,
    #[error("codim-1 class for α_{0} is not in the Chow ring of this parabolic")]
    NotInSubring(usize),
    #[error("unknown class label `{0}`")]
    UnknownLabel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-integral structure constant {0}")]
    NonIntegral(String),
    #[error("Jacobian criterion failed for every candidate orbit")]
    DegenerateJacobian,
    #[error("{0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
