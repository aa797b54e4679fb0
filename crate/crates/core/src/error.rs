use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not diagonal: {0}")]
    NotDiagonal(String),
    #[error("partitions have different totals ({0} vs {1})")]
    UnequalTotals(usize, usize),
    #[error("invalid partition or composition: {0}")]
    InvalidPartition(String),
    #[error("mu is not dominated by lambda")]
    NotDominated,
    #[error("invalid two-block data: {0}")]
    InvalidTwoBlocks(String),
    #[error("invalid Whittaker pair: {0}")]
    InvalidPair(String),
    #[error("element is zero")]
    ZeroElement,
    #[error("elements do not commute: {0}")]
    NonCommuting(String),
    #[error("element is not of weight -2: {0}")]
    NotGraded(String),
    #[error("element is not in the stabilizer: {0}")]
    NotInStabilizer(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("perturbation does not make phi + phi' conjugate to phi~")]
    PerturbationUnverified,
    #[error("no perturbation found within the search bound")]
    NotFound,
    #[error("element is not compatible with the simple system: {0}")]
    NotCompatible(String),
    #[error("not a PL nilpotent: {0}")]
    NotPL(String),
    #[error("h_eps is not regular: {0}")]
    RegularityFailure(String),
    #[error("composition must have at least two parts")]
    CompositionTooShort,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotNilpotent => "NotNilpotent",
            Error::NotDiagonal(_) => "NotDiagonal",
            Error::UnequalTotals(..) => "UnequalTotals",
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::NotDominated => "NotDominated",
            Error::InvalidTwoBlocks(_) => "InvalidTwoBlocks",
            Error::InvalidPair(_) => "InvalidPair",
            Error::ZeroElement => "ZeroElement",
            Error::NonCommuting(_) => "NonCommuting",
            Error::NotGraded(_) => "NotGraded",
            Error::NotInStabilizer(_) => "NotInStabilizer",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::PerturbationUnverified => "PerturbationUnverified",
            Error::NotFound => "NotFound",
            Error::NotCompatible(_) => "NotCompatible",
            Error::NotPL(_) => "NotPL",
            Error::RegularityFailure(_) => "RegularityFailure",
            Error::CompositionTooShort => "CompositionTooShort",
            Error::Parse(_) => "Parse",
        }
    }
}
