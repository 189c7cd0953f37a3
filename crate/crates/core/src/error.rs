use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The value is wider than the range where the primality test is proven.
    #[error("{0} exceeds the supported width")]
    UnsupportedWidth(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// `b^M != 1 (mod n)`; the exponent does not annihilate the element.
    #[error("element is not annihilated by the supplied exponent")]
    NotAnnihilated,

    /// The element shares the factor with the modulus (`gcd(b, n) > 1`).
    #[error("element shares the factor {0} with the modulus")]
    SharedFactor(u64),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("phi oracle has no value for {0}")]
    OracleIncomplete(u64),

    #[error("missing dependency: {0}")]
    Dependency(String),

    #[error("refusing to trial-divide {value}: above the bound {bound}")]
    AboveBound { value: u64, bound: u64 },

    /// Some composite parts could not be split; `stuck` lists them.
    #[error("factorization incomplete, unsplit parts: {stuck:?}")]
    Incomplete { stuck: Vec<u64>, partial: Vec<(u64, u32)> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
