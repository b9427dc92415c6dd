use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("series domain: {0}")]
    SeriesDomain(String),
    #[error("coefficient at exponent {exponent} of `{var}` requested beyond truncation order {truncation}")]
    BeyondTruncation { var: String, exponent: i64, truncation: i64 },
    #[error("variable mismatch: `{0}` vs `{1}`")]
    VariableMismatch(String, String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no stationary oracle for this target (chi = {0})")]
    NoStationaryOracle(i64),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("differential mismatch: {0}")]
    Differential(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("migration required: file has schema version {found}, expected {expected}")]
    MigrationRequired { found: u32, expected: u32 },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
