use thiserror::Error;

use crate::harmonics::HarmonicIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside [-1, 1]")]
    Domain { value: f64 },

    #[error("invalid harmonic index (l={l}, m={m}): |m| must not exceed l")]
    InvalidIndex { l: i64, m: i64 },

    #[error("band limit mismatch: need at least {required}, have {available}")]
    BandLimit { required: usize, available: usize },

    #[error("profile is not square integrable with weight r^2 (exponent {exponent})")]
    NonSquareIntegrable { exponent: i32 },

    #[error("term r^{exponent} against the degree-{degree} kernel is not Radon integrable")]
    NotRadonIntegrable { exponent: i32, degree: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("polynomial is not in P_{degree}: {reason}")]
    NotInClass { degree: usize, reason: String },

    #[error("unsupported derivative order {0} (only 1 and 2)")]
    DerivativeOrder(usize),

    #[error("operation requires a monomial radial profile ({index})")]
    NotMonomial { index: HarmonicIndex },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid point r={r} lies inside the excluded neighbourhood of r={center}")]
    ExcludedPoint { r: f64, center: f64 },

    #[error("schedule rejected: {0}")]
    ScheduleRejected(String),

    #[error("certificate failed for term k={k}: {reason}")]
    CertificateFailed { k: usize, reason: String },

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serde(err.to_string())
    }
}
