use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A sample was constructed from zero values.
    EmptySample,
    /// A sample value was NaN or infinite.
    NonFinite { index: usize },
    /// The smaller arm is below the size an estimator needs.
    SizeTooSmall {
        required: usize,
        n1: usize,
        n2: usize,
    },
    /// Argument outside the domain of a numerical routine.
    Domain(&'static str),
    /// The test kind is not valid for the requested operation.
    InvalidKind(&'static str),
    /// A distribution failed validation.
    InvalidSpec(&'static str),
    /// The effect target is not attainable inside the search bracket.
    NoBracket { target: f64, low: f64, high: f64 },
    /// No exact computation exists for this pair of distributions.
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySample => write!(f, "sample must contain at least one value"),
            Error::NonFinite { index } => write!(f, "sample value at index {index} is not finite"),
            Error::SizeTooSmall { required, n1, n2 } => write!(
                f,
                "sample sizes too small: need at least {required} per arm, got n1={n1}, n2={n2}"
            ),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InvalidKind(msg) => write!(f, "invalid test kind: {msg}"),
            Error::InvalidSpec(msg) => write!(f, "invalid distribution: {msg}"),
            Error::NoBracket { target, low, high } => write!(
                f,
                "target effect {target} not attainable for parameter in [{low}, {high}]"
            ),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn require_min(n1: usize, n2: usize, required: usize) -> Result<()> {
    if n1.min(n2) < required {
        Err(Error::SizeTooSmall { required, n1, n2 })
    } else {
        Ok(())
    }
}
