use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd of (0, 0) is undefined")]
    BothZero,
    #[error("input must be non-zero")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("base must be positive, got {0}")]
    NonPositiveBase(String),
    #[error("indeterminate form +inf + -inf")]
    IndeterminateInfinity,
    #[error("multiplication requires non-negative upper reals")]
    NegativeBound,
    #[error("exponential base must be at least 1")]
    BaseBelowOne,
    #[error("logarithm base must be an integer >= 2, got {0}")]
    BadBase(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("absolute value is not positive definite at {0}")]
    NotPositiveDefinite(String),
    #[error("absolute value has no closed form; it cannot be made Dedekind")]
    NoClosedForm,
    #[error("incompatible (ideal, lambda) pair: {0}")]
    IncompatiblePair(String),
    #[error("no non-triviality certificate found within budget {0}")]
    TrivialityNotRefuted(u64),
    #[error("inconsistent oracle: {0}")]
    InconsistentOracle(String),
    #[error("exponent too large for exact evaluation")]
    ExponentTooLarge,
    #[error("could not separate values within the precision cap")]
    PrecisionExhausted,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Error::BothZero => "both_zero",
            Error::ZeroInput => "zero_input",
            Error::NotPrime(_) => "not_prime",
            Error::NonPositiveBase(_) => "non_positive_base",
            Error::IndeterminateInfinity => "indeterminate_infinity",
            Error::NegativeBound => "negative_bound",
            Error::BaseBelowOne => "base_below_one",
            Error::BadBase(_) => "bad_base",
            Error::BadParameter(_) => "bad_parameter",
            Error::ZeroDenominator => "zero_denominator",
            Error::NotPositiveDefinite(_) => "not_positive_definite",
            Error::NoClosedForm => "no_closed_form",
            Error::IncompatiblePair(_) => "incompatible_pair",
            Error::TrivialityNotRefuted(_) => "triviality_not_refuted",
            Error::InconsistentOracle(_) => "inconsistent_oracle",
            Error::ExponentTooLarge => "exponent_too_large",
            Error::PrecisionExhausted => "precision_exhausted",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
