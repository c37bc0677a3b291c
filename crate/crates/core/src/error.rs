use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("horizon {horizon} exceeds the supported maximum 2^32")]
    HorizonOverflow { horizon: u64 },

    #[error("value {value} is not unimodular (|z| = {modulus})")]
    NotUnimodular { value: Complex64, modulus: f64 },

    #[error("frequencies {first} and {second} coincide within 1e-12")]
    DuplicateFrequency { first: Complex64, second: Complex64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "operator is not power bounded: unimodular eigenvalue {eigenvalue} is not semisimple \
         (||T^{witness_n}|| = {witness_norm:.3e})"
    )]
    NotPowerBounded {
        eigenvalue: Complex64,
        witness_n: u64,
        witness_norm: f64,
    },

    #[error(
        "operator is not power bounded: eigenvalue {eigenvalue} has modulus {modulus} > 1 \
         (||T^{witness_n}|| = {witness_norm:.3e})"
    )]
    SpectralRadius {
        eigenvalue: Complex64,
        modulus: f64,
        witness_n: u64,
        witness_norm: f64,
    },

    #[error("spectral normal form rejected: {0}")]
    BadNormalForm(String),

    #[error("eigensolver failed to converge")]
    EigenSolver,

    #[error("integer polynomial overflow at n = {n}")]
    PolynomialOverflow { n: i128 },

    #[error("observable representation cannot be integrated on this system: {0}")]
    NonIntegrable(String),

    #[error("frequency support of {requested} coefficients exceeds the cap of {cap}")]
    FrequencyCap { requested: usize, cap: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the input was well formed but fails a mathematical hypothesis
    /// (power boundedness, nonzero mass, ...).
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::NotPowerBounded { .. }
                | Error::SpectralRadius { .. }
                | Error::HypothesisViolated(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
