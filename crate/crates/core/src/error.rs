use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{what} must be {expected}, got {got}")]
    Domain {
        what: &'static str,
        expected: &'static str,
        got: String,
    },

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sequence is not Dirichlet-invertible: f(1) = 0")]
    NotInvertible,

    #[error("natural function is not zero-sum certified")]
    NotZeroSum,

    #[error("window [{lower}, {upper}] is empty or reversed")]
    EmptyWindow { lower: String, upper: String },

    #[error("{0} does not fit in 64 bits")]
    Overflow(&'static str),

    /// The recurrence `c_n = 1 - Σ c_k seed_k(n)` needs `seed_n(n) = 1`.
    #[error("seed {n} of the {family} family takes value {value} at x = {n}, recurrence is ill-posed")]
    IllPosedSeed {
        family: &'static str,
        n: u64,
        value: String,
    },

    #[error("operation only supports the first seed family, got {0}")]
    UnsupportedFamily(&'static str),

    #[error("invalid value: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, expected: &'static str, got: impl ToString) -> Self {
        Error::Domain {
            what,
            expected,
            got: got.to_string(),
        }
    }
}
