use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("modulus {0} is out of range (need 2 <= p < 2^32)")]
    ModulusOutOfRange(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("linear system has no solution")]
    NoSolution,

    #[error("substitution is rank deficient: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("degenerate section after {attempts} attempts ({reason}); increase p or change the seed")]
    DegenerateSection { attempts: usize, reason: String },

    #[error("minor budget exceeded: {minors} minors x {graded_dim} monomials > {budget}")]
    BudgetExceeded {
        minors: u128,
        graded_dim: u128,
        budget: u128,
    },

    #[error("vector is not a syzygy: {0}")]
    NotASyzygy(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
