//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by polynomial, matrix, field, factorization, and register
/// operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("modulus must have degree at least 1")]
    ConstantModulus,
    #[error("operation requires a polynomial of degree at least 1")]
    ConstantPolynomial,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("factorization does not match the expected value: {0}")]
    FactorizationMismatch(String),
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error("zero element is not invertible and has no index")]
    ZeroElement,
    #[error("cannot factor zero")]
    ZeroValue,
    #[error("failed to fully factor {0}")]
    FactoringFailed(String),
    #[error("not a candidate: tap vector has a0 = 0")]
    NotACandidate,
    #[error("start state must be nonzero")]
    ZeroState,
    #[error("period guard exceeded: m*n = {size} > {guard} (pass force to override)")]
    PeriodGuard { size: usize, guard: usize },
    #[error("retry budget exhausted while searching")]
    RetryBudgetExhausted,
    #[error("unsupported size: {0}")]
    TooLarge(String),
    #[error("matrix is singular")]
    Singular,
    #[error("state does not match register dimensions: {0}")]
    StateMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid spec file: {0}")]
    SpecParse(String),
    #[error("invalid hex string: {0}")]
    HexParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
