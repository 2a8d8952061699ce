use thiserror::Error;

/// Errors raised by the arithmetic, character-sum and moment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is even; an odd prime is required")]
    EvenModulus(u64),
    #[error("modulus {0} is too large for table-driven evaluation (limit {1})")]
    ModulusTooLarge(u64, u64),
    #[error("p = {0} is not congruent to 1 mod 3")]
    WrongResidueClass(u64),
    #[error("the principal character is not allowed here")]
    PrincipalCharacter,
    #[error("twist n = {n} is divisible by p = {p}")]
    BadTwist { n: i64, p: u64 },
    #[error("t = {t} is not admissible modulo p = {p}; need 2 <= t <= p - 1")]
    BadT { t: u64, p: u64 },
    #[error("truncation length {needed} exceeds the cap {cap}")]
    TailBoundUnreachable { needed: u64, cap: u64 },
    #[error("tolerance {0} is outside the supported range [1e-8, 1e-2]")]
    BadTolerance(f64),
    #[error("dyadic arithmetic overflowed")]
    Overflow,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what}: two evaluation routes disagree by {gap:e} (tolerance {tol:e})")]
    CrossCheckFailed { what: &'static str, gap: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
