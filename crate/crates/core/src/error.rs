use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parameters ({r}, {s}) are not coprime: gcd(|r|, |s|) = {gcd}")]
    NotCoprime { r: i64, s: i64, gcd: u64 },

    #[error("discriminant r^2 + 4s vanishes for (r, s) = ({r}, {s})")]
    ZeroDiscriminant { r: i64, s: i64 },

    #[error("degenerate pair (r, s) = ({r}, {s}): {rule}")]
    Degenerate { r: i64, s: i64, rule: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-integral cyclotomic quotient at n = {n}")]
    NonIntegerResult { n: u64 },

    #[error("zero is not a product of factorials")]
    ZeroInput,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("undecidable at {bits} bits: {context}")]
    Undecidable { context: String, bits: u32 },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
