//! Finite fields `F_{p^n}` and polynomials over them.

mod ext;
mod factor;
mod field;
mod poly;

pub use ext::Extension;
pub use factor::{distinct_degree, equal_degree, factor, squarefree};
pub use field::{FieldElement, Gf, MAX_CACHED_EXTENSION, TABLE_LIMIT};
pub use poly::Poly;

pub(crate) use field::prime_factors;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible")]
    ReducibleModulus,
    #[error("modulus is not monic")]
    NotMonic,
    #[error("expected degree {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("operands live in different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("field too large")]
    FieldTooLarge,
    #[error("index is not a field element")]
    NotAnElement,
}
