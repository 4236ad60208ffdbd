//! Binary fields F_{2^k}, polynomials over them, radicals and minimal polynomials.

mod field;
mod gf2poly;
mod ops;

pub use field::{BinField, FqElem};
pub use gf2poly::Gf2Poly;
pub use ops::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Ff2Error {
    #[error("gcd undefined: both inputs are zero")]
    GcdUndefined,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("modulus not irreducible")]
    NotIrreducible,
    #[error("F_2^{0} is not a subfield of F_2^{1}")]
    NotSubfield(usize, usize),
}
