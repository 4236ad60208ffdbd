//! Truncated 2-adic arithmetic: Z_q via a Teichmüller modulus, towers over
//! it, Frobenius and Teichmüller lifts.

mod teich;
mod tower;
mod zq;

pub use teich::*;
pub use tower::{TowerCtx, TowerElem};
pub use zq::{trunc, v2, Qq, UnramCtx, UnramData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("modulus not irreducible")]
    NotIrreducible,
}
