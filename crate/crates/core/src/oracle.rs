//! Ground truth by enumeration: count points of Y² + h(X)Y = f(X) over small
//! fields and rebuild P(T) from the counts.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::family::FamilyInput;
use crate::ff2::{BinField, Embedding, FfPoly, FqElem};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::zeta::{from_power_sums, ZetaError, ZetaNumerator};

/// Largest field degree the oracle will enumerate.
pub const MAX_ORACLE_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("field F_2^{0} too large for enumeration")]
    TooLarge(usize),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Projective count: one point at infinity plus the affine solutions.
/// For h(x) ≠ 0 the fiber has 2 or 0 points by the trace of f(x)/h(x)².
pub fn count_points_naive(h: &FfPoly, f: &FfPoly, field: &Arc<BinField>) -> Result<u64, OracleError> {
    let d = field.degree();
    if d > MAX_ORACLE_DEGREE {
        return Err(OracleError::TooLarge(d));
    }
    let mut n = 1u64;
    for v in field.elements() {
        let x = field.elem(v);
        let hx = h.eval(&x);
        let fx = f.eval(&x);
        if hx.is_zero() {
            n += 1;
        } else {
            let w = fx.times(&hx.times(&hx).inv().unwrap());
            if !w.trace() {
                n += 2;
            }
        }
    }
    Ok(n)
}

/// Counts N_1..N_m over F_{qn^k}, k = 1..m, for a curve over F_qn.
pub fn count_table(h: &FfPoly, f: &FfPoly, m: usize) -> Result<Vec<u64>, OracleError> {
    let base = h.ring_zero().f.clone();
    let d = base.degree();
    (1..=m)
        .map(|k| {
            if d * k > MAX_ORACLE_DEGREE {
                return Err(OracleError::TooLarge(d * k));
            }
            let big = if k == 1 { base.clone() } else { BinField::smallest_of_degree(d * k) };
            let emb = Embedding::new(base.clone(), big.clone()).expect("degree divides");
            count_points_naive(&emb.poly_to_big(h), &emb.poly_to_big(f), &big)
        })
        .collect()
}

/// P(T) from N_1..N_g via power sums s_m = qn^m + 1 − N_m.
pub fn zeta_from_counts(counts: &[u64], g: usize, qn: &BigInt) -> Result<ZetaNumerator, OracleError> {
    let s: Vec<BigInt> = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| qn.pow(i as u32 + 1) + 1 - BigInt::from(n))
        .collect();
    Ok(from_power_sums(&s, g, qn)?)
}

/// h̄ and f̄ of the fiber at γ̄ ∈ F_{q^n}, as polynomials over the big field.
pub fn fiber_polys(fi: &FamilyInput, emb: &Embedding, gamma: &FqElem) -> (FfPoly, FfPoly) {
    let at = |p: &Poly<Poly<FqElem>>| p.map(emb.big.zero(), |c| emb.poly_to_big(c).eval(gamma));
    (at(&fi.h), at(&fi.f))
}

/// Oracle numerator of the fiber at γ̄ over F_{q^n}.
pub fn oracle_zeta(fi: &FamilyInput, emb: &Embedding, gamma: &FqElem) -> Result<ZetaNumerator, OracleError> {
    let (h, f) = fiber_polys(fi, emb, gamma);
    let counts = count_table(&h, &f, fi.g)?;
    let qn = BigInt::from(1u8) << emb.big.degree();
    zeta_from_counts(&counts, fi.g, &qn)
}
