use std::fmt;
use std::sync::Arc;

use super::gf2poly::Gf2Poly;
use crate::scalar::Scalar;

/// The field F_2[t]/(m(t)) for an irreducible m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinField {
    modulus: Gf2Poly,
    deg: usize,
}

impl BinField {
    pub fn new(modulus: Gf2Poly) -> Option<Arc<Self>> {
        if !modulus.is_irreducible() {
            return None;
        }
        let deg = modulus.degree().unwrap();
        Some(Arc::new(BinField { modulus, deg }))
    }

    /// F_2 itself, presented as F_2[t]/(t+1).
    pub fn prime() -> Arc<Self> {
        Self::new(Gf2Poly::from_u64(0b11)).unwrap()
    }

    /// The irreducible of degree `d` with the smallest bit pattern.
    pub fn smallest_of_degree(d: usize) -> Arc<Self> {
        assert!((1..64).contains(&d));
        let mut m = (1u64 << d) | 1;
        loop {
            if let Some(f) = Self::new(Gf2Poly::from_u64(m)) {
                return f;
            }
            m += 2;
        }
    }

    pub fn modulus(&self) -> &Gf2Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn reduce(&self, x: &Gf2Poly) -> Gf2Poly {
        x.rem(&self.modulus)
    }

    pub fn mul(&self, a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
        a.mul(b).rem(&self.modulus)
    }

    pub fn square(&self, a: &Gf2Poly) -> Gf2Poly {
        a.square().rem(&self.modulus)
    }

    /// a^(2^k).
    pub fn frob(&self, a: &Gf2Poly, k: usize) -> Gf2Poly {
        let mut x = a.clone();
        for _ in 0..k % self.deg.max(1) {
            x = self.square(&x);
        }
        x
    }

    pub fn pow(&self, a: &Gf2Poly, mut e: u128) -> Gf2Poly {
        let mut base = a.clone();
        let mut acc = Gf2Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn inv(&self, a: &Gf2Poly) -> Option<Gf2Poly> {
        if a.is_zero() {
            return None;
        }
        // extended Euclid on (modulus, a)
        let (mut r0, mut r1) = (self.modulus.clone(), a.clone());
        let (mut s0, mut s1) = (Gf2Poly::zero(), Gf2Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
            let s = s0.add(&q.mul(&s1));
            s0 = s1;
            s1 = s;
        }
        debug_assert!(r0.is_one());
        Some(self.reduce(&s0))
    }

    pub fn sqrt(&self, a: &Gf2Poly) -> Gf2Poly {
        self.frob(a, self.deg - 1)
    }

    /// Absolute trace to F_2.
    pub fn trace(&self, a: &Gf2Poly) -> bool {
        let mut x = a.clone();
        let mut acc = a.clone();
        for _ in 1..self.deg {
            x = self.square(&x);
            acc = acc.add(&x);
        }
        debug_assert!(acc.degree().unwrap_or(0) == 0);
        acc.is_one()
    }

    /// All field elements, in bit-pattern order.
    pub fn elements(&self) -> impl Iterator<Item = Gf2Poly> {
        assert!(self.deg < 40, "field too large to enumerate");
        (0u64..(1u64 << self.deg)).map(Gf2Poly::from_u64)
    }

    pub fn elem(self: &Arc<Self>, v: Gf2Poly) -> FqElem {
        FqElem { f: self.clone(), v: self.reduce(&v) }
    }

    pub fn zero(self: &Arc<Self>) -> FqElem {
        FqElem { f: self.clone(), v: Gf2Poly::zero() }
    }

    pub fn one(self: &Arc<Self>) -> FqElem {
        FqElem { f: self.clone(), v: Gf2Poly::one() }
    }

    /// The class of t.
    pub fn gen(self: &Arc<Self>) -> FqElem {
        self.elem(Gf2Poly::monomial(1))
    }
}

/// Self-contained element of a [`BinField`].
#[derive(Clone)]
pub struct FqElem {
    pub f: Arc<BinField>,
    pub v: Gf2Poly,
}

impl PartialEq for FqElem {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v
    }
}

impl Eq for FqElem {}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl FqElem {
    pub fn square(&self) -> Self {
        FqElem { f: self.f.clone(), v: self.f.square(&self.v) }
    }

    pub fn frob(&self, k: usize) -> Self {
        FqElem { f: self.f.clone(), v: self.f.frob(&self.v, k) }
    }

    pub fn sqrt(&self) -> Self {
        FqElem { f: self.f.clone(), v: self.f.sqrt(&self.v) }
    }

    pub fn trace(&self) -> bool {
        self.f.trace(&self.v)
    }

    pub fn pow_big(&self, e: u128) -> Self {
        FqElem { f: self.f.clone(), v: self.f.pow(&self.v, e) }
    }
}

impl Scalar for FqElem {
    fn zero_like(&self) -> Self {
        self.f.zero()
    }
    fn one_like(&self) -> Self {
        self.f.one()
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        FqElem { f: self.f.clone(), v: self.v.add(&o.v) }
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(o)
    }
    fn times(&self, o: &Self) -> Self {
        FqElem { f: self.f.clone(), v: self.f.mul(&self.v, &o.v) }
    }
    fn negate(&self) -> Self {
        self.clone()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        if n.rem_euclid(2) == 1 {
            self.f.one()
        } else {
            self.f.zero()
        }
    }
    fn inv(&self) -> Option<Self> {
        self.f.inv(&self.v).map(|v| FqElem { f: self.f.clone(), v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f8_arithmetic() {
        let f = BinField::new(Gf2Poly::from_u64(0b1011)).unwrap();
        for x in f.elements().skip(1) {
            let e = f.elem(x);
            assert!(e.times(&e.inv().unwrap()).is_one());
            assert_eq!(e.sqrt().square(), e);
            assert_eq!(e.pow_big(8), e);
        }
        // u = t^2 + t satisfies u^4 + u^2 + u = 0
        let u = f.elem(Gf2Poly::from_u64(0b110));
        let s = u.pow_u(4).plus(&u.pow_u(2)).plus(&u);
        assert!(s.is_zero());
    }

    #[test]
    fn trace_counts() {
        let f = BinField::smallest_of_degree(5);
        let ones = f.elements().filter(|x| f.trace(x)).count();
        assert_eq!(ones, 16);
        assert!(BinField::new(Gf2Poly::from_u64(0b101)).is_none());
    }
}
