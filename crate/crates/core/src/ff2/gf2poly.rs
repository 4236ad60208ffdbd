use std::fmt;

use smallvec::SmallVec;

/// Polynomial over F_2, bit `i` of the packed words is the coefficient of t^i.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Gf2Poly {
    w: SmallVec<[u64; 2]>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { w: SmallVec::new() }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn from_u64(x: u64) -> Self {
        let mut p = Gf2Poly { w: SmallVec::from_slice(&[x]) };
        p.trim();
        p
    }

    pub fn from_words(w: &[u64]) -> Self {
        let mut p = Gf2Poly { w: SmallVec::from_slice(w) };
        p.trim();
        p
    }

    /// Polynomial with the given exponents set.
    pub fn from_exponents(es: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in es {
            p.flip(e);
        }
        p
    }

    pub fn monomial(e: usize) -> Self {
        Self::from_exponents(&[e])
    }

    pub fn words(&self) -> &[u64] {
        &self.w
    }

    /// Low 64 coefficients.
    pub fn low_u64(&self) -> u64 {
        self.w.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.w.last() == Some(&0) {
            self.w.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.w.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.w.len() == 1 && self.w[0] == 1
    }

    pub fn degree(&self) -> Option<usize> {
        let top = *self.w.last()?;
        Some((self.w.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn bit(&self, i: usize) -> bool {
        self.w.get(i / 64).is_some_and(|x| (x >> (i % 64)) & 1 == 1)
    }

    pub fn flip(&mut self, i: usize) {
        let k = i / 64;
        if self.w.len() <= k {
            self.w.resize(k + 1, 0);
        }
        self.w[k] ^= 1 << (i % 64);
        self.trim();
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = if self.w.len() >= o.w.len() { (self, o) } else { (o, self) };
        let mut w = a.w.clone();
        for (x, y) in w.iter_mut().zip(b.w.iter()) {
            *x ^= y;
        }
        let mut p = Gf2Poly { w };
        p.trim();
        p
    }

    pub fn shl(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut w: SmallVec<[u64; 2]> = SmallVec::from_elem(0, self.w.len() + ws + 1);
        for (i, &x) in self.w.iter().enumerate() {
            w[i + ws] |= x << bs;
            if bs > 0 {
                w[i + ws + 1] |= x >> (64 - bs);
            }
        }
        let mut p = Gf2Poly { w };
        p.trim();
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut w: SmallVec<[u64; 2]> = SmallVec::from_elem(0, self.w.len() + o.w.len());
        for (i, &a) in self.w.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.w.iter().enumerate() {
                let (lo, hi) = clmul(a, b);
                w[i + j] ^= lo;
                w[i + j + 1] ^= hi;
            }
        }
        let mut p = Gf2Poly { w };
        p.trim();
        p
    }

    pub fn square(&self) -> Self {
        let mut w: SmallVec<[u64; 2]> = SmallVec::from_elem(0, 2 * self.w.len());
        for (i, &a) in self.w.iter().enumerate() {
            w[2 * i] = spread(a as u32);
            w[2 * i + 1] = spread((a >> 32) as u32);
        }
        let mut p = Gf2Poly { w };
        p.trim();
        p
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            q.flip(rd - dd);
            r = r.add(&d.shl(rd - dd));
        }
        (q, r)
    }

    pub fn rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            r = r.add(&d.shl(rd - dd));
        }
        r
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn mulmod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    pub fn eval_bits(&self) -> bool {
        self.w.iter().map(|x| x.count_ones()).sum::<u32>() % 2 == 1
    }

    /// Rabin irreducibility test over F_2.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        let t = Self::monomial(1);
        // t^(2^k) mod self
        let frob = |k: usize| {
            let mut x = t.rem(self);
            for _ in 0..k {
                x = x.square().rem(self);
            }
            x
        };
        if frob(n).add(&t.rem(self)).rem(self) != Self::zero() {
            return false;
        }
        let mut m = n;
        let mut primes = Vec::new();
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                primes.push(p);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        primes.iter().all(|&p| frob(n / p).add(&t).rem(self).gcd(self).is_one())
    }
}

fn spread(x: u32) -> u64 {
    let mut x = x as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    (x | (x << 1)) & 0x5555_5555_5555_5555
}

/// Carry-less 64x64 -> 128 product, returned as (low, high).
fn clmul(a: u64, b: u64) -> (u64, u64) {
    let mut lo = 0u64;
    let mut hi = 0u64;
    let mut b = b;
    while b != 0 {
        let i = b.trailing_zeros();
        lo ^= a << i;
        if i > 0 {
            hi ^= a >> (64 - i);
        }
        b &= b - 1;
    }
    (lo, hi)
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else { return write!(f, "0") };
        let mut first = true;
        for i in (0..=d).rev() {
            if !self.bit(i) {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "t")?,
                _ => write!(f, "t^{}", i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_square() {
        let a = Gf2Poly::from_u64(0b1011);
        assert_eq!(a.mul(&a), a.square());
        let big = Gf2Poly::from_exponents(&[0, 63, 64, 130]);
        assert_eq!(big.mul(&big), big.square());
        assert_eq!(big.degree(), Some(130));
    }

    #[test]
    fn division_and_gcd() {
        // t^3+t = t(t+1)^2, t^2+1 = (t+1)^2
        let a = Gf2Poly::from_u64(0b1010);
        let b = Gf2Poly::from_u64(0b101);
        assert_eq!(a.gcd(&b), b);
        let (q, r) = Gf2Poly::from_exponents(&[100, 3]).divrem(&a);
        assert_eq!(q.mul(&a).add(&r), Gf2Poly::from_exponents(&[100, 3]));
    }

    #[test]
    fn irreducibility() {
        assert!(Gf2Poly::from_u64(0b111).is_irreducible());
        assert!(Gf2Poly::from_u64(0b1011).is_irreducible());
        assert!(!Gf2Poly::from_u64(0b101).is_irreducible());
        assert!(Gf2Poly::from_u64(0b11).is_irreducible());
        assert!(!Gf2Poly::from_u64(0b10001).is_irreducible()); // (t+1)^4
    }
}
