//! Finite H-adic expansions Σ_L d_L(X)·H^L (deg d_L < s) over Z_q mod 2^w,
//! multiplied by Kronecker substitution into one big integer product.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

use crate::padic::{trunc, Qq, UnramCtx};
use crate::poly::Poly;
use crate::scalar::Scalar;
use std::sync::Arc;

/// Z_q mod 2^w as vectors of a residues, with x^a = −Σ χ_i x^i.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub a: usize,
    pub w: u64,
    nchi: Vec<BigUint>,
}

fn to_unsigned(x: &BigInt, w: u64) -> BigUint {
    trunc(x, w).to_biguint().expect("trunc yields a nonnegative residue")
}

impl ResidueRing {
    pub fn new(chi: &[BigInt], w: u64) -> Self {
        let a = chi.len() - 1;
        let nchi = chi[..a].iter().map(|c| to_unsigned(&-c, w)).collect();
        ResidueRing { a, w, nchi }
    }

    #[inline]
    pub fn mask(&self, x: BigUint) -> BigUint {
        if x.bits() <= self.w {
            return x;
        }
        let words = self.w.div_ceil(32) as usize;
        let mut d = x.to_u32_digits();
        d.truncate(words);
        let rem = self.w % 32;
        if rem != 0 {
            if let Some(t) = d.get_mut(words - 1) {
                *t &= (1u32 << rem) - 1;
            }
        }
        BigUint::new(d)
    }

    pub fn from_int(&self, x: &BigInt) -> BigUint {
        to_unsigned(x, self.w)
    }

    pub fn neg(&self, x: &BigUint) -> BigUint {
        if x.is_zero() {
            BigUint::zero()
        } else {
            (BigUint::from(1u8) << self.w) - x
        }
    }

    pub fn add(&self, x: &BigUint, y: &BigUint) -> BigUint {
        self.mask(x + y)
    }

    pub fn sub(&self, x: &BigUint, y: &BigUint) -> BigUint {
        self.mask(x + self.neg(y))
    }

    /// Fold positions ≥ a of a coefficient vector back with χ.
    pub fn fold_chi(&self, c: &mut Vec<BigUint>) {
        let a = self.a;
        for k in (a..c.len()).rev() {
            let t = std::mem::take(&mut c[k]);
            if t.is_zero() {
                continue;
            }
            for i in 0..a {
                if !self.nchi[i].is_zero() {
                    let v = &c[k - a + i] + &t * &self.nchi[i];
                    c[k - a + i] = self.mask(v);
                }
            }
        }
        c.truncate(a);
    }

    pub fn zq_mul(&self, x: &[BigUint], y: &[BigUint]) -> Vec<BigUint> {
        let a = self.a;
        if a == 1 {
            return vec![self.mask(&x[0] * &y[0])];
        }
        let mut c = vec![BigUint::zero(); 2 * a - 1];
        for (i, p) in x.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, q) in y.iter().enumerate() {
                if !q.is_zero() {
                    c[i + j] += p * q;
                }
            }
        }
        for v in c.iter_mut() {
            *v = self.mask(std::mem::take(v));
        }
        self.fold_chi(&mut c);
        c
    }
}

/// Shape data shared by all series: digit base H (monic of degree s) and Z_q.
#[derive(Clone, Debug)]
pub struct SeriesShape {
    pub s: usize,
    pub a: usize,
    /// −H_i for i < s, each an a-vector.
    pub neg_h: Vec<Vec<BigInt>>,
    pub chi: Vec<BigInt>,
    pub hbig: Poly<Qq>,
}

/// Residue context at one working precision.
#[derive(Clone, Debug)]
pub struct SeriesRing {
    pub shape: Arc<SeriesShape>,
    pub r: ResidueRing,
    neg_h: Vec<Vec<BigUint>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HSeries {
    /// Level of the first digit.
    pub lo: i64,
    pub nlev: usize,
    /// Entry (level, j, l) at (level·s + j)·a + l.
    pub c: Vec<BigUint>,
}

impl SeriesShape {
    pub fn new(hbig: &Poly<Qq>, ctx: &Arc<UnramCtx>) -> Arc<Self> {
        let s = hbig.degree().expect("digit base must be nonconstant");
        assert!(hbig.is_monic());
        let neg_h = (0..s).map(|i| hbig.coeff(i).negate().scaled_coeffs(0)).collect();
        Arc::new(SeriesShape {
            s,
            a: ctx.degree(),
            neg_h,
            chi: ctx.data.chi.clone(),
            hbig: hbig.clone(),
        })
    }

    pub fn ring(self: &Arc<Self>, w: u64) -> SeriesRing {
        let r = ResidueRing::new(&self.chi, w);
        let neg_h = self.neg_h.iter().map(|v| v.iter().map(|x| r.from_int(x)).collect()).collect();
        SeriesRing { shape: self.clone(), r, neg_h }
    }

    /// H-adic digits of an integral polynomial, lowest level 0.
    pub fn digits_of(&self, p: &Poly<Qq>) -> Vec<Vec<Vec<BigInt>>> {
        let mut out = Vec::new();
        let mut n = p.clone();
        while !n.is_zero() {
            let (q, r) = n.divrem(&self.hbig);
            out.push((0..self.s).map(|j| r.coeff(j).scaled_coeffs(0)).collect());
            n = q;
        }
        out
    }
}

impl SeriesRing {
    fn stride(&self) -> usize {
        self.shape.s * self.shape.a
    }

    pub fn zero(&self) -> HSeries {
        HSeries { lo: 0, nlev: 0, c: Vec::new() }
    }

    /// Series from digit vectors (as produced by `digits_of`) placed at level `lo`.
    pub fn from_digits(&self, digits: &[Vec<Vec<BigInt>>], lo: i64) -> HSeries {
        let mut c = Vec::with_capacity(digits.len() * self.stride());
        for d in digits {
            for coef in d {
                for x in coef {
                    c.push(self.r.from_int(x));
                }
            }
        }
        let mut out = HSeries { lo, nlev: digits.len(), c };
        self.trim(&mut out);
        out
    }

    pub fn from_poly(&self, p: &Poly<Qq>) -> HSeries {
        self.from_digits(&self.shape.digits_of(p), 0)
    }

    /// Re-read the same residues at this ring's precision.
    pub fn recast(&self, x: &HSeries) -> HSeries {
        let mut c: Vec<BigUint> = x.c.iter().map(|v| self.r.mask(v.clone())).collect();
        c.shrink_to_fit();
        let mut out = HSeries { lo: x.lo, nlev: x.nlev, c };
        self.trim(&mut out);
        out
    }

    fn level_is_zero(&self, x: &HSeries, i: usize) -> bool {
        let st = self.stride();
        x.c[i * st..(i + 1) * st].iter().all(|v| v.is_zero())
    }

    /// Drop zero levels at both ends.
    pub fn trim(&self, x: &mut HSeries) {
        let st = self.stride();
        let mut hi = x.nlev;
        while hi > 0 && self.level_is_zero(x, hi - 1) {
            hi -= 1;
        }
        let mut lo = 0;
        while lo < hi && self.level_is_zero(x, lo) {
            lo += 1;
        }
        if lo == hi {
            *x = self.zero();
            return;
        }
        x.c.truncate(hi * st);
        x.c.drain(..lo * st);
        x.lo += lo as i64;
        x.nlev = hi - lo;
    }

    fn combine(&self, x: &HSeries, y: &HSeries, negate_y: bool) -> HSeries {
        if y.nlev == 0 {
            return x.clone();
        }
        let st = self.stride();
        let lo = if x.nlev == 0 { y.lo } else { x.lo.min(y.lo) };
        let hi = if x.nlev == 0 { y.lo + y.nlev as i64 } else { (x.lo + x.nlev as i64).max(y.lo + y.nlev as i64) };
        let nlev = (hi - lo) as usize;
        let mut c = vec![BigUint::zero(); nlev * st];
        if x.nlev > 0 {
            let off = ((x.lo - lo) as usize) * st;
            for (i, v) in x.c.iter().enumerate() {
                c[off + i] = v.clone();
            }
        }
        let off = ((y.lo - lo) as usize) * st;
        for (i, v) in y.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            c[off + i] = if negate_y { self.r.sub(&c[off + i], v) } else { self.r.add(&c[off + i], v) };
        }
        let mut out = HSeries { lo, nlev, c };
        self.trim(&mut out);
        out
    }

    pub fn add(&self, x: &HSeries, y: &HSeries) -> HSeries {
        self.combine(x, y, false)
    }

    pub fn sub(&self, x: &HSeries, y: &HSeries) -> HSeries {
        self.combine(x, y, true)
    }

    /// Multiply by H^k.
    pub fn shift(&self, x: &HSeries, k: i64) -> HSeries {
        let mut o = x.clone();
        o.lo += k;
        o
    }

    pub fn scale_small(&self, x: &HSeries, k: u64) -> HSeries {
        let c = x.c.iter().map(|v| self.r.mask(v * k)).collect();
        let mut o = HSeries { lo: x.lo, nlev: x.nlev, c };
        self.trim(&mut o);
        o
    }

    pub fn mul(&self, x: &HSeries, y: &HSeries) -> HSeries {
        if x.nlev == 0 || y.nlev == 0 {
            return self.zero();
        }
        let (s, a, w) = (self.shape.s, self.shape.a, self.r.w);
        let (sx, sa) = (2 * s - 1, 2 * a - 1);
        let terms = (x.nlev.min(y.nlev) * s * a) as u64;
        let bits = 2 * w + 64 - terms.leading_zeros() as u64 + 1;
        let words = bits.div_ceil(32) as usize;
        let pack = |z: &HSeries| {
            let nslots = z.nlev * sx * sa;
            let mut buf = vec![0u32; nslots * words];
            for lev in 0..z.nlev {
                for j in 0..s {
                    for l in 0..a {
                        let v = &z.c[(lev * s + j) * a + l];
                        if v.is_zero() {
                            continue;
                        }
                        let slot = (lev * sx + j) * sa + l;
                        for (t, d) in v.iter_u32_digits().enumerate() {
                            buf[slot * words + t] = d;
                        }
                    }
                }
            }
            BigUint::new(buf)
        };
        let prod = pack(x) * pack(y);
        let digits = prod.to_u32_digits();
        let plev = x.nlev + y.nlev - 1;
        let wwords = w.div_ceil(32) as usize;
        let read = |slot: usize| -> BigUint {
            let start = slot * words;
            if start >= digits.len() {
                return BigUint::zero();
            }
            let end = (start + wwords).min(digits.len());
            self.r.mask(BigUint::from_slice(&digits[start..end]))
        };
        let mut out: Vec<BigUint> = Vec::with_capacity((plev + 1) * s * a);
        let mut carry: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); a]; s.saturating_sub(1)];
        let mut lev = 0;
        loop {
            if lev >= plev && carry.iter().flatten().all(|v| v.is_zero()) {
                break;
            }
            // digit polynomial of X-degree ≤ 2s−2 with a-vector coefficients
            let mut d: Vec<Vec<BigUint>> = (0..sx)
                .map(|j| {
                    if lev >= plev {
                        return vec![BigUint::zero(); a];
                    }
                    let mut v: Vec<BigUint> = (0..sa).map(|l| read((lev * sx + j) * sa + l)).collect();
                    if a > 1 {
                        self.r.fold_chi(&mut v);
                    }
                    v
                })
                .collect();
            for (j, cv) in carry.iter().enumerate() {
                for l in 0..a {
                    if !cv[l].is_zero() {
                        d[j][l] = self.r.add(&d[j][l], &cv[l]);
                    }
                }
            }
            let mut next = vec![vec![BigUint::zero(); a]; s.saturating_sub(1)];
            for j in (s..sx).rev() {
                let t = std::mem::take(&mut d[j]);
                if t.iter().all(|v| v.is_zero()) {
                    continue;
                }
                for i in 0..s {
                    if self.neg_h[i].iter().all(|v| v.is_zero()) {
                        continue;
                    }
                    let p = self.r.zq_mul(&t, &self.neg_h[i]);
                    for l in 0..a {
                        d[j - s + i][l] = self.r.add(&d[j - s + i][l], &p[l]);
                    }
                }
                next[j - s] = t;
            }
            for dj in d.into_iter().take(s) {
                out.extend(dj);
            }
            carry = next;
            lev += 1;
        }
        let mut o = HSeries { lo: x.lo + y.lo, nlev: lev, c: out };
        self.trim(&mut o);
        o
    }

    /// Smallest 2-adic valuation among the coefficients, None if zero mod 2^w.
    pub fn valuation(&self, x: &HSeries) -> Option<u64> {
        x.c.iter().filter(|v| !v.is_zero()).map(|v| v.trailing_zeros().unwrap()).min()
    }

    /// Level range [lo, hi] of the nonzero digits.
    pub fn range(x: &HSeries) -> Option<(i64, i64)> {
        (x.nlev > 0).then(|| (x.lo, x.lo + x.nlev as i64 - 1))
    }

    /// Digit at level L as a polynomial over Z_q at `ctx` (residues read as integers).
    pub fn digit_poly(&self, x: &HSeries, level: i64, ctx: &Arc<UnramCtx>) -> Poly<Qq> {
        let zero = Poly::zero(ctx.zero());
        if level < x.lo || level >= x.lo + x.nlev as i64 {
            return zero;
        }
        let (s, a) = (self.shape.s, self.shape.a);
        let i = (level - x.lo) as usize;
        let coeffs = (0..s)
            .map(|j| {
                let v = (0..a)
                    .map(|l| BigInt::from_biguint(Sign::Plus, x.c[(i * s + j) * a + l].clone()))
                    .collect();
                ctx.from_coeffs(0, v)
            })
            .collect();
        Poly::new(coeffs, ctx.zero())
    }

    /// Σ_{L≥0} d_L H^L as one polynomial (Horner in the residue domain).
    pub fn nonnegative_part(&self, x: &HSeries, ctx: &Arc<UnramCtx>) -> Poly<Qq> {
        let (s, a) = (self.shape.s, self.shape.a);
        let top = x.lo + x.nlev as i64 - 1;
        if x.nlev == 0 || top < 0 {
            return Poly::zero(ctx.zero());
        }
        // acc holds X-coefficients as a-vectors
        let mut acc: Vec<Vec<BigUint>> = Vec::new();
        for level in (0..=top).rev() {
            // acc ← acc·H
            if !acc.is_empty() {
                let mut nx = vec![vec![BigUint::zero(); a]; acc.len() + s];
                for (k, c) in acc.iter().enumerate() {
                    for l in 0..a {
                        nx[k + s][l] = c[l].clone();
                    }
                    if c.iter().all(|v| v.is_zero()) {
                        continue;
                    }
                    for i in 0..s {
                        if self.neg_h[i].iter().all(|v| v.is_zero()) {
                            continue;
                        }
                        let p = self.r.zq_mul(c, &self.neg_h[i]);
                        for l in 0..a {
                            nx[k + i][l] = self.r.sub(&nx[k + i][l], &p[l]);
                        }
                    }
                }
                acc = nx;
            }
            if acc.len() < s {
                acc.resize(s, vec![BigUint::zero(); a]);
            }
            if level < x.lo {
                continue;
            }
            let i = (level - x.lo) as usize;
            for j in 0..s {
                for l in 0..a {
                    let v = &x.c[(i * s + j) * a + l];
                    if !v.is_zero() {
                        acc[j][l] = self.r.add(&acc[j][l], v);
                    }
                }
            }
        }
        let coeffs = acc
            .into_iter()
            .map(|v| ctx.from_coeffs(0, v.into_iter().map(|u| BigInt::from_biguint(Sign::Plus, u)).collect()))
            .collect();
        Poly::new(coeffs, ctx.zero())
    }
}
