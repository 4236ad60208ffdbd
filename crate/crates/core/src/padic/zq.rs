use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::ff2::Gf2Poly;
use crate::scalar::Scalar;

const ZERO_VAL: i64 = i64::MAX;

thread_local! {
    static MASKS: RefCell<Vec<Option<BigInt>>> = const { RefCell::new(Vec::new()) };
}

/// `x mod 2^w` in `[0, 2^w)`.
pub fn trunc(x: &BigInt, w: u64) -> BigInt {
    if w == 0 {
        return BigInt::zero();
    }
    if x.sign() != Sign::Minus && x.bits() <= w {
        return x.clone();
    }
    MASKS.with(|m| {
        let mut m = m.borrow_mut();
        let i = w as usize;
        if m.len() <= i {
            m.resize(i + 1, None);
        }
        let mask = m[i].get_or_insert_with(|| (BigInt::one() << w) - 1);
        x & &*mask
    })
}

pub fn v2(x: &BigInt) -> Option<u64> {
    x.trailing_zeros()
}

/// Data shared by all precisions of one unramified extension Z_q = Z_2[x]/χ.
#[derive(Debug)]
pub struct UnramData {
    /// Degree a.
    pub a: usize,
    /// The F_2 modulus χ mod 2.
    pub mbar: Gf2Poly,
    /// Monic Teichmüller modulus, coefficients in [0, 2^chi_prec), low first.
    pub chi: Vec<BigInt>,
    pub chi_prec: u64,
    /// Row i: x^{2i} mod χ, i.e. σ(x^i).
    pub frob: Vec<Vec<BigInt>>,
}

/// Z_q with a fixed absolute precision cap 2^prec.
#[derive(Debug)]
pub struct UnramCtx {
    pub data: Arc<UnramData>,
    pub prec: i64,
}

impl UnramCtx {
    pub fn from_data(data: Arc<UnramData>, prec: i64) -> Arc<Self> {
        Arc::new(UnramCtx { data, prec })
    }

    pub fn with_prec(self: &Arc<Self>, prec: i64) -> Arc<Self> {
        Arc::new(UnramCtx { data: self.data.clone(), prec })
    }

    pub fn degree(&self) -> usize {
        self.data.a
    }

    pub fn zero(self: &Arc<Self>) -> Qq {
        Qq { ctx: self.clone(), val: ZERO_VAL, unit: Vec::new() }
    }

    pub fn one(self: &Arc<Self>) -> Qq {
        self.from_int(&BigInt::one())
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> Qq {
        self.from_int(&BigInt::from(n))
    }

    pub fn from_int(self: &Arc<Self>, n: &BigInt) -> Qq {
        let mut c = vec![BigInt::zero(); self.data.a];
        c[0] = n.clone();
        Qq::normalize(self.clone(), 0, c)
    }

    /// Element `2^val * sum c_i x^i`.
    pub fn from_coeffs(self: &Arc<Self>, val: i64, c: Vec<BigInt>) -> Qq {
        assert_eq!(c.len(), self.data.a);
        Qq::normalize(self.clone(), val, c)
    }

    /// Trivial lift of an F_q element given in the x-basis.
    pub fn lift_gf2(self: &Arc<Self>, v: &Gf2Poly) -> Qq {
        let c = (0..self.data.a).map(|i| BigInt::from(v.bit(i) as u8)).collect();
        Qq::normalize(self.clone(), 0, c)
    }

    /// The generator x.
    pub fn gen(self: &Arc<Self>) -> Qq {
        if self.data.a == 1 {
            return Qq::normalize(self.clone(), 0, vec![self.data.chi[0].clone() * -1]);
        }
        let mut c = vec![BigInt::zero(); self.data.a];
        c[1] = BigInt::one();
        Qq::normalize(self.clone(), 0, c)
    }
}

/// Element of Q_q = Z_q[1/2] at capped absolute precision: `2^val * unit`,
/// unit known modulo `2^(prec - val)`.
#[derive(Clone)]
pub struct Qq {
    pub ctx: Arc<UnramCtx>,
    val: i64,
    unit: Vec<BigInt>,
}

impl PartialEq for Qq {
    fn eq(&self, o: &Self) -> bool {
        if self.val == ZERO_VAL || o.val == ZERO_VAL {
            return self.val == o.val;
        }
        let p = self.ctx.prec.min(o.ctx.prec);
        if self.ctx.prec == o.ctx.prec {
            return self.val == o.val && self.unit == o.unit;
        }
        self.minus(o).val >= p
    }
}

impl fmt::Debug for Qq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(2^{})", self.ctx.prec);
        }
        write!(f, "2^{}*{:?}", self.val, self.unit)
    }
}

fn pick_ctx(a: &Arc<UnramCtx>, b: &Arc<UnramCtx>) -> Arc<UnramCtx> {
    if a.prec <= b.prec {
        a.clone()
    } else {
        b.clone()
    }
}

impl Qq {
    fn normalize(ctx: Arc<UnramCtx>, val: i64, mut c: Vec<BigInt>) -> Qq {
        let w = ctx.prec - val;
        if w <= 0 {
            return ctx.zero();
        }
        let mut tz = u64::MAX;
        for x in c.iter_mut() {
            *x = trunc(x, w as u64);
            if let Some(t) = v2(x) {
                tz = tz.min(t);
            }
        }
        if tz == u64::MAX {
            return ctx.zero();
        }
        if tz > 0 {
            for x in c.iter_mut() {
                *x >>= tz;
            }
        }
        Qq { ctx, val: val + tz as i64, unit: c }
    }

    pub fn valuation(&self) -> Option<i64> {
        (self.val != ZERO_VAL).then_some(self.val)
    }

    /// Valuation with zero mapped to the precision cap.
    pub fn val_or_prec(&self) -> i64 {
        self.valuation().unwrap_or(self.ctx.prec)
    }

    pub fn unit(&self) -> &[BigInt] {
        &self.unit
    }

    pub fn prec(&self) -> i64 {
        self.ctx.prec
    }

    /// Coefficients of `2^shift * self` as integers, requires val + shift >= 0.
    pub fn scaled_coeffs(&self, shift: i64) -> Vec<BigInt> {
        let a = self.ctx.data.a;
        if self.is_zero() {
            return vec![BigInt::zero(); a];
        }
        let e = self.val + shift;
        assert!(e >= 0, "scaled_coeffs would need a negative power of 2");
        self.unit.iter().map(|x| x << e as usize).collect()
    }

    pub fn with_ctx(&self, ctx: &Arc<UnramCtx>) -> Qq {
        if self.is_zero() {
            return ctx.zero();
        }
        Qq::normalize(ctx.clone(), self.val, self.unit.clone())
    }

    pub fn mul_pow2(&self, k: i64) -> Qq {
        if self.is_zero() {
            return self.clone();
        }
        Qq::normalize(self.ctx.clone(), self.val + k, self.unit.clone())
    }

    /// Reduction mod 2 of an integral element.
    pub fn residue(&self) -> Gf2Poly {
        if self.is_zero() || self.val > 0 {
            return Gf2Poly::zero();
        }
        assert!(self.val == 0, "residue of a non-integral element");
        let mut g = Gf2Poly::zero();
        for (i, x) in self.unit.iter().enumerate() {
            if x.is_odd() {
                g.flip(i);
            }
        }
        g
    }

    fn reduce_chi(ctx: &UnramCtx, mut c: Vec<BigInt>, w: u64) -> Vec<BigInt> {
        let d = &ctx.data;
        let a = d.a;
        assert!(w <= d.chi_prec, "working precision exceeds the stored modulus precision");
        for k in (a..c.len()).rev() {
            if c[k].is_zero() {
                continue;
            }
            let t = std::mem::take(&mut c[k]);
            for i in 0..a {
                if !d.chi[i].is_zero() {
                    c[k - a + i] -= &t * &d.chi[i];
                }
            }
        }
        c.truncate(a);
        c
    }

    /// σ, the Frobenius lift x ↦ x².
    pub fn frobenius(&self) -> Qq {
        let d = &self.ctx.data;
        if d.a == 1 || self.is_zero() {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); d.a];
        for (i, u) in self.unit.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (j, f) in d.frob[i].iter().enumerate() {
                c[j] += u * f;
            }
        }
        Qq::normalize(self.ctx.clone(), self.val, c)
    }

    pub fn frobenius_pow(&self, k: usize) -> Qq {
        let mut x = self.clone();
        for _ in 0..k % self.ctx.data.a {
            x = x.frobenius();
        }
        x
    }

    fn unit_inverse(&self, w: u64) -> Vec<BigInt> {
        let d = &self.ctx.data;
        if d.a == 1 {
            let m = BigInt::one() << w;
            let inv = self.unit[0].mod_floor(&m).extended_gcd(&m);
            return vec![trunc(&inv.x, w)];
        }
        // inverse mod 2 in F_q, then Newton y <- y(2 - u y)
        let ctxw = UnramCtx::from_data(self.ctx.data.clone(), w as i64);
        let u = Qq::normalize(ctxw.clone(), 0, self.unit.clone());
        let r = u.residue();
        let inv2 = gf2_inverse(&r, &d.mbar);
        let mut y = ctxw.lift_gf2(&inv2);
        let two = ctxw.from_i64(2);
        let mut bits = 1u64;
        while bits < w {
            y = y.times(&two.minus(&u.times(&y)));
            bits *= 2;
        }
        y.scaled_coeffs(0)
    }

    pub fn sqr(&self) -> Qq {
        self.times(self)
    }
}

fn gf2_inverse(a: &Gf2Poly, m: &Gf2Poly) -> Gf2Poly {
    let (mut r0, mut r1) = (m.clone(), a.clone());
    let (mut s0, mut s1) = (Gf2Poly::zero(), Gf2Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        r0 = r1;
        r1 = r;
        let s = s0.add(&q.mul(&s1));
        s0 = s1;
        s1 = s;
    }
    assert!(r0.is_one(), "element not invertible mod 2");
    s0.rem(m)
}

impl Scalar for Qq {
    fn zero_like(&self) -> Self {
        self.ctx.zero()
    }
    fn one_like(&self) -> Self {
        self.ctx.one()
    }
    fn is_zero(&self) -> bool {
        self.val == ZERO_VAL
    }
    fn plus(&self, o: &Self) -> Self {
        if self.is_zero() {
            return if o.ctx.prec <= self.ctx.prec { o.clone() } else { o.with_ctx(&self.ctx) };
        }
        if o.is_zero() {
            return if self.ctx.prec <= o.ctx.prec { self.clone() } else { self.with_ctx(&o.ctx) };
        }
        let ctx = pick_ctx(&self.ctx, &o.ctx);
        let v = self.val.min(o.val);
        if ctx.prec - v <= 0 {
            return ctx.zero();
        }
        let (sa, sb) = ((self.val - v) as usize, (o.val - v) as usize);
        let c = self
            .unit
            .iter()
            .zip(&o.unit)
            .map(|(x, y)| (x << sa) + (y << sb))
            .collect();
        Qq::normalize(ctx, v, c)
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let ctx = pick_ctx(&self.ctx, &o.ctx);
        if self.is_zero() || o.is_zero() {
            return ctx.zero();
        }
        let v = self.val + o.val;
        let w = ctx.prec - v;
        if w <= 0 {
            return ctx.zero();
        }
        let a = ctx.data.a;
        if a == 1 {
            return Qq::normalize(ctx, v, vec![&self.unit[0] * &o.unit[0]]);
        }
        let mut c = vec![BigInt::zero(); 2 * a - 1];
        for (i, x) in self.unit.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.unit.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        let c = Qq::reduce_chi(&ctx, c, w as u64);
        Qq::normalize(ctx, v, c)
    }
    fn negate(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.unit.iter().map(|x| -x).collect();
        Qq::normalize(self.ctx.clone(), self.val, c)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        self.ctx.from_i64(n)
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let v = -self.val;
        let w = self.ctx.prec - v;
        if w <= 0 {
            return Some(self.ctx.zero());
        }
        let u = self.unit_inverse(w as u64);
        Some(Qq::normalize(self.ctx.clone(), v, u))
    }
}
