use std::fmt;
use std::sync::Arc;

use super::zq::{Qq, UnramCtx};
use crate::linalg::mat_inverse_by;
use crate::scalar::Scalar;

/// Z_q[z]/ψ(z) for a monic ψ of degree n. When ψ is a Teichmüller modulus
/// the Frobenius table `sigma_z` is present and σ(z) = z².
#[derive(Debug)]
pub struct TowerCtx {
    pub base: Arc<UnramCtx>,
    pub n: usize,
    /// Monic modulus, low first, stored at the higher precision it was lifted to.
    pub psi: Vec<Qq>,
    /// Row i: z^{2i} mod ψ.
    pub sigma_z: Option<Vec<Vec<Qq>>>,
}

#[derive(Clone)]
pub struct TowerElem {
    pub ctx: Arc<TowerCtx>,
    pub c: Vec<Qq>,
}

impl PartialEq for TowerElem {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl fmt::Debug for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c)
    }
}

impl TowerCtx {
    pub fn new(base: Arc<UnramCtx>, psi: Vec<Qq>) -> Arc<Self> {
        let n = psi.len() - 1;
        assert!(psi[n].is_one(), "tower modulus must be monic");
        Arc::new(TowerCtx { base, n, psi, sigma_z: None })
    }

    /// Attach the Frobenius table; only valid for a Teichmüller modulus.
    pub fn with_frobenius(self: Arc<Self>) -> Arc<Self> {
        let hi = self.psi[0].ctx.clone();
        let plain = Arc::new(TowerCtx {
            base: hi,
            n: self.n,
            psi: self.psi.clone(),
            sigma_z: None,
        });
        let z2 = plain.gen().sqr();
        let mut rows = Vec::with_capacity(self.n);
        let mut p = plain.one();
        for _ in 0..self.n {
            rows.push(p.c.clone());
            p = p.times(&z2);
        }
        Arc::new(TowerCtx {
            base: self.base.clone(),
            n: self.n,
            psi: self.psi.clone(),
            sigma_z: Some(rows),
        })
    }

    pub fn with_base(self: &Arc<Self>, base: Arc<UnramCtx>) -> Arc<Self> {
        Arc::new(TowerCtx {
            base,
            n: self.n,
            psi: self.psi.clone(),
            sigma_z: self.sigma_z.clone(),
        })
    }

    pub fn zero(self: &Arc<Self>) -> TowerElem {
        TowerElem { ctx: self.clone(), c: vec![self.base.zero(); self.n] }
    }

    pub fn one(self: &Arc<Self>) -> TowerElem {
        self.embed(&self.base.one())
    }

    pub fn embed(self: &Arc<Self>, a: &Qq) -> TowerElem {
        let mut e = self.zero();
        e.c[0] = a.with_ctx(&self.base);
        e
    }

    /// The class of z.
    pub fn gen(self: &Arc<Self>) -> TowerElem {
        if self.n == 1 {
            return self.embed(&self.psi[0].negate());
        }
        let mut e = self.zero();
        e.c[1] = self.base.one();
        e
    }

    pub fn from_coeffs(self: &Arc<Self>, c: Vec<Qq>) -> TowerElem {
        assert!(c.len() <= self.n);
        let mut e = self.zero();
        for (i, x) in c.into_iter().enumerate() {
            e.c[i] = x.with_ctx(&self.base);
        }
        e
    }

    /// Reduce a polynomial in z (coefficients low first) modulo ψ.
    pub fn reduce(self: &Arc<Self>, mut c: Vec<Qq>) -> TowerElem {
        let n = self.n;
        for k in (n..c.len()).rev() {
            if c[k].is_zero() {
                continue;
            }
            let t = c[k].clone();
            for i in 0..n {
                c[k - n + i] = c[k - n + i].minus(&t.times(&self.psi[i]));
            }
        }
        c.truncate(n);
        c.resize(n, self.base.zero());
        let c = c.into_iter().map(|x| x.with_ctx(&self.base)).collect();
        TowerElem { ctx: self.clone(), c }
    }
}

impl TowerElem {
    pub fn valuation(&self) -> Option<i64> {
        self.c.iter().filter_map(|x| x.valuation()).min()
    }

    pub fn mul_pow2(&self, k: i64) -> TowerElem {
        TowerElem { ctx: self.ctx.clone(), c: self.c.iter().map(|x| x.mul_pow2(k)).collect() }
    }

    pub fn scale(&self, a: &Qq) -> TowerElem {
        TowerElem { ctx: self.ctx.clone(), c: self.c.iter().map(|x| x.times(a)).collect() }
    }

    pub fn sqr(&self) -> TowerElem {
        self.times(self)
    }

    /// σ: Frobenius on coefficients and z ↦ z².
    pub fn frobenius(&self) -> TowerElem {
        let rows = self.ctx.sigma_z.as_ref().expect("tower has no Frobenius");
        let mut out: Vec<Qq> = vec![self.ctx.base.zero(); self.ctx.n];
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let s = ci.frobenius();
            for (j, r) in rows[i].iter().enumerate() {
                out[j] = out[j].plus(&s.times(r));
            }
        }
        TowerElem { ctx: self.ctx.clone(), c: out }
    }

    pub fn frobenius_power(&self, k: usize) -> TowerElem {
        let total = self.ctx.n * self.ctx.base.degree();
        let mut x = self.clone();
        for _ in 0..k % total {
            x = x.frobenius();
        }
        x
    }

    /// Multiplication-by-self matrix, row j = self * z^j.
    fn mult_matrix(&self) -> Vec<Vec<Qq>> {
        let z = self.ctx.gen();
        let mut rows = Vec::with_capacity(self.ctx.n);
        let mut p = self.clone();
        for _ in 0..self.ctx.n {
            rows.push(p.c.clone());
            p = p.times(&z);
        }
        rows
    }
}

impl Scalar for TowerElem {
    fn zero_like(&self) -> Self {
        self.ctx.zero()
    }
    fn one_like(&self) -> Self {
        self.ctx.one()
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn plus(&self, o: &Self) -> Self {
        TowerElem { ctx: self.ctx.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a.plus(b)).collect() }
    }
    fn minus(&self, o: &Self) -> Self {
        TowerElem { ctx: self.ctx.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a.minus(b)).collect() }
    }
    fn times(&self, o: &Self) -> Self {
        let n = self.ctx.n;
        let mut c = vec![self.ctx.base.zero(); 2 * n - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] = c[i + j].plus(&a.times(b));
                }
            }
        }
        self.ctx.reduce(c)
    }
    fn negate(&self) -> Self {
        TowerElem { ctx: self.ctx.clone(), c: self.c.iter().map(|a| a.negate()).collect() }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        self.ctx.embed(&self.ctx.base.from_i64(n))
    }
    fn inv(&self) -> Option<Self> {
        let v = self.valuation()?;
        let u = self.mul_pow2(-v);
        // solve x * u = 1: rows of M are u z^j, so x^T M = e_0
        let m = u.mult_matrix();
        let mi = mat_inverse_by(&m, |x| x.valuation())?;
        let x = mi[0].clone();
        Some(TowerElem { ctx: self.ctx.clone(), c: x }.mul_pow2(-v))
    }
}
