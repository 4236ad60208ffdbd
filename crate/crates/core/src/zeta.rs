//! From F'(Γ) to the zeta function of one fiber: specialize at a Teichmüller
//! point, take the norm over the σ-twists, extract det(I − 𝓕T) and complete
//! it by the functional equation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::family::QPoly;
use crate::ff2::{poly_from_roots, Embedding, FfPoly, FqElem};
use crate::linalg::{mat_mul, Mat};
use crate::padic::{teichmuller_lift_tower, tower_modulus, trunc, TowerCtx, TowerElem, UnramCtx};
use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZetaError {
    #[error("parameter not admissible: r(z) is not a unit")]
    NotAdmissible,
    #[error("parameter generates a subfield of degree {0} instead of {1}")]
    NotGenerator(usize, usize),
    #[error("precision ledger violated in char poly: {loss} bits lost, budget {budget}")]
    Ledger { loss: i64, budget: i64 },
    #[error("precision or admissibility failure: {0}")]
    Check(String),
}

/// Conjugates of `x` over F_q (q = 2^a) inside its field.
pub fn conjugates(x: &FqElem, a: usize) -> Vec<FqElem> {
    let mut out = vec![x.clone()];
    loop {
        let y = out.last().unwrap().frob(a);
        if &y == x {
            return out;
        }
        out.push(y);
    }
}

/// Minimal polynomial over the subfield of `emb` of an element of the big field.
pub fn min_poly(emb: &Embedding, x: &FqElem) -> FfPoly {
    let roots = conjugates(x, emb.small.degree());
    let p = poly_from_roots(&roots, &emb.big.zero());
    p.map(emb.small.zero(), |c| emb.to_small(c).expect("minimal polynomial coefficient outside F_q"))
}

/// Tower Z_q[z]/ψ with ψ the Teichmüller lift of ψ̄, at the precision of `base`.
pub fn param_tower(psibar: &FfPoly, base: &Arc<UnramCtx>) -> Arc<TowerCtx> {
    tower_modulus(psibar, base).expect("minimal polynomial is irreducible")
}

/// Teichmüller lift in `tower` of the F_2-linear image of `x` under t ↦ z.
/// Only meaningful when ψ̄ is the minimal polynomial of t.
pub fn lift_big_element(tower: &Arc<TowerCtx>, x: &FqElem) -> TowerElem {
    let base = &tower.base;
    let d = x.v.degree().map_or(0, |d| d + 1);
    let c: Vec<_> = (0..d).map(|i| base.from_i64(x.v.bit(i) as i64)).collect();
    let e = if c.is_empty() { tower.zero() } else { tower.reduce(c) };
    teichmuller_lift_tower(&e)
}

fn is_gen(w: &TowerElem) -> bool {
    w == &w.ctx.gen()
}

/// Evaluate a Γ-polynomial over Z_q at a tower point.
pub fn eval_at(p: &QPoly, w: &TowerElem) -> TowerElem {
    let t = &w.ctx;
    if is_gen(w) && t.n > 1 {
        return t.reduce(p.coeffs().iter().map(|c| c.with_ctx(&t.base)).collect());
    }
    let mut acc = t.zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.times(w).plus(&t.embed(c));
    }
    acc
}

/// F(w) = F'(w) / r(w)^M.
pub fn specialize(fprime: &Mat<QPoly>, r: &QPoly, m_exp: usize, w: &TowerElem) -> Result<Mat<TowerElem>, ZetaError> {
    let fz: Mat<TowerElem> = fprime.iter().map(|row| row.iter().map(|p| eval_at(p, w)).collect()).collect();
    divide_by_r(fz, eval_at(r, w), m_exp)
}

fn divide_by_r(fz: Mat<TowerElem>, rw: TowerElem, m_exp: usize) -> Result<Mat<TowerElem>, ZetaError> {
    if rw.valuation() != Some(0) {
        return Err(ZetaError::NotAdmissible);
    }
    let k = rw.pow_u(m_exp as u64).inv().ok_or(ZetaError::NotAdmissible)?;
    Ok(fz.iter().map(|row| row.iter().map(|x| x.times(&k)).collect()).collect())
}

fn mat_frob(m: &Mat<TowerElem>, k: usize) -> Mat<TowerElem> {
    m.iter().map(|row| row.iter().map(|x| x.frobenius_power(k)).collect()).collect()
}

/// 𝓕 = F^{σ^{L-1}}···F^σ·F by doubling along the binary expansion of L.
pub fn norm_frobenius(fz: &Mat<TowerElem>, len: usize) -> Mat<TowerElem> {
    assert!(len >= 1);
    let bits = usize::BITS - len.leading_zeros();
    let mut acc = fz.clone();
    let mut k = 1usize;
    for b in (0..bits - 1).rev() {
        acc = mat_mul(&mat_frob(&acc, k), &acc);
        k *= 2;
        if (len >> b) & 1 == 1 {
            acc = mat_mul(&mat_frob(&acc, 1), fz);
            k += 1;
        }
    }
    debug_assert_eq!(k, len);
    acc
}

/// The same product, one factor at a time.
pub fn norm_frobenius_naive(fz: &Mat<TowerElem>, len: usize) -> Mat<TowerElem> {
    let mut acc = fz.clone();
    let mut tw = fz.clone();
    for _ in 1..len {
        tw = mat_frob(&tw, 1);
        acc = mat_mul(&tw, &acc);
    }
    acc
}

fn min_val<S>(m: &Mat<S>, key: impl Fn(&S) -> Option<i64>) -> Option<i64> {
    m.iter().flatten().filter_map(key).min()
}

/// Coefficients of det(I − A·T) with the bits lost to pivoting.
#[derive(Clone, Debug)]
pub struct CharPoly {
    pub c: Vec<TowerElem>,
    pub scale: i64,
    pub pivot_loss: i64,
}

/// Hessenberg reduction with minimal-valuation pivots, then the three-term
/// recurrence; `A` is first scaled by 2^e to be integral.
pub fn hessenberg_charpoly(a: &Mat<TowerElem>) -> CharPoly {
    let n = a.len();
    let z = a[0][0].zero_like();
    let e = (-min_val(a, |x| x.valuation()).unwrap_or(0)).max(0);
    let mut h: Mat<TowerElem> = a.iter().map(|r| r.iter().map(|x| x.mul_pow2(e)).collect()).collect();
    let mut loss = 0;
    for j in 0..n.saturating_sub(2) {
        let piv = (j + 1..n).filter(|&i| !h[i][j].is_zero()).min_by_key(|&i| h[i][j].valuation().unwrap());
        let Some(p) = piv else { continue };
        if p != j + 1 {
            h.swap(p, j + 1);
            for row in h.iter_mut() {
                row.swap(p, j + 1);
            }
        }
        let v = h[j + 1][j].valuation().unwrap();
        loss += v;
        let pinv = h[j + 1][j].inv().unwrap();
        for k in j + 2..n {
            if h[k][j].is_zero() {
                continue;
            }
            let f = h[k][j].times(&pinv);
            for c in 0..n {
                let t = f.times(&h[j + 1][c]);
                h[k][c] = h[k][c].minus(&t);
            }
            for row in h.iter_mut() {
                let t = f.times(&row[k]);
                row[j + 1] = row[j + 1].plus(&t);
            }
        }
    }
    // p_k(λ) = (λ − h_kk) p_{k-1} − Σ_{i<k} h_ik (∏_{m=i+1}^{k} h_{m,m-1}) p_{i-1}
    let mut p: Vec<Poly<TowerElem>> = vec![Poly::constant(z.one_like())];
    for k in 0..n {
        let lin = Poly::new(vec![h[k][k].negate(), z.one_like()], z.clone());
        let mut pk = lin.times(&p[k]);
        let mut prod = z.one_like();
        for i in (0..k).rev() {
            prod = prod.times(&h[i + 1][i]);
            let t = h[i][k].times(&prod);
            if !t.is_zero() {
                pk = pk.minus(&p[i].scale(&t));
            }
        }
        p.push(pk);
    }
    let top = &p[n];
    let c = (0..=n).map(|i| top.coeff(n - i).mul_pow2(-e * i as i64)).collect();
    CharPoly { c, scale: e, pivot_loss: loss }
}

/// Cofactor-free oracle: det(I − A·T) from the Berkowitz recurrence.
pub fn charpoly_oracle(a: &Mat<TowerElem>) -> Vec<TowerElem> {
    let p = crate::linalg::charpoly_berkowitz(a);
    let n = a.len();
    (0..=n).map(|i| p[n - i].clone()).collect()
}

/// The integer a tower element represents mod 2^bits, if it is one.
pub fn tower_to_integer(x: &TowerElem, bits: u64) -> Option<BigInt> {
    let modulus = BigInt::one() << bits;
    for (i, q) in x.c.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let v = q.valuation().unwrap();
        if v >= bits as i64 {
            continue;
        }
        if v < 0 {
            return None;
        }
        let cs = q.scaled_coeffs(0);
        for (j, cj) in cs.iter().enumerate() {
            if (i, j) != (0, 0) && !trunc(cj, bits).is_zero() {
                return None;
            }
        }
    }
    let x0 = &x.c[0];
    if x0.is_zero() || x0.valuation().unwrap() >= bits as i64 {
        return Some(BigInt::zero());
    }
    let v = trunc(&x0.scaled_coeffs(0)[0], bits);
    Some(if v > (&modulus >> 1usize) { v - modulus } else { v })
}

/// P(T) = Σ b_i T^i over F_qn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaNumerator {
    pub b: Vec<BigInt>,
    pub qn: BigInt,
}

fn binom(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

impl ZetaNumerator {
    pub fn genus(&self) -> usize {
        (self.b.len() - 1) / 2
    }

    /// s_m = Σ α_i^m for m = 1..=mmax by Newton's identities on P.
    pub fn power_sums(&self, mmax: usize) -> Vec<BigInt> {
        let d = self.b.len() - 1;
        // e_i = (−1)^i b_i
        let e: Vec<BigInt> = self.b.iter().enumerate().map(|(i, b)| if i % 2 == 0 { b.clone() } else { -b }).collect();
        let mut s: Vec<BigInt> = vec![BigInt::zero(); mmax + 1];
        for m in 1..=mmax {
            let mut acc = BigInt::zero();
            for i in 1..m.min(d + 1) {
                let t = &e[i] * &s[m - i];
                if i % 2 == 1 { acc += t } else { acc -= t }
            }
            if m <= d {
                let t = &e[m] * BigInt::from(m);
                if m % 2 == 1 { acc += t } else { acc -= t }
            }
            s[m] = acc;
        }
        s.remove(0);
        s
    }

    /// #C(F_{qn^m}) for m = 1..=2g.
    pub fn counts(&self) -> Vec<BigInt> {
        let g = self.genus();
        let s = self.power_sums(2 * g);
        (1..=2 * g).map(|m| self.qn.pow(m as u32) + 1 - &s[m - 1]).collect()
    }

    /// Functional equation, Weil bounds and count sanity.
    pub fn validate(&self) -> Result<(), ZetaError> {
        let g = self.genus();
        let fail = |m: String| Err(ZetaError::Check(m));
        if !self.b[0].is_one() {
            return fail("b0 != 1".into());
        }
        for i in 0..=g {
            if self.b[2 * g - i] != self.qn.pow((g - i) as u32) * &self.b[i] {
                return fail(format!("functional equation fails at {i}"));
            }
        }
        for (i, bi) in self.b.iter().enumerate() {
            let c = binom(2 * g, i);
            if bi * bi > &c * &c * self.qn.pow(i as u32) {
                return fail(format!("Weil bound fails at b{i}"));
            }
        }
        let s = self.power_sums(2 * g);
        let gg = BigInt::from(4 * g * g);
        for (m, sm) in s.iter().enumerate() {
            let q = self.qn.pow(m as u32 + 1);
            if sm * sm > &gg * &q {
                return fail(format!("power sum s{} out of range", m + 1));
            }
            let n = &q + 1 - sm;
            if n < BigInt::one() || n > q * 2 + 1 {
                return fail(format!("count N{} = {n} out of range", m + 1));
            }
        }
        Ok(())
    }

    /// The numerator over F_{qn^k}: reciprocal roots raised to the k-th power.
    pub fn base_extend(&self, k: usize) -> ZetaNumerator {
        let g = self.genus();
        let s = self.power_sums(2 * g * k);
        let sk: Vec<BigInt> = (1..=2 * g).map(|m| s[m * k - 1].clone()).collect();
        from_power_sums(&sk, g, &self.qn.pow(k as u32)).expect("power sums of a base extension")
    }

    pub fn record(&self) -> String {
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        format!(
            "P: {}\nzeta: P(T)/((1-T)(1-{}*T))\ncounts: {}\n",
            join(&self.b),
            self.qn,
            join(&self.counts())
        )
    }
}

/// Rebuild P from s_1..s_g (further sums are ignored) using the functional equation.
pub fn from_power_sums(s: &[BigInt], g: usize, qn: &BigInt) -> Result<ZetaNumerator, ZetaError> {
    let mut e = vec![BigInt::one()];
    for m in 1..=g {
        let mut acc = BigInt::zero();
        for i in 1..=m {
            let t = &e[m - i] * &s[i - 1];
            if i % 2 == 1 { acc += t } else { acc -= t }
        }
        let (q, r) = acc.div_rem(&BigInt::from(m));
        if !r.is_zero() {
            return Err(ZetaError::Check("inconsistent counts".into()));
        }
        e.push(q);
    }
    let low: Vec<BigInt> = e.iter().enumerate().map(|(i, x)| if i % 2 == 0 { x.clone() } else { -x }).collect();
    complete_by_functional_equation(&low, g, qn)
}

/// b_0..b_g given; b_{2g-i} = qn^{g-i} b_i.
pub fn complete_by_functional_equation(low: &[BigInt], g: usize, qn: &BigInt) -> Result<ZetaNumerator, ZetaError> {
    let mut b = low[..=g].to_vec();
    for i in (0..g).rev() {
        b.push(qn.pow((g - i) as u32) * &low[i]);
    }
    let p = ZetaNumerator { b, qn: qn.clone() };
    p.validate()?;
    Ok(p)
}

/// Integer coefficients c_0..c_g of det(I − 𝓕T), checked against the ledger.
pub fn numerator_from_norm(
    big_f: &Mat<TowerElem>,
    g: usize,
    qn: &BigInt,
    nf: i64,
    budget: i64,
) -> Result<ZetaNumerator, ZetaError> {
    let cp = hessenberg_charpoly(big_f);
    let loss = cp.pivot_loss + cp.scale * 2 * g as i64;
    if loss > budget {
        return Err(ZetaError::Ledger { loss, budget });
    }
    // one bit beyond N_f: the Weil bound itself can equal 2^(N_f - 1)
    let bits = nf as u64 + 1;
    let low = cp.c[..=g]
        .iter()
        .enumerate()
        .map(|(i, c)| tower_to_integer(c, bits).ok_or_else(|| ZetaError::Check(format!("c{i} is not an integer"))))
        .collect::<Result<Vec<_>, _>>()?;
    complete_by_functional_equation(&low, g, qn)
}

/// Subproduct tree of the linear factors (Γ − w_i) over the tower.
pub struct SubproductTree {
    levels: Vec<Vec<Poly<TowerElem>>>,
}

impl SubproductTree {
    pub fn new(points: &[TowerElem]) -> Self {
        let z = points[0].zero_like();
        let leaves: Vec<_> = points.iter().map(|w| Poly::new(vec![w.negate(), z.one_like()], z.clone())).collect();
        let mut levels = vec![leaves];
        while levels.last().unwrap().len() > 1 {
            let prev = levels.last().unwrap();
            let next = prev.chunks(2).map(|c| if c.len() == 2 { c[0].times(&c[1]) } else { c[0].clone() }).collect();
            levels.push(next);
        }
        SubproductTree { levels }
    }

    /// p(w_i) for every leaf.
    pub fn evaluate(&self, p: &Poly<TowerElem>) -> Vec<TowerElem> {
        let top = self.levels.len() - 1;
        let mut cur = vec![p.rem(&self.levels[top][0])];
        for lev in (0..top).rev() {
            let nodes = &self.levels[lev];
            let mut next = Vec::with_capacity(nodes.len());
            for (i, node) in nodes.iter().enumerate() {
                next.push(cur[i / 2].rem(node));
            }
            cur = next;
        }
        cur.into_iter().map(|r| r.coeff(0)).collect()
    }
}

/// Specialize F' at many points of one tower via the subproduct tree.
pub fn batch_specialize(
    fprime: &Mat<QPoly>,
    r: &QPoly,
    m_exp: usize,
    points: &[TowerElem],
) -> Vec<Result<Mat<TowerElem>, ZetaError>> {
    if points.is_empty() {
        return Vec::new();
    }
    let tower = points[0].ctx.clone();
    let tree = SubproductTree::new(points);
    let up = |p: &QPoly| p.map(tower.zero(), |c| tower.embed(c));
    let rs = tree.evaluate(&up(r));
    let dim = fprime.len();
    let mut vals: Vec<Vec<Vec<TowerElem>>> = vec![vec![Vec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            vals[i][j] = tree.evaluate(&up(&fprime[i][j]));
        }
    }
    (0..points.len())
        .map(|k| {
            let fz = (0..dim).map(|i| (0..dim).map(|j| vals[i][j][k].clone()).collect()).collect();
            divide_by_r(fz, rs[k].clone(), m_exp)
        })
        .collect()
}

/// True when the absolute value of `x` is within the signed range of `bits` bits.
pub fn fits_signed(x: &BigInt, bits: u64) -> bool {
    x.abs() < (BigInt::one() << (bits.saturating_sub(1)))
}
