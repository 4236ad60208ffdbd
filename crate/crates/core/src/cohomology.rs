//! Reduction of odd differentials V·Y dX to the basis {X^i Y dX, i < 2g}
//! and the connection matrices B, D.

use crate::family::{LiftedFamily, QPoly};
use crate::linalg::{bezout_resultant, det, Mat};
use crate::padic::Qq;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// A form V·Y dX + Σ_j V_j/H^j · Y dX; `denom[j-1]` holds V_j with deg V_j < s.
#[derive(Clone, Debug)]
pub struct OddDifferential<S> {
    pub poly: Poly<S>,
    pub denom: Vec<Poly<S>>,
}

impl<S: Scalar> OddDifferential<S> {
    pub fn from_poly(p: Poly<S>) -> Self {
        OddDifferential { poly: p, denom: Vec::new() }
    }

    /// The form N/H^level · Y dX, split H-adically.
    pub fn from_fraction(n: Poly<S>, level: usize, hbig: &Poly<S>) -> Self {
        let mut d = OddDifferential::from_poly(Poly::zero(hbig.ring_zero().clone()));
        add_at_level(&mut d, hbig, n, level);
        d
    }
}

/// Coefficient of X^k in α_j = X^j·u + (j/3)·X^(j-1)·v.
fn alpha_coeff<S: Scalar>(u: &Poly<S>, v: &Poly<S>, j: usize, j3: &S, k: usize) -> S {
    let mut c = if k >= j { u.coeff(k - j) } else { u.ring_zero().clone() };
    if j > 0 && k + 1 >= j {
        c = c.plus(&j3.times(&v.coeff(k + 1 - j)));
    }
    c
}

/// Coordinates of P·Y dX on {X^i Y dX}: subtract multiples of α_j from the top.
/// Expects u = 2f' + hh', v = 4f + h² with f monic of degree 2g+1.
pub fn reduce_polynomial_y<S: Scalar>(p: &Poly<S>, u: &Poly<S>, v: &Poly<S>, g: usize) -> Vec<S> {
    let z = p.ring_zero().clone();
    let mut c: Vec<S> = p.coeffs().to_vec();
    let top = 2 * g;
    while c.len() > top {
        let d = c.len() - 1;
        let lead = c.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let j = d - top;
        // lead coefficient of α_j is (6(2g+1) + 4j)/3
        let k = lead.times(&z.from_ratio_like(3, (6 * (2 * g + 1) + 4 * j) as i64));
        let j3 = z.from_ratio_like(j as i64, 3);
        let lo = j.saturating_sub(1);
        for (i, slot) in c.iter_mut().enumerate().skip(lo) {
            let a = alpha_coeff(u, v, j, &j3, i);
            if !a.is_zero() {
                *slot = slot.minus(&k.times(&a));
            }
        }
    }
    c.resize(top, z);
    c
}

/// Per-fiber data for removing H-denominators.
#[derive(Clone, Debug)]
pub struct DenomData<S> {
    pub g: usize,
    pub hbig: Poly<S>,
    pub hprime: Poly<S>,
    pub qf_hprime: Poly<S>,
    /// H'·Q_H².
    pub t1: Poly<S>,
    /// −6Q_f' − 3Q_H·h'.
    pub t2: Poly<S>,
    /// 4Q_f + H·Q_H².
    pub e: Poly<S>,
    /// b with a·H + b·Q_f·H' = r.
    pub bez_b: Poly<S>,
    pub r: S,
    pub r_inv: S,
}

impl<S: Scalar> DenomData<S> {
    /// Returns None when r is not invertible.
    pub fn new(g: usize, hbig: &Poly<S>, qf: &Poly<S>, qhbig: &Poly<S>, h: &Poly<S>) -> Option<Self> {
        let z = hbig.ring_zero().clone();
        let hprime = hbig.derivative();
        let qf_hprime = qf.times(&hprime);
        let (r, _a, b) = bezout_resultant(hbig, &qf_hprime);
        let r_inv = r.inv()?;
        let qh2 = qhbig.times(qhbig);
        let t1 = hprime.times(&qh2);
        let t2 = qf
            .derivative()
            .scale(&z.from_i64_like(-6))
            .minus(&qhbig.times(&h.derivative()).scale(&z.from_i64_like(3)));
        let e = qf.scale(&z.from_i64_like(4)).plus(&hbig.times(&qh2));
        let bez_b = b.rem(hbig);
        Some(DenomData { g, hbig: hbig.clone(), hprime, qf_hprime, t1, t2, e, bez_b, r, r_inv })
    }
}

/// Push N/H^level into the form: H-adic digits land on levels level, level-1, ...
fn add_at_level<S: Scalar>(d: &mut OddDifferential<S>, hbig: &Poly<S>, mut n: Poly<S>, mut level: usize) {
    while level >= 1 && !n.is_zero() {
        let (q, r) = n.divrem(hbig);
        if d.denom.len() < level {
            d.denom.resize(level, Poly::zero(hbig.ring_zero().clone()));
        }
        d.denom[level - 1] = d.denom[level - 1].plus(&r);
        n = q;
        level -= 1;
    }
    if !n.is_zero() {
        d.poly = d.poly.plus(&n);
    }
}

/// Remove all H-denominators, discarding ι-invariant remainders; returns the
/// polynomial Y-part.
pub fn reduce_h_denominators<S: Scalar>(mut d: OddDifferential<S>, dd: &DenomData<S>) -> Poly<S> {
    let z = dd.hbig.ring_zero().clone();
    while let Some(vj) = d.denom.pop() {
        let j = d.denom.len() + 1;
        if vj.is_zero() {
            continue;
        }
        // V r = A H + B Q_f H'
        let bb = vj.times(&dd.bez_b).rem(&dd.hbig);
        let num = vj.scale(&dd.r).minus(&bb.times(&dd.qf_hprime));
        let aa = num.exact_div(&dd.hbig);
        let inner = bb
            .times(&dd.t1.scale(&z.from_i64_like(j as i64)).plus(&dd.t2))
            .minus(&bb.derivative().times(&dd.e));
        let k = z.from_ratio_like(1, 6 - 4 * j as i64);
        let bracket = aa.plus(&inner.scale(&k)).scale(&dd.r_inv);
        add_at_level(&mut d, &dd.hbig, bracket, j - 1);
    }
    d.poly
}

/// Reduce a general odd differential to basis coordinates.
pub fn reduce_differential<S: Scalar>(
    d: OddDifferential<S>,
    dd: Option<&DenomData<S>>,
    u: &Poly<S>,
    v: &Poly<S>,
    g: usize,
) -> Vec<S> {
    let p = match dd {
        Some(dd) => reduce_h_denominators(d, dd),
        None => {
            assert!(d.denom.iter().all(|x| x.is_zero()), "denominators without H");
            d.poly
        }
    };
    reduce_polynomial_y(&p, u, v, g)
}

/// Connection matrices over Z_q[Γ], rows indexed by the source basis.
#[derive(Clone, Debug)]
pub struct ConnectionMatrices {
    pub b: Mat<QPoly>,
    pub d: Mat<QPoly>,
}

fn d_gamma(p: &Poly<QPoly>) -> Poly<QPoly> {
    p.map(p.ring_zero().clone(), |c| c.derivative())
}

pub fn compute_connection_matrices(lf: &LiftedFamily) -> ConnectionMatrices {
    let g = lf.g;
    let zq = Poly::zero(lf.ctx.zero());
    let x = Poly::x(zq.clone());
    let two = Poly::constant(lf.ctx.from_i64(2));
    let vdot = d_gamma(&lf.v);
    let w = d_gamma(&lf.f).scale(&two).plus(&lf.h.times(&d_gamma(&lf.h)));
    let src_d = vdot.plus(&w);
    let mut b = Vec::with_capacity(2 * g);
    let mut d = Vec::with_capacity(2 * g);
    let mut xi = Poly::constant(Poly::constant(lf.ctx.one()));
    for _ in 0..2 * g {
        b.push(reduce_polynomial_y(&lf.v.times(&xi), &lf.u, &lf.v, g));
        d.push(reduce_polynomial_y(&src_d.times(&xi), &lf.u, &lf.v, g));
        xi = xi.times(&x);
    }
    ConnectionMatrices { b, d }
}

/// Evaluate a matrix of Γ-polynomials at a point.
pub fn eval_matrix(m: &Mat<QPoly>, gamma: &Qq) -> Mat<Qq> {
    m.iter().map(|row| row.iter().map(|p| p.eval(gamma)).collect()).collect()
}

/// ∏_{m=0}^{2g} (6(2g+1)+4m)/3, the scalar in det B · ∏ = ±Res_X(u, v).
pub fn resultant_scale<S: Scalar>(z: &S, g: usize) -> S {
    (0..=2 * g).fold(z.one_like(), |acc, m| acc.times(&z.from_ratio_like((6 * (2 * g + 1) + 4 * m) as i64, 3)))
}

/// det B(Γ) as a Γ-polynomial.
pub fn det_b(cm: &ConnectionMatrices) -> QPoly {
    det(&cm.b)
}

/// Largest Γ-degree of a matrix of Γ-polynomials.
pub fn gamma_degree(m: &Mat<QPoly>) -> Option<usize> {
    m.iter().flatten().filter_map(|p| p.degree()).max()
}

/// Smallest 2-adic valuation in a matrix of Γ-polynomials.
pub fn min_valuation(m: &Mat<QPoly>) -> Option<i64> {
    m.iter().flatten().flat_map(|p| p.coeffs().iter().filter_map(|c| c.valuation())).min()
}
