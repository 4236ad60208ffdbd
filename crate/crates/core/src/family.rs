//! Family shape, lifting to Z_q[Γ][X], the deformation resultant r(Γ),
//! admissibility and the precision profile.

use std::sync::Arc;

use crate::ff2::{
    bivariate_at, bivariate_div, bivariate_gcd, radical_and_multiplicity, BiPoly, BinField,
    Embedding, FfPoly, FqElem,
};
use crate::linalg::resultant;
use crate::padic::{Qq, UnramCtx};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Polynomial over Z_q (or Q_q) in Γ.
pub type QPoly = Poly<Qq>;
/// Polynomial in X with coefficients in Z_q[Γ].
pub type QBiPoly = Poly<Poly<Qq>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("genus must be at least 1")]
    GenusZero,
    #[error("{0} is not monic in X")]
    NotMonic(&'static str),
    #[error("f = H*Qf has X-degree {got}, expected 2g+1 = {expected}")]
    DegreeF { expected: usize, got: usize },
    #[error("h is zero")]
    HZero,
    #[error("h has X-degree {got} > g = {g}")]
    HDegree { got: usize, g: usize },
    #[error("leading X-coefficient of h must be a nonzero constant")]
    HLeadNotConstant,
    #[error("constant h requires H = 1")]
    ConstantHNeedsTrivialH,
    #[error("H does not divide h")]
    HNotDividingH,
    #[error("H is not the radical of h")]
    NotRadical,
    #[error("r(0) is even: H and Qf*H' are not coprime at the fiber G=0")]
    SingularAtZero,
}

/// Validated family data over F_q.
#[derive(Clone, Debug)]
pub struct FamilyInput {
    pub fq: Arc<BinField>,
    pub a: usize,
    pub g: usize,
    pub hbig: BiPoly,
    pub qf: BiPoly,
    pub h: BiPoly,
    pub f: BiPoly,
    /// Squarefree parts S_k of h/c with multiplicity k, h = c * prod S_k^k.
    pub sqf: Vec<(BiPoly, usize)>,
    /// Leading coefficient c of h.
    pub hlead: FqElem,
    pub dtilde: usize,
    pub constant_h: bool,
    pub kappa: usize,
    pub s: usize,
    pub eta: usize,
    /// r mod 2 (up to sign).
    pub rbar: FfPoly,
    pub rho: usize,
}

pub fn deg_gamma_bi<S: Scalar>(p: &Poly<Poly<S>>) -> usize {
    p.coeffs().iter().filter_map(|c| c.degree()).max().unwrap_or(0)
}

fn deg_x(p: &BiPoly) -> usize {
    p.degree().unwrap_or(0)
}

fn bi_const(fq: &Arc<BinField>, c: FqElem) -> BiPoly {
    let z = Poly::zero(fq.zero());
    Poly::new(vec![Poly::constant(c)], z)
}

/// Formal X-derivative.
fn dx<S: Scalar>(p: &Poly<Poly<S>>) -> Poly<Poly<S>> {
    p.derivative()
}

pub fn validate_family(
    fq: &Arc<BinField>,
    g: usize,
    hbig: &BiPoly,
    qf: &BiPoly,
    h: &BiPoly,
) -> Result<FamilyInput, FamilyError> {
    if g == 0 {
        return Err(FamilyError::GenusZero);
    }
    let one = fq.one();
    let is_one = |p: &BiPoly| p.lead().is_some_and(|l| l.degree() == Some(0) && l.coeff(0) == one);
    if !is_one(hbig) {
        return Err(FamilyError::NotMonic("H"));
    }
    if !is_one(qf) {
        return Err(FamilyError::NotMonic("Qf"));
    }
    let f = hbig.times(qf);
    if deg_x(&f) != 2 * g + 1 {
        return Err(FamilyError::DegreeF { expected: 2 * g + 1, got: deg_x(&f) });
    }
    if h.is_zero() {
        return Err(FamilyError::HZero);
    }
    if deg_x(h) > g {
        return Err(FamilyError::HDegree { got: deg_x(h), g });
    }
    let lead = h.lead().unwrap();
    if lead.degree() != Some(0) {
        return Err(FamilyError::HLeadNotConstant);
    }
    let hlead = lead.coeff(0);
    let kappa = deg_gamma_bi(&f).max(2 * deg_gamma_bi(h));
    let constant_h = deg_x(h) == 0;
    let mut sqf = Vec::new();
    let dtilde;
    if constant_h {
        if hbig.degree() != Some(0) {
            return Err(FamilyError::ConstantHNeedsTrivialH);
        }
        dtilde = 1;
    } else {
        let monic = h.scale(&Poly::constant(hlead.inv().unwrap()));
        let mut t = bivariate_div(&monic, hbig).ok_or(FamilyError::HNotDividingH)?;
        let mut pk = hbig.clone();
        let mut levels = vec![pk.clone()];
        while t.degree() != Some(0) {
            let next = bivariate_gcd(&t, &pk);
            if next.degree() == Some(0) {
                return Err(FamilyError::NotRadical);
            }
            t = bivariate_div(&t, &next).unwrap();
            pk = next.clone();
            levels.push(next);
        }
        dtilde = levels.len();
        for k in 0..levels.len() {
            let s = if k + 1 < levels.len() {
                bivariate_div(&levels[k], &levels[k + 1]).unwrap()
            } else {
                levels[k].clone()
            };
            if s.degree() != Some(0) {
                sqf.push((s, k + 1));
            }
        }
        // radical and multiplicity at the fiber G = 0
        let h0 = bivariate_at(h, &fq.zero());
        let (rad0, m0) = radical_and_multiplicity(&h0).map_err(|_| FamilyError::HZero)?;
        if rad0 != bivariate_at(hbig, &fq.zero()) || m0 != dtilde {
            return Err(FamilyError::NotRadical);
        }
    }
    let rbar = if constant_h {
        Poly::constant(fq.one())
    } else {
        resultant(hbig, &qf.times(&dx(hbig)))
    };
    if rbar.coeff(0).is_zero() {
        return Err(FamilyError::SingularAtZero);
    }
    let rho = rbar.degree().unwrap_or(0);
    Ok(FamilyInput {
        fq: fq.clone(),
        a: fq.degree(),
        g,
        hbig: hbig.clone(),
        qf: qf.clone(),
        h: h.clone(),
        f,
        sqf,
        hlead,
        dtilde,
        constant_h,
        kappa,
        s: deg_x(hbig),
        eta: deg_gamma_bi(hbig),
        rbar,
        rho,
    })
}

/// r̄(γ̄) ≠ 0 for γ̄ in the big field.
pub fn admissible(gamma: &FqElem, fi: &FamilyInput, emb: &Embedding) -> bool {
    if fi.constant_h {
        return true;
    }
    !emb.poly_to_big(&fi.rbar).eval(gamma).is_zero()
}

/// The family lifted to Z_q[Γ][X] at the precision of `ctx`.
#[derive(Clone, Debug)]
pub struct LiftedFamily {
    pub ctx: Arc<UnramCtx>,
    pub g: usize,
    pub dtilde: usize,
    pub hbig: QBiPoly,
    pub qf: QBiPoly,
    pub h: QBiPoly,
    pub qh: QBiPoly,
    pub qhbig: QBiPoly,
    pub f: QBiPoly,
    pub v: QBiPoly,
    pub u: QBiPoly,
    pub r: QPoly,
}

pub fn lift_bi(p: &BiPoly, ctx: &Arc<UnramCtx>) -> QBiPoly {
    let z = Poly::zero(ctx.zero());
    p.map(z, |c| c.map(ctx.zero(), |x| ctx.lift_gf2(&x.v)))
}

fn qbi_const(ctx: &Arc<UnramCtx>, c: Qq) -> QBiPoly {
    Poly::new(vec![Poly::constant(c)], Poly::zero(ctx.zero()))
}

pub fn lift_family(fi: &FamilyInput, ctx: &Arc<UnramCtx>) -> LiftedFamily {
    let qf = lift_bi(&fi.qf, ctx);
    let c = ctx.lift_gf2(&fi.hlead.v);
    let one = qbi_const(ctx, ctx.one());
    let (hbig, h, qhbig, qh) = if fi.constant_h {
        let cinv = c.inv().unwrap();
        (one.clone(), qbi_const(ctx, c.clone()), qbi_const(ctx, c), qbi_const(ctx, cinv))
    } else {
        let parts: Vec<(QBiPoly, usize)> = fi.sqf.iter().map(|(s, k)| (lift_bi(s, ctx), *k)).collect();
        let mut hbig = one.clone();
        let mut h = qbi_const(ctx, c.clone());
        let mut qhbig = qbi_const(ctx, c.clone());
        let mut qh = qbi_const(ctx, c.inv().unwrap());
        for (s, k) in &parts {
            hbig = hbig.times(s);
            h = h.times(&s.pow(*k));
            qhbig = qhbig.times(&s.pow(k - 1));
            qh = qh.times(&s.pow(fi.dtilde - k));
        }
        (hbig, h, qhbig, qh)
    };
    let f = hbig.times(&qf);
    let four = Poly::constant(ctx.from_i64(4));
    let v = f.scale(&four).plus(&h.times(&h));
    let two = Poly::constant(ctx.from_i64(2));
    let u = dx(&f).scale(&two).plus(&h.times(&dx(&h)));
    let r = if fi.constant_h {
        Poly::constant(ctx.one())
    } else {
        resultant(&hbig, &qf.times(&dx(&hbig)))
    };
    LiftedFamily { ctx: ctx.clone(), g: fi.g, dtilde: fi.dtilde, hbig, qf, h, qh, qhbig, f, v, u, r }
}

impl LiftedFamily {
    /// Re-express every polynomial at another precision of the same Z_q.
    pub fn with_ctx(&self, ctx: &Arc<UnramCtx>) -> LiftedFamily {
        let m = |p: &QBiPoly| p.map(Poly::zero(ctx.zero()), |c| c.map(ctx.zero(), |x| x.with_ctx(ctx)));
        LiftedFamily {
            ctx: ctx.clone(),
            g: self.g,
            dtilde: self.dtilde,
            hbig: m(&self.hbig),
            qf: m(&self.qf),
            h: m(&self.h),
            qh: m(&self.qh),
            qhbig: m(&self.qhbig),
            f: m(&self.f),
            v: m(&self.v),
            u: m(&self.u),
            r: self.r.map(ctx.zero(), |x| x.with_ctx(ctx)),
        }
    }
}

/// Every working-precision constant of the algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionProfile {
    pub g: usize,
    pub a: usize,
    pub n: usize,
    pub nf: i64,
    pub n_out: i64,
    pub n2: i64,
    pub n_gamma: usize,
    pub phi: i64,
    pub phi0: i64,
    /// Exponent χ₁ of r in F' = r^χ₁ F.
    pub m_exp: usize,
    pub chi2: usize,
    pub alpha: i64,
    pub beta: i64,
    pub beta_prime: i64,
    pub red_as: i64,
    pub red_bs: i64,
    pub a_tilde: i64,
    pub b_tilde: i64,
    pub omega: i64,
    pub delta: i64,
    pub cap_a: i64,
    pub cap_b: i64,
    pub m_it: i64,
    pub mt_it: i64,
    /// Accuracy of the Newton lift W (the M, M̃ bounds recomputed with N₂).
    pub target_prec: i64,
}

fn log2f(x: f64) -> f64 {
    x.log2()
}

/// φ = ⌈−min(expr1, expr2)⌉ with the minima scanned over k = 0..64.
pub fn phi_bound(g: usize, dtilde: usize) -> i64 {
    let g = g as f64;
    let d = dtilde as f64;
    let e1 = (0..=64)
        .map(|k| k as f64 - 3.0 - log2f((4.0 * g + 2.0) * k as f64 + 2.0 * g + 1.0))
        .fold(f64::INFINITY, f64::min);
    let e2 = (0..=64)
        .filter(|&k| 4.0 * d * k as f64 - 6.0 * d + 1.0 > 0.0)
        .map(|k| k as f64 - 3.0 - log2f(4.0 * d * k as f64 - 6.0 * d + 1.0))
        .fold(f64::INFINITY, f64::min);
    (-(e1.min(e2))).ceil() as i64
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smallest M with M − (3 + log₂(as·M + bs + g + 1)) ≥ n.
fn min_m(red_as: i64, red_bs: i64, g: i64, n: i64) -> i64 {
    let mut m = 1i64;
    loop {
        let arg = red_as * m + red_bs + g + 1;
        if arg > 0 && (m as f64) - (3.0 + log2f(arg as f64)) >= n as f64 {
            return m;
        }
        m += 1;
    }
}

/// Smallest M̃ with M̃ − (3 + log₂(M̃ + 1)) ≥ n.
fn min_mt(n: i64) -> i64 {
    let mut m = 1i64;
    while (m as f64) - (3.0 + log2f((m + 1) as f64)) < n as f64 {
        m += 1;
    }
    m
}

/// Shape data the profile depends on.
#[derive(Clone, Debug)]
pub struct ProfileShape {
    pub g: usize,
    pub a: usize,
    pub dtilde: usize,
    pub deg_x_h: usize,
    pub s: usize,
    pub kappa: usize,
    pub eta: usize,
    pub deg_gamma_qh2: usize,
    pub deg_x_f2: usize,
    pub deg_x_qh: usize,
}

impl ProfileShape {
    pub fn of(fi: &FamilyInput) -> Self {
        let (deg_gamma_qh, deg_x_qh) = if fi.constant_h {
            (0, 0)
        } else {
            let mut dg = 0;
            let mut dxq = 0;
            for (s, k) in &fi.sqf {
                dg += deg_gamma_bi(s) * (fi.dtilde - k);
                dxq += s.degree().unwrap() * (fi.dtilde - k);
            }
            (dg, dxq)
        };
        ProfileShape {
            g: fi.g,
            a: fi.a,
            dtilde: fi.dtilde,
            deg_x_h: fi.h.degree().unwrap_or(0),
            s: fi.s,
            kappa: fi.kappa,
            eta: fi.eta,
            deg_gamma_qh2: 2 * deg_gamma_qh,
            deg_x_f2: 2 * (2 * fi.g + 1),
            deg_x_qh,
        }
    }
}

pub fn precision_profile(sh: &ProfileShape, n: usize) -> PrecisionProfile {
    let g = sh.g as i64;
    let (a, nn) = (sh.a as i64, n as i64);
    let phi = phi_bound(sh.g, sh.dtilde);
    let phi0 = phi * (2 * g - 1) + g;
    let lg = 3 + ((5 * g + 1) as f64).log2().floor() as i64;
    let nf = (binom(2 * sh.g as u64, sh.g as u64).log2() + 1.0 + (a * nn * g) as f64 / 2.0).ceil() as i64;
    let n_out = nf + a * nn * phi + 2 * g * a * nn * phi;
    let n2 = n_out + 12 * g * lg + (10 * g - 1) * phi + 5 * g;
    let alpha = (12 * g - 1) * lg + (10 * g - 1) * phi + 5 * g;
    let beta = lg;
    let beta_prime = (2 * g - 1) * lg;
    let dh = sh.deg_x_h as i64;
    let red_as = 2 * (2 * g + 1 - 2 * dh);
    let red_bs = 7 * dh - 3 * (2 * g + 1);
    let dt = sh.dtilde as i64;
    let (a_tilde, b_tilde) = (4 * dt, -6 * dt);
    let kappa = sh.kappa as i64;
    let eta = sh.eta as i64;
    let s = sh.s as i64;
    let omega = 2 * kappa
        + sh.deg_gamma_qh2 as i64
        + if eta == 0 || s == 0 {
            0
        } else {
            ((sh.deg_x_f2 as i64 + 2 * sh.deg_x_qh as i64) as f64 / s as f64 + 3.0).ceil() as i64 * eta
        };
    let delta = omega - kappa;
    let cap_a = omega + delta;
    let cap_b = cap_a + delta;
    let m_it = min_m(red_as, red_bs, g, n_out);
    let mt_it = min_mt(n_out);
    let chi1 = (a_tilde * mt_it + b_tilde).max(0);
    let t1 = cap_a * mt_it - cap_b + 2 * g * kappa * chi1 + chi1 * (s + 2 * g) * kappa;
    let t2 = cap_a * m_it - cap_b + (red_as * m_it + red_bs).max(0) * kappa;
    let chi2 = t1.max(t2).max(0);
    let target_prec = min_m(red_as, red_bs, g, n2).max(min_mt(n2));
    PrecisionProfile {
        g: sh.g,
        a: sh.a,
        n,
        nf,
        n_out,
        n2,
        n_gamma: chi2 as usize + 1,
        phi,
        phi0,
        m_exp: chi1 as usize,
        chi2: chi2 as usize,
        alpha,
        beta,
        beta_prime,
        red_as,
        red_bs,
        a_tilde,
        b_tilde,
        omega,
        delta,
        cap_a,
        cap_b,
        m_it,
        mt_it,
        target_prec,
    }
}

impl PrecisionProfile {
    pub fn render(&self) -> String {
        format!(
            "[precision]\nN_f = {}\nN = {}\nN2 = {}\nN_Gamma = {}\nphi = {}\nphi0 = {}\nM = {}\nchi2 = {}\nalpha = {}\nbeta = {}\nbeta' = {}\nred_as = {}\nred_bs = {}\na~ = {}\nb~ = {}\nomega = {}\ndelta = {}\nA = {}\nB = {}\nM_it = {}\nM~_it = {}\ntarget_prec = {}\n",
            self.nf, self.n_out, self.n2, self.n_gamma, self.phi, self.phi0, self.m_exp, self.chi2,
            self.alpha, self.beta, self.beta_prime, self.red_as, self.red_bs, self.a_tilde,
            self.b_tilde, self.omega, self.delta, self.cap_a, self.cap_b, self.m_it, self.mt_it,
            self.target_prec
        )
    }
}

/// Constant polynomial helper for callers building families by hand.
pub fn bi_constant(fq: &Arc<BinField>, c: FqElem) -> BiPoly {
    bi_const(fq, c)
}
