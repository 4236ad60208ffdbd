//! Frobenius on a single fiber: the lift W ≈ σ(Y) by the linearly
//! convergent iteration W ← W − G(W)·Q_h²/H^(2D̃), then the matrix of σ on
//! {X^i Y dX}.

use std::sync::Arc;

use crate::cohomology::{reduce_differential, DenomData, OddDifferential};
use crate::family::LiftedFamily;
use crate::hseries::{HSeries, SeriesRing, SeriesShape};
use crate::linalg::Mat;
use crate::padic::{Qq, UnramCtx};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobError {
    #[error("Newton residual at step {k} has valuation {val} < {k}")]
    Residual { k: u64, val: u64 },
    #[error("Frobenius matrix entry has valuation {val} below -phi = {}", -phi)]
    PhiBound { val: i64, phi: i64 },
    #[error("resultant is not a unit on this fiber")]
    RNotUnit,
}

/// One curve Y² + hY = f of the family, over Z_q.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub g: usize,
    pub dtilde: usize,
    pub constant_h: bool,
    pub ctx: Arc<UnramCtx>,
    pub hbig: Poly<Qq>,
    pub qf: Poly<Qq>,
    pub qhbig: Poly<Qq>,
    pub h: Poly<Qq>,
    pub qh: Poly<Qq>,
    pub f: Poly<Qq>,
    pub u: Poly<Qq>,
    pub v: Poly<Qq>,
}

/// Specialize the lifted family at Γ = γ (γ in the coefficient ring).
pub fn fiber_at(lf: &LiftedFamily, gamma: &Qq) -> Fiber {
    let ctx = lf.ctx.clone();
    let at = |p: &Poly<Poly<Qq>>| p.map(ctx.zero(), |c| c.eval(gamma));
    Fiber {
        g: lf.g,
        dtilde: lf.dtilde,
        constant_h: lf.hbig.degree() == Some(0),
        ctx: ctx.clone(),
        hbig: at(&lf.hbig),
        qf: at(&lf.qf),
        qhbig: at(&lf.qhbig),
        h: at(&lf.h),
        qh: at(&lf.qh),
        f: at(&lf.f),
        u: at(&lf.u),
        v: at(&lf.v),
    }
}

pub fn fiber_at_zero(lf: &LiftedFamily) -> Fiber {
    fiber_at(lf, &lf.ctx.zero())
}

/// σ on coefficients followed by X ↦ X².
fn sigma_x2(p: &Poly<Qq>) -> Poly<Qq> {
    p.map(p.ring_zero().clone(), |c| c.frobenius()).stretch(2)
}

/// W = α + βY modulo 2^prec, with per-step diagnostics.
#[derive(Clone, Debug)]
pub struct FrobY {
    pub ring: SeriesRing,
    pub alpha: HSeries,
    pub beta: HSeries,
    pub prec: u64,
    /// Valuation of the residual G(W_k) at each step k (capped at k+1).
    pub residuals: Vec<u64>,
    /// Level range of β after each step.
    pub ranges: Vec<(i64, i64)>,
}

impl Fiber {
    fn digit_base(&self) -> Poly<Qq> {
        if self.constant_h {
            Poly::x(self.ctx.zero())
        } else {
            self.hbig.clone()
        }
    }

    fn pole_shift(&self) -> i64 {
        if self.constant_h {
            0
        } else {
            2 * self.dtilde as i64
        }
    }
}

pub fn newton_frobenius_y(fb: &Fiber, target_prec: u64) -> Result<FrobY, FrobError> {
    let shape = SeriesShape::new(&fb.digit_base(), &fb.ctx);
    let d_f = shape.digits_of(&fb.f);
    let d_h = shape.digits_of(&fb.h);
    let d_fs = shape.digits_of(&sigma_x2(&fb.f));
    let d_hs = shape.digits_of(&sigma_x2(&fb.h));
    let d_q = shape.digits_of(&fb.qh.times(&fb.qh));
    let shift = fb.pole_shift();
    let mut ring = shape.ring(1);
    let mut alpha = ring.from_digits(&d_f, 0);
    let mut beta = ring.sub(&ring.zero(), &ring.from_digits(&d_h, 0));
    let mut residuals = Vec::new();
    let mut ranges = Vec::new();
    for k in 1..target_prec.max(1) {
        ring = shape.ring(k + 1);
        let (f, h) = (ring.from_digits(&d_f, 0), ring.from_digits(&d_h, 0));
        let (fs, hs) = (ring.from_digits(&d_fs, 0), ring.from_digits(&d_hs, 0));
        let q2 = ring.from_digits(&d_q, -shift);
        alpha = ring.recast(&alpha);
        beta = ring.recast(&beta);
        let a2 = ring.mul(&alpha, &alpha);
        let b2 = ring.mul(&beta, &beta);
        let ab = ring.mul(&alpha, &beta);
        // G = (α² + β²f + h^σα − f^σ) + (2αβ − β²h + h^σβ)Y
        let ga = ring.sub(&ring.add(&ring.add(&a2, &ring.mul(&b2, &f)), &ring.mul(&hs, &alpha)), &fs);
        let gb = ring.add(&ring.sub(&ring.scale_small(&ab, 2), &ring.mul(&b2, &h)), &ring.mul(&hs, &beta));
        let val = ring.valuation(&ga).unwrap_or(k + 1).min(ring.valuation(&gb).unwrap_or(k + 1));
        residuals.push(val);
        if val < k {
            return Err(FrobError::Residual { k, val });
        }
        alpha = ring.sub(&alpha, &ring.mul(&ga, &q2));
        beta = ring.sub(&beta, &ring.mul(&gb, &q2));
        ranges.push(SeriesRing::range(&beta).unwrap_or((0, 0)));
    }
    Ok(FrobY { ring, alpha, beta, prec: target_prec, residuals, ranges })
}

impl FrobY {
    /// Residual valuation of the final W at its own precision.
    pub fn final_residual(&self, fb: &Fiber) -> u64 {
        let ring = &self.ring;
        let shape = &ring.shape;
        let f = ring.from_digits(&shape.digits_of(&fb.f), 0);
        let h = ring.from_digits(&shape.digits_of(&fb.h), 0);
        let fs = ring.from_digits(&shape.digits_of(&sigma_x2(&fb.f)), 0);
        let hs = ring.from_digits(&shape.digits_of(&sigma_x2(&fb.h)), 0);
        let (al, be) = (&self.alpha, &self.beta);
        let b2 = ring.mul(be, be);
        let ga = ring.sub(
            &ring.add(&ring.add(&ring.mul(al, al), &ring.mul(&b2, &f)), &ring.mul(&hs, al)),
            &fs,
        );
        let gb = ring.add(&ring.sub(&ring.scale_small(&ring.mul(al, be), 2), &ring.mul(&b2, &h)), &ring.mul(&hs, be));
        let w = ring.r.w;
        ring.valuation(&ga).unwrap_or(w).min(ring.valuation(&gb).unwrap_or(w))
    }
}

/// Matrix of σ on {X^i Y dX} for the fiber, rows = source basis, over Z_q
/// at the precision of `fy`. Entries must have valuation ≥ −φ.
pub fn frobenius_matrix(fb: &Fiber, fy: &FrobY, phi: i64) -> Result<Mat<Qq>, FrobError> {
    let ctx = fb.ctx.with_prec(fy.prec as i64);
    let cast = |p: &Poly<Qq>| p.map(ctx.zero(), |c| c.with_ctx(&ctx));
    let (u, v) = (cast(&fb.u), cast(&fb.v));
    let dd = if fb.constant_h {
        None
    } else {
        Some(
            DenomData::new(fb.g, &cast(&fb.hbig), &cast(&fb.qf), &cast(&fb.qhbig), &cast(&fb.h))
                .ok_or(FrobError::RNotUnit)?,
        )
    };
    let ring = &fy.ring;
    let two = ctx.from_i64(2);
    let mut rows = Vec::with_capacity(2 * fb.g);
    for i in 0..2 * fb.g {
        let xs = ring.from_poly(&Poly::monomial(ctx.one(), 2 * i + 1));
        let prod = ring.mul(&fy.beta, &xs);
        let poly = ring.nonnegative_part(&prod, &ctx).scale(&two);
        let depth = (-prod.lo).max(0) as usize;
        assert!(depth == 0 || dd.is_some(), "poles without H");
        let denom = (1..=depth).map(|j| ring.digit_poly(&prod, -(j as i64), &ctx).scale(&two)).collect();
        let row = reduce_differential(OddDifferential { poly, denom }, dd.as_ref(), &u, &v, fb.g);
        rows.push(row);
    }
    if let Some(val) = rows.iter().flatten().filter_map(|x| x.valuation()).min() {
        if val < -phi {
            return Err(FrobError::PhiBound { val, phi });
        }
    }
    Ok(rows)
}
