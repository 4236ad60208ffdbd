//! Transport of Frobenius along Γ: solve
//! (rB^σ)K'B + (rB^σ)KD + (−Mṙ B^σ + 2Γ r (Ḃ−D)^σ)KB = 0
//! with K(0) = r(0)^M F(0) B(0)^(-1), then F' = r^M F = K·B.

use std::sync::Arc;

use crate::cohomology::ConnectionMatrices;
use crate::family::QPoly;
use crate::linalg::{mat_add, mat_inverse_by, mat_mul, mat_scale, mat_sub, mat_zero, Mat};
use crate::padic::{Qq, UnramCtx};
use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeformError {
    #[error("B(0) or r(0)B(0)^σ is not invertible")]
    Singular,
    #[error("precision ledger violated: {loss} bits lost, margin {margin}")]
    Ledger { loss: i64, margin: i64 },
}

/// K and F' = K·B as Γ-power series of 2g×2g matrices.
#[derive(Clone, Debug)]
pub struct FrobSeries {
    pub k: Vec<Mat<Qq>>,
    pub fprime: Vec<Mat<Qq>>,
    pub m_exp: usize,
    /// Bits of absolute precision consumed by the recursion.
    pub loss: i64,
}

/// Coefficient matrices of a matrix of Γ-polynomials, padded to `len`.
pub fn coeff_mats(m: &Mat<QPoly>, len: usize, ctx: &Arc<UnramCtx>) -> Vec<Mat<Qq>> {
    (0..len)
        .map(|t| m.iter().map(|row| row.iter().map(|p| p.coeff(t).with_ctx(ctx)).collect()).collect())
        .collect()
}

fn poly_mat_len(m: &Mat<QPoly>) -> usize {
    m.iter().flatten().map(|p| p.len()).max().unwrap_or(0).max(1)
}

/// σ on coefficients and Γ ↦ Γ².
pub fn sigma_gamma2(p: &QPoly) -> QPoly {
    p.map(p.ring_zero().clone(), |c| c.frobenius()).stretch(2)
}

fn pmat_map(m: &Mat<QPoly>, f: impl Fn(&QPoly) -> QPoly) -> Mat<QPoly> {
    m.iter().map(|row| row.iter().map(&f).collect()).collect()
}

fn is_zero_mat(m: &Mat<Qq>) -> bool {
    m.iter().flatten().all(|x| x.is_zero())
}

fn min_val(m: &Mat<Qq>) -> Option<i64> {
    m.iter().flatten().filter_map(|x| x.valuation()).min()
}

/// Σ_i a_i · b_{t-i} over the overlap of two coefficient sequences.
fn conv_at(a: &[Mat<Qq>], b: &[Mat<Qq>], t: usize, zero: &Mat<Qq>) -> Mat<Qq> {
    let mut acc = zero.clone();
    let lo = t.saturating_sub(b.len().saturating_sub(1));
    for i in lo..=t.min(a.len().saturating_sub(1)) {
        if is_zero_mat(&a[i]) || is_zero_mat(&b[t - i]) {
            continue;
        }
        acc = mat_add(&acc, &mat_mul(&a[i], &b[t - i]));
    }
    acc
}

/// Solve for K_0..K_{nγ-1} at the precision of `ctx`.
pub fn solve_k(
    cm: &ConnectionMatrices,
    r: &QPoly,
    m_exp: usize,
    f0: &Mat<Qq>,
    n_gamma: usize,
    ctx: &Arc<UnramCtx>,
) -> Result<FrobSeries, DeformError> {
    let dim = cm.b.len();
    let zq = ctx.zero();
    let zero = mat_zero(&zq, dim, dim);
    let r = r.map(zq.clone(), |c| c.with_ctx(ctx));
    let lb = poly_mat_len(&cm.b);
    let ld = poly_mat_len(&cm.d);
    let bk = coeff_mats(&cm.b, lb, ctx);
    let dk = coeff_mats(&cm.d, ld, ctx);
    let bs = pmat_map(&cm.b, sigma_gamma2);
    let bmd = pmat_map(
        &cm.b.iter().zip(&cm.d).map(|(rb, rd)| rb.iter().zip(rd).map(|(x, y)| x.derivative().minus(y)).collect()).collect(),
        sigma_gamma2,
    );
    let gamma = Poly::monomial(ctx.one(), 1);
    let rdot_m = r.derivative().scale(&ctx.from_i64(m_exp as i64));
    let two_gamma_r = r.times(&gamma).scale(&ctx.from_i64(2));
    let p1 = pmat_map(&bs, |p| r.times(p));
    let p3: Mat<QPoly> = bs
        .iter()
        .zip(&bmd)
        .map(|(rb, rd)| rb.iter().zip(rd).map(|(x, y)| two_gamma_r.times(y).minus(&rdot_m.times(x))).collect())
        .collect();
    let p1k = coeff_mats(&p1, poly_mat_len(&p1), ctx);
    let p3k = coeff_mats(&p3, poly_mat_len(&p3), ctx);
    let val = |x: &Qq| x.valuation();
    let b0inv = mat_inverse_by(&bk[0], val).ok_or(DeformError::Singular)?;
    let p10inv = mat_inverse_by(&p1k[0], val).ok_or(DeformError::Singular)?;
    let f0 = crate::linalg::mat_map(f0, |x| x.with_ctx(ctx));
    let r0m = r.coeff(0).pow_u(m_exp as u64);
    let k0 = mat_scale(&mat_mul(&f0, &b0inv), &r0m);
    let mut ks = vec![k0];
    let mut es: Vec<Mat<Qq>> = Vec::with_capacity(n_gamma);
    let mut qs: Vec<Mat<Qq>> = vec![mat_mul(&ks[0], &bk[0])];
    let mut loss = 0i64;
    for k in 1..n_gamma {
        let t = k - 1;
        // (K'B + KD)_t without the unknown term k·K_k·B_0
        let mut epart = conv_at(&ks, &dk, t, &zero);
        for i in 1..=t {
            if t + 1 - i >= bk.len() || is_zero_mat(&ks[i]) {
                continue;
            }
            let term = mat_mul(&ks[i], &bk[t + 1 - i]);
            epart = mat_add(&epart, &mat_scale(&term, &ctx.from_i64(i as i64)));
        }
        let mut s = mat_mul(&p1k[0], &epart);
        for m in 1..p1k.len().min(t + 1) {
            if !is_zero_mat(&p1k[m]) && !is_zero_mat(&es[t - m]) {
                s = mat_add(&s, &mat_mul(&p1k[m], &es[t - m]));
            }
        }
        for m in 0..p3k.len().min(t + 1) {
            if !is_zero_mat(&p3k[m]) && !is_zero_mat(&qs[t - m]) {
                s = mat_add(&s, &mat_mul(&p3k[m], &qs[t - m]));
            }
        }
        let kinv = ctx.from_i64(-(k as i64)).inv().unwrap();
        let kk = mat_scale(&mat_mul(&mat_mul(&p10inv, &s), &b0inv), &kinv);
        if let Some(v) = min_val(&kk) {
            loss = loss.max(-v);
        }
        let full = mat_add(&epart, &mat_scale(&mat_mul(&kk, &bk[0]), &ctx.from_i64(k as i64)));
        es.push(full);
        ks.push(kk);
        qs.push(conv_at(&ks, &bk, k, &zero));
    }
    Ok(FrobSeries { k: ks, fprime: qs, m_exp, loss })
}

impl FrobSeries {
    /// Coefficient of Γ^t of Eq. residual, for diagnostics: P1(K'B + KD) + P3 KB.
    pub fn gamma_degree_profile(&self) -> Vec<Option<i64>> {
        self.fprime.iter().map(min_val).collect()
    }

    /// F' entries as Γ-polynomials.
    pub fn fprime_polys(&self) -> Mat<QPoly> {
        let dim = self.fprime[0].len();
        let z = self.fprime[0][0][0].ctx.zero();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| Poly::new(self.fprime.iter().map(|m| m[i][j].clone()).collect(), z.clone()))
                    .collect()
            })
            .collect()
    }

    /// Smallest valuation among F' coefficients at Γ-degrees above `deg`.
    pub fn tail_valuation(&self, deg: usize) -> Option<i64> {
        self.fprime.iter().skip(deg + 1).filter_map(min_val).min()
    }
}

/// F(Γ) for a Γ-free family is constant: K_k = 0 for k ≥ 1.
pub fn is_constant(fs: &FrobSeries) -> bool {
    fs.k.iter().skip(1).all(is_zero_mat)
}

/// r^M F(0) recovered from K_0 B_0.
pub fn fprime_at_zero(fs: &FrobSeries) -> &Mat<Qq> {
    &fs.fprime[0]
}

pub fn mat_sub_qq(a: &Mat<Qq>, b: &Mat<Qq>) -> Mat<Qq> {
    mat_sub(a, b)
}
