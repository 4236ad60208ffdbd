//! The whole computation: family → F(0) → F'(Γ) once, then any number of
//! parameters in one extension F_{q^n}.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;

use crate::cohomology::compute_connection_matrices;
use crate::deformation::{solve_k, DeformError, FrobSeries};
use crate::family::{
    admissible, lift_family, precision_profile, FamilyError, FamilyInput, LiftedFamily, PrecisionProfile,
    ProfileShape, QPoly,
};
use crate::ff2::{BinField, Embedding, Ff2Error, FqElem};
use crate::frobzero::{fiber_at_zero, frobenius_matrix, newton_frobenius_y, FrobError};
use crate::linalg::Mat;
use crate::padic::{unram_ctx, PadicError, Qq, TowerElem, UnramCtx};
use crate::poly::Poly;
use crate::zeta::{
    batch_specialize, lift_big_element, min_poly, norm_frobenius, numerator_from_norm, param_tower, specialize,
    ZetaError, ZetaNumerator,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("family: {0}")]
    Family(#[from] FamilyError),
    #[error("field: {0}")]
    Field(#[from] Ff2Error),
    #[error("padic: {0}")]
    Padic(#[from] PadicError),
    #[error("frobenius: {0}")]
    Frob(#[from] FrobError),
    #[error("deformation: {0}")]
    Deform(#[from] DeformError),
    #[error("zeta: {0}")]
    Zeta(#[from] ZetaError),
    #[error("options: {0}")]
    Options(String),
}

static FAMILY_RUNS: AtomicUsize = AtomicUsize::new(0);

/// How many times F'(Γ) has been computed in this process.
pub fn family_runs() -> usize {
    FAMILY_RUNS.load(Ordering::SeqCst)
}

/// Precision overrides; each may only raise the profile value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub n2: Option<i64>,
    pub n_gamma: Option<usize>,
    pub target_prec: Option<i64>,
}

pub fn apply_overrides(mut p: PrecisionProfile, o: &Overrides) -> Result<PrecisionProfile, PipelineError> {
    fn raise<T: PartialOrd + Copy + std::fmt::Display>(slot: &mut T, v: Option<T>, name: &str) -> Result<(), PipelineError> {
        if let Some(v) = v {
            if v < *slot {
                return Err(PipelineError::Options(format!("{name} = {v} is below the profile value {slot}")));
            }
            *slot = v;
        }
        Ok(())
    }
    raise(&mut p.n2, o.n2, "N2")?;
    raise(&mut p.n_gamma, o.n_gamma, "N_Gamma")?;
    raise(&mut p.target_prec, o.target_prec, "target_prec")?;
    Ok(p)
}

/// F'(Γ) = r(Γ)^M F(Γ) with the data needed to specialize it.
#[derive(Clone, Debug)]
pub struct FamilyFrobenius {
    pub profile: PrecisionProfile,
    pub kappa: usize,
    pub ctx: Arc<UnramCtx>,
    pub r: QPoly,
    pub f0: Mat<Qq>,
    pub fprime: Mat<QPoly>,
    pub loss: i64,
}

pub fn profile_for(fi: &FamilyInput, n: usize, o: &Overrides) -> Result<PrecisionProfile, PipelineError> {
    apply_overrides(precision_profile(&ProfileShape::of(fi), n), o)
}

fn top_ctx(fi: &FamilyInput, p: &PrecisionProfile) -> Result<Arc<UnramCtx>, PipelineError> {
    Ok(unram_ctx(fi.fq.modulus(), p.target_prec.max(p.n2))?)
}

pub fn lifted(fi: &FamilyInput, p: &PrecisionProfile) -> Result<LiftedFamily, PipelineError> {
    Ok(lift_family(fi, &top_ctx(fi, p)?))
}

/// Steps up to F'(Γ); counted by [`family_runs`].
pub fn family_frobenius(fi: &FamilyInput, n: usize, o: &Overrides) -> Result<FamilyFrobenius, PipelineError> {
    FAMILY_RUNS.fetch_add(1, Ordering::SeqCst);
    let p = profile_for(fi, n, o)?;
    let lf = lifted(fi, &p)?;
    let fb = fiber_at_zero(&lf);
    let fy = newton_frobenius_y(&fb, p.target_prec as u64)?;
    let f0 = frobenius_matrix(&fb, &fy, p.phi)?;
    let cm = compute_connection_matrices(&lf);
    let work = lf.ctx.with_prec(p.n2);
    let fs: FrobSeries = solve_k(&cm, &lf.r, p.m_exp, &f0, p.n_gamma, &work)?;
    let margin = p.n2 - p.n_out;
    if fs.loss > margin {
        return Err(DeformError::Ledger { loss: fs.loss, margin }.into());
    }
    let r = lf.r.map(work.zero(), |c| c.with_ctx(&work));
    Ok(FamilyFrobenius {
        kappa: fi.kappa,
        ctx: work,
        r,
        f0,
        fprime: fs.fprime_polys(),
        loss: fs.loss,
        profile: p,
    })
}

/// F_{q^n} = F_2[t]/(m) together with the embedding of F_q.
#[derive(Clone, Debug)]
pub struct ParamSpace {
    pub n: usize,
    pub big: Arc<BinField>,
    pub emb: Embedding,
}

impl ParamSpace {
    pub fn new(fi: &FamilyInput, big: Arc<BinField>) -> Result<Self, PipelineError> {
        let emb = Embedding::new(fi.fq.clone(), big.clone())?;
        Ok(ParamSpace { n: big.degree() / fi.a, big, emb })
    }

    /// The default F_{q^n} with the smallest irreducible modulus of degree an.
    pub fn standard(fi: &FamilyInput, n: usize) -> Result<Self, PipelineError> {
        Self::new(fi, BinField::smallest_of_degree(fi.a * n))
    }

    pub fn qn(&self) -> BigInt {
        BigInt::from(1u8) << self.big.degree()
    }
}

fn finish(ff: &FamilyFrobenius, space: &ParamSpace, fz: &Mat<TowerElem>) -> Result<ZetaNumerator, PipelineError> {
    let p = &ff.profile;
    let len = space.big.degree();
    let big_f = norm_frobenius(fz, len);
    let budget = 2 * p.g as i64 * len as i64 * p.phi;
    Ok(numerator_from_norm(&big_f, p.g, &space.qn(), p.nf, budget)?)
}

/// One parameter γ̄ that generates F_{q^n} over F_q, in the tower of its own
/// minimal polynomial.
pub fn zeta_single(ff: &FamilyFrobenius, fi: &FamilyInput, space: &ParamSpace, gamma: &FqElem) -> Result<ZetaNumerator, PipelineError> {
    if !admissible(gamma, fi, &space.emb) {
        return Err(ZetaError::NotAdmissible.into());
    }
    let psibar = min_poly(&space.emb, gamma);
    let d = psibar.degree().unwrap_or(0);
    if d != space.n {
        return Err(ZetaError::NotGenerator(d, space.n).into());
    }
    let tower = param_tower(&psibar, &ff.ctx);
    let z = tower.gen();
    let fz = specialize(&ff.fprime, &ff.r, ff.profile.m_exp, &z)?;
    finish(ff, space, &fz)
}

/// Any number of parameters of F_{q^n} (subfield elements allowed), all as
/// Teichmüller points of one tower, specialized through a subproduct tree.
pub fn zeta_batch(
    ff: &FamilyFrobenius,
    fi: &FamilyInput,
    space: &ParamSpace,
    gammas: &[FqElem],
) -> Vec<Result<ZetaNumerator, PipelineError>> {
    if gammas.is_empty() {
        return Vec::new();
    }
    let t = space.big.gen();
    let psibar = min_poly(&space.emb, &t);
    let tower = param_tower(&psibar, &ff.ctx);
    let mut out: Vec<Option<Result<ZetaNumerator, PipelineError>>> = vec![None; gammas.len()];
    let mut idx = Vec::new();
    let mut pts = Vec::new();
    for (i, g) in gammas.iter().enumerate() {
        if admissible(g, fi, &space.emb) {
            idx.push(i);
            pts.push(lift_big_element(&tower, g));
        } else {
            out[i] = Some(Err(ZetaError::NotAdmissible.into()));
        }
    }
    let fzs = batch_specialize(&ff.fprime, &ff.r, ff.profile.m_exp, &pts);
    for (k, fz) in idx.into_iter().zip(fzs) {
        out[k] = Some(fz.map_err(PipelineError::from).and_then(|fz| finish(ff, space, &fz)));
    }
    out.into_iter().map(|x| x.unwrap()).collect()
}

/// Lowest valuation of F' coefficients by Γ-degree, for diagnostics.
pub fn gamma_degree_profile(ff: &FamilyFrobenius) -> Vec<Option<i64>> {
    let len = ff.fprime.iter().flatten().map(|p: &Poly<Qq>| p.len()).max().unwrap_or(0);
    (0..len)
        .map(|t| ff.fprime.iter().flatten().filter_map(|p| p.coeff(t).valuation()).min())
        .collect()
}
