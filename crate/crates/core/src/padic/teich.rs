use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::tower::{TowerCtx, TowerElem};
use super::zq::{trunc, Qq, UnramCtx, UnramData};
use super::PadicError;
use crate::ff2::{FfPoly, Gf2Poly};
use crate::scalar::Scalar;

/// Z_2 at precision `prec` (modulus x - 1).
pub fn z2_ctx(prec: i64) -> Arc<UnramCtx> {
    let p = prec.max(1) as u64;
    let data = UnramData {
        a: 1,
        mbar: Gf2Poly::from_u64(0b11),
        chi: vec![trunc(&BigInt::from(-1), p), BigInt::one()],
        chi_prec: p,
        frob: vec![vec![BigInt::one()]],
    };
    UnramCtx::from_data(Arc::new(data), prec)
}

/// Teichmüller lift of the generator class in base[z]/ψ̃, where ψ̃ is any monic
/// lift of an irreducible; iterate ω ← ω^(2^bits) until stable.
fn teich_gen(ring: &Arc<TowerCtx>, bits: usize) -> TowerElem {
    let mut w = ring.gen();
    loop {
        let mut x = w.clone();
        for _ in 0..bits {
            x = x.sqr();
        }
        if x == w {
            return w;
        }
        w = x;
    }
}

/// Teichmüller modulus over `base` of a monic irreducible given by its
/// coefficients (already lifted trivially), degree n over a base of degree a.
/// Returns the monic modulus with coefficients in `base`.
fn teich_modulus_over(base: &Arc<UnramCtx>, lifted: Vec<Qq>) -> Vec<Qq> {
    let n = lifted.len() - 1;
    let a = base.degree();
    let ring = TowerCtx::new(base.clone(), lifted);
    let w = teich_gen(&ring, a * n);
    // conjugates w^(2^(a i))
    let mut conj = vec![w.clone()];
    for _ in 1..n {
        let mut x = conj.last().unwrap().clone();
        for _ in 0..a {
            x = x.sqr();
        }
        conj.push(x);
    }
    let mut p: Vec<TowerElem> = vec![ring.one()];
    for r in &conj {
        let mut np = vec![ring.zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            np[i + 1] = np[i + 1].plus(c);
            np[i] = np[i].minus(&c.times(r));
        }
        p = np;
    }
    p.into_iter()
        .map(|e| {
            assert!(e.c[1..].iter().all(|x| x.is_zero()), "modulus coefficient outside base ring");
            e.c[0].clone()
        })
        .collect()
}

/// Teichmüller modulus of an irreducible `mbar` over F_2, mod 2^prec.
pub fn teichmuller_modulus(mbar: &Gf2Poly, prec: u64) -> Result<Vec<BigInt>, PadicError> {
    if !mbar.is_irreducible() {
        return Err(PadicError::NotIrreducible);
    }
    let d = mbar.degree().unwrap();
    let z2 = z2_ctx(prec as i64);
    let lifted = (0..=d).map(|i| z2.from_i64(mbar.bit(i) as i64)).collect();
    let m = teich_modulus_over(&z2, lifted);
    let out: Vec<BigInt> = m.iter().map(|x| trunc(&x.scaled_coeffs(0)[0], prec)).collect();
    debug_assert!(check_divides_frobenius(&out, d, prec));
    Ok(out)
}

/// x^(2^d) ≡ x mod (χ, 2^prec) for monic χ given over Z.
pub fn check_divides_frobenius(chi: &[BigInt], d: usize, prec: u64) -> bool {
    let n = chi.len() - 1;
    let reduce = |mut c: Vec<BigInt>| {
        for k in (n..c.len()).rev() {
            let t = std::mem::take(&mut c[k]);
            if t.is_zero() {
                continue;
            }
            for i in 0..n {
                c[k - n + i] -= &t * &chi[i];
            }
        }
        c.truncate(n);
        c.iter().map(|x| trunc(x, prec)).collect::<Vec<_>>()
    };
    let mut x = vec![BigInt::zero(); n.max(2)];
    x[1] = BigInt::one();
    let mut x = reduce(x);
    let start = x.clone();
    for _ in 0..d {
        let mut c = vec![BigInt::zero(); 2 * n];
        for (i, a) in x.iter().enumerate() {
            for (j, b) in x.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        x = reduce(c);
    }
    x == start
}

/// Build Z_q = Z_2[x]/χ with χ the Teichmüller lift of `mq`, working cap `prec`.
/// The modulus itself is kept to 3*prec+64 bits so that elements of negative
/// valuation still multiply correctly.
pub fn unram_ctx(mq: &Gf2Poly, prec: i64) -> Result<Arc<UnramCtx>, PadicError> {
    let a = mq.degree().ok_or(PadicError::NotIrreducible)?;
    let chi_prec = (3 * prec.max(1) + 64) as u64;
    let chi = teichmuller_modulus(mq, chi_prec)?;
    let mut frob = Vec::with_capacity(a);
    // x^{2i} mod χ by repeated multiplication with x²
    let mut p = vec![BigInt::zero(); a];
    p[0] = BigInt::one();
    for _ in 0..a {
        frob.push(p.clone());
        let mut c = vec![BigInt::zero(); a + 2];
        for (i, x) in p.iter().enumerate() {
            c[i + 2] += x;
        }
        for k in (a..c.len()).rev() {
            let t = std::mem::take(&mut c[k]);
            for i in 0..a {
                c[k - a + i] -= &t * &chi[i];
            }
        }
        c.truncate(a);
        p = c.iter().map(|x| trunc(x, chi_prec)).collect();
    }
    let data = UnramData { a, mbar: mq.clone(), chi, chi_prec, frob };
    Ok(UnramCtx::from_data(Arc::new(data), prec))
}

/// Teichmüller lift of an F_q element (x-basis bits) inside Z_q.
pub fn teichmuller_lift_element(ctx: &Arc<UnramCtx>, v: &Gf2Poly) -> Qq {
    let a = ctx.degree();
    let mut w = ctx.lift_gf2(v);
    loop {
        let mut x = w.clone();
        for _ in 0..a {
            x = x.sqr();
        }
        if x == w {
            return w;
        }
        w = x;
    }
}

/// Teichmüller lift inside a tower: iterate ω ← ω^(2^(an)).
pub fn teichmuller_lift_tower(e: &TowerElem) -> TowerElem {
    let bits = e.ctx.n * e.ctx.base.degree();
    let mut w = e.clone();
    loop {
        let mut x = w.clone();
        for _ in 0..bits {
            x = x.sqr();
        }
        if x == w {
            return w;
        }
        w = x;
    }
}

/// Tower Z_q[z]/ψ with ψ the Teichmüller lift of `psibar` (coefficients in
/// F_q, x-basis). The modulus is lifted at 3N+64 bits.
pub fn tower_modulus(psibar: &FfPoly, base: &Arc<UnramCtx>) -> Result<Arc<TowerCtx>, PadicError> {
    if !psibar.is_monic() {
        return Err(PadicError::NotIrreducible);
    }
    let hi = base.with_prec((3 * base.prec.max(1) + 64).min(base.data.chi_prec as i64));
    let lifted: Vec<Qq> = psibar.coeffs().iter().map(|c| hi.lift_gf2(&c.v)).collect();
    let psi = teich_modulus_over(&hi, lifted);
    let t = TowerCtx::new(base.clone(), psi).with_frobenius();
    Ok(t)
}

/// z^(q^n) ≡ z in the tower at its working precision.
pub fn check_tower(t: &Arc<TowerCtx>) -> bool {
    let z = t.gen();
    let mut x = z.clone();
    for _ in 0..t.n * t.base.degree() {
        x = x.sqr();
    }
    x == z
}
