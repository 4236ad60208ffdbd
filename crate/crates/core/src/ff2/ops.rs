use std::sync::Arc;

use super::field::{BinField, FqElem};
use super::gf2poly::Gf2Poly;
use super::Ff2Error;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Univariate polynomial over a binary field.
pub type FfPoly = Poly<FqElem>;
/// Polynomial in X whose coefficients are polynomials in Γ.
pub type BiPoly = Poly<Poly<FqElem>>;

pub fn make_monic(p: &FfPoly) -> FfPoly {
    match p.lead() {
        None => p.clone(),
        Some(l) => p.scale(&l.inv().unwrap()),
    }
}

/// Monic gcd over a field.
pub fn poly_gcd_char2(p: &FfPoly, q: &FfPoly) -> Result<FfPoly, Ff2Error> {
    if p.is_zero() && q.is_zero() {
        return Err(Ff2Error::GcdUndefined);
    }
    let (mut a, mut b) = (p.clone(), q.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    Ok(make_monic(&a))
}

/// Square root of a polynomial all of whose odd coefficients vanish.
fn poly_sqrt(p: &FfPoly) -> FfPoly {
    let c = p
        .coeffs()
        .iter()
        .step_by(2)
        .map(|x| x.sqrt())
        .collect();
    Poly::new(c, p.ring_zero().clone())
}

/// Squarefree decomposition: monic pairwise coprime squarefree factors with
/// their multiplicities, `h = lc * prod s_i^{m_i}`.
pub fn squarefree_decomposition(h: &FfPoly) -> Result<Vec<(FfPoly, usize)>, Ff2Error> {
    if h.is_zero() {
        return Err(Ff2Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    sqf_rec(&make_monic(h), 1, &mut out);
    out.sort_by_key(|(_, m)| *m);
    Ok(out)
}

fn sqf_rec(f: &FfPoly, scale: usize, out: &mut Vec<(FfPoly, usize)>) {
    if f.degree() == Some(0) {
        return;
    }
    let d = f.derivative();
    if d.is_zero() {
        sqf_rec(&poly_sqrt(f), scale * 2, out);
        return;
    }
    let mut c = poly_gcd_char2(f, &d).unwrap();
    let mut w = f.exact_div(&c);
    let mut i = 1;
    while w.degree() != Some(0) {
        let y = poly_gcd_char2(&w, &c).unwrap();
        let z = w.exact_div(&y);
        if z.degree() != Some(0) {
            out.push((z, i * scale));
        }
        i += 1;
        w = y.clone();
        c = c.exact_div(&y);
    }
    if c.degree() != Some(0) {
        sqf_rec(&poly_sqrt(&c), scale * 2, out);
    }
}

/// Radical (product of the distinct irreducible factors) and the largest
/// multiplicity. A nonzero constant gives `(1, 1)`.
pub fn radical_and_multiplicity(h: &FfPoly) -> Result<(FfPoly, usize), Ff2Error> {
    let parts = squarefree_decomposition(h)?;
    let one = Poly::constant(h.ring_zero().one_like());
    let rad = parts.iter().fold(one, |acc, (s, _)| acc.times(s));
    let m = parts.iter().map(|(_, m)| *m).max().unwrap_or(1);
    Ok((rad, m))
}

/// Product of `(Z - r)` over the given roots.
pub fn poly_from_roots(roots: &[FqElem], zero: &FqElem) -> FfPoly {
    let mut p = Poly::constant(zero.one_like());
    for r in roots {
        p = p.times(&Poly::new(vec![r.clone(), zero.one_like()], zero.clone()));
    }
    p
}

/// Roots in `F` of a squarefree polynomial over `F` that splits into linear
/// factors, sorted by bit pattern.
pub fn split_roots(g: &FfPoly) -> Vec<FqElem> {
    let mut out = Vec::new();
    split_rec(&make_monic(g), &mut out);
    out.sort_by(|a, b| a.v.cmp(&b.v));
    out
}

fn split_rec(g: &FfPoly, out: &mut Vec<FqElem>) {
    match g.degree() {
        None | Some(0) => {}
        Some(1) => out.push(g.coeff(0).negate()),
        Some(d) => {
            let z = g.ring_zero();
            let field = z.f.clone();
            for k in 0..field.degree() {
                let beta = field.elem(Gf2Poly::monomial(k));
                let mut x = Poly::monomial(beta, 1).rem(g);
                let mut tr = x.clone();
                for _ in 1..field.degree() {
                    x = x.times(&x).rem(g);
                    tr = tr.plus(&x);
                }
                let h = poly_gcd_char2(g, &tr).unwrap();
                let hd = h.degree().unwrap();
                if hd > 0 && hd < d {
                    split_rec(&h, out);
                    split_rec(&g.exact_div(&h), out);
                    return;
                }
            }
            panic!("polynomial does not split into distinct linear factors");
        }
    }
}

/// Embedding of F_q = F_2[x]/(m_q) into F_{2^{an}} = F_2[t]/(m), fixed by the
/// smallest root of m_q.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub small: Arc<BinField>,
    pub big: Arc<BinField>,
    pub theta: Gf2Poly,
    powers: Vec<Gf2Poly>,
    echelon: Vec<(Gf2Poly, u64)>,
}

impl Embedding {
    pub fn new(small: Arc<BinField>, big: Arc<BinField>) -> Result<Self, Ff2Error> {
        let a = small.degree();
        if big.degree() % a != 0 {
            return Err(Ff2Error::NotSubfield(a, big.degree()));
        }
        let zero = big.zero();
        let mq = Poly::new(
            (0..=a).map(|i| big.elem(Gf2Poly::from_u64(small.modulus().bit(i) as u64))).collect(),
            zero,
        );
        let theta = split_roots(&mq)[0].v.clone();
        let mut powers = Vec::with_capacity(a);
        let mut p = Gf2Poly::one();
        for _ in 0..a {
            powers.push(p.clone());
            p = big.mul(&p, &theta);
        }
        let mut echelon: Vec<(Gf2Poly, u64)> = Vec::new();
        for (j, b) in powers.iter().enumerate() {
            let (mut r, mut tag) = (b.clone(), 1u64 << j);
            loop {
                let Some(d) = r.degree() else { break };
                match echelon.iter().find(|(e, _)| e.degree() == Some(d)) {
                    Some((e, t)) => {
                        r = r.add(e);
                        tag ^= t;
                    }
                    None => {
                        echelon.push((r, tag));
                        break;
                    }
                }
            }
        }
        assert_eq!(echelon.len(), a, "subfield basis is not independent");
        Ok(Embedding { small, big, theta, powers, echelon })
    }

    pub fn to_big(&self, x: &FqElem) -> FqElem {
        let mut acc = Gf2Poly::zero();
        for (j, p) in self.powers.iter().enumerate() {
            if x.v.bit(j) {
                acc = acc.add(p);
            }
        }
        self.big.elem(acc)
    }

    /// Preimage of `y` if it lies in the subfield.
    pub fn to_small(&self, y: &FqElem) -> Option<FqElem> {
        let (mut r, mut tag) = (y.v.clone(), 0u64);
        while let Some(d) = r.degree() {
            let (e, t) = self.echelon.iter().find(|(e, _)| e.degree() == Some(d))?;
            r = r.add(e);
            tag ^= t;
        }
        Some(self.small.elem(Gf2Poly::from_u64(tag)))
    }

    pub fn poly_to_big(&self, p: &FfPoly) -> FfPoly {
        p.map(self.big.zero(), |c| self.to_big(c))
    }
}

/// Minimal polynomial of `gamma` (in the big field) over the small field.
pub fn minimal_polynomial(gamma: &FqElem, emb: &Embedding) -> FfPoly {
    let a = emb.small.degree();
    let mut conj = vec![gamma.clone()];
    loop {
        let next = conj.last().unwrap().frob(a);
        if next == *gamma {
            break;
        }
        conj.push(next);
    }
    let p = poly_from_roots(&conj, &emb.big.zero());
    p.map(emb.small.zero(), |c| emb.to_small(c).expect("coefficient outside subfield"))
}

fn content(p: &BiPoly) -> FfPoly {
    let mut g = p.coeff(0);
    for c in p.coeffs() {
        if !c.is_zero() {
            g = if g.is_zero() { make_monic(c) } else { poly_gcd_char2(&g, c).unwrap() };
        }
    }
    g
}

fn primitive_part(p: &BiPoly) -> BiPoly {
    let c = content(p);
    Poly::new(p.coeffs().iter().map(|x| x.exact_div(&c)).collect(), p.ring_zero().clone())
}

fn pseudo_rem(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = b.degree().unwrap();
    let lb = b.lead().unwrap().clone();
    let mut r = a.clone();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let lr = r.lead().unwrap().clone();
        r = r.scale(&lb).minus(&b.shift(dr - db).scale(&lr));
    }
    r
}

/// Gcd in F_q[Γ][X], normalized monic in X. Both inputs must be monic in X.
pub fn bivariate_gcd(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let (mut x, mut y) = (primitive_part(a), primitive_part(b));
    while !y.is_zero() {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = if r.is_zero() { r } else { primitive_part(&r) };
    }
    let l = x.lead().unwrap().clone();
    assert_eq!(l.degree(), Some(0), "gcd of monic polynomials must have a constant leading term");
    x.scale(&Poly::constant(l.coeff(0).inv().unwrap()))
}

/// Exact division in F_q[Γ][X] by a divisor with constant leading coefficient.
pub fn bivariate_div(a: &BiPoly, d: &BiPoly) -> Option<BiPoly> {
    let (q, r) = a.divrem(d);
    r.is_zero().then_some(q)
}

/// Evaluate the Γ-coefficients at a point, giving a polynomial in X.
pub fn bivariate_at(p: &BiPoly, gamma: &FqElem) -> FfPoly {
    p.map(gamma.zero_like(), |c| c.eval(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<BinField> {
        BinField::prime()
    }

    fn p2(bits: &[u64], f: &Arc<BinField>) -> FfPoly {
        Poly::new(bits.iter().map(|&b| f.elem(Gf2Poly::from_u64(b))).collect(), f.zero())
    }

    #[test]
    fn gcd_examples() {
        let f = f2();
        assert_eq!(poly_gcd_char2(&p2(&[0, 0, 1], &f), &p2(&[0, 1], &f)).unwrap(), p2(&[0, 1], &f));
        assert_eq!(
            poly_gcd_char2(&p2(&[0, 1, 0, 1], &f), &p2(&[1, 0, 1], &f)).unwrap(),
            p2(&[1, 0, 1], &f)
        );
        assert!(poly_gcd_char2(&p2(&[], &f), &p2(&[], &f)).is_err());
    }

    #[test]
    fn radical_examples() {
        let f = f2();
        assert_eq!(radical_and_multiplicity(&p2(&[0, 0, 1], &f)).unwrap(), (p2(&[0, 1], &f), 2));
        assert_eq!(radical_and_multiplicity(&p2(&[0, 1, 1], &f)).unwrap(), (p2(&[0, 1, 1], &f), 1));
        assert_eq!(radical_and_multiplicity(&p2(&[1], &f)).unwrap(), (p2(&[1], &f), 1));
        // X^2 (X+1)^4 (X^2+X+1)^3
        let h = p2(&[0, 0, 1], &f)
            .times(&p2(&[1, 1], &f).pow(4))
            .times(&p2(&[1, 1, 1], &f).pow(3));
        let (r, m) = radical_and_multiplicity(&h).unwrap();
        assert_eq!(r, p2(&[0, 1], &f).times(&p2(&[1, 1], &f)).times(&p2(&[1, 1, 1], &f)));
        assert_eq!(m, 4);
    }

    #[test]
    fn minimal_polynomials() {
        let f4 = BinField::new(Gf2Poly::from_u64(0b111)).unwrap();
        let emb = Embedding::new(f2(), f4.clone()).unwrap();
        assert_eq!(minimal_polynomial(&f4.one(), &emb), p2(&[1, 1], &f2()));
        assert_eq!(minimal_polynomial(&f4.gen(), &emb), p2(&[1, 1, 1], &f2()));
        let f8 = BinField::new(Gf2Poly::from_u64(0b1011)).unwrap();
        let emb = Embedding::new(f2(), f8.clone()).unwrap();
        let u = f8.elem(Gf2Poly::from_u64(0b110));
        assert_eq!(minimal_polynomial(&u, &emb), p2(&[1, 1, 0, 1], &f2()));
    }

    #[test]
    fn embedding_f4_in_f16() {
        let f4 = BinField::new(Gf2Poly::from_u64(0b111)).unwrap();
        let f16 = BinField::new(Gf2Poly::from_u64(0b10011)).unwrap();
        let emb = Embedding::new(f4.clone(), f16.clone()).unwrap();
        for x in f4.elements() {
            let e = f4.elem(x);
            assert_eq!(emb.to_small(&emb.to_big(&e)).unwrap(), e);
        }
        let g = f16.gen();
        assert!(emb.to_small(&g).is_none());
        let mp = minimal_polynomial(&g, &emb);
        assert_eq!(mp.degree(), Some(2));
        assert!(emb.poly_to_big(&mp).eval(&g).is_zero());
    }

    #[test]
    fn bivariate_gcd_basic() {
        let f = f2();
        let cst = |b: &[u64]| p2(b, &f);
        // (X + Γ)(X + 1) and (X + Γ)(X^2 + Γ X + 1)
        let xg: BiPoly = Poly::new(vec![cst(&[0, 1]), cst(&[1])], cst(&[]));
        let x1: BiPoly = Poly::new(vec![cst(&[1]), cst(&[1])], cst(&[]));
        let q: BiPoly = Poly::new(vec![cst(&[1]), cst(&[0, 1]), cst(&[1])], cst(&[]));
        let g = bivariate_gcd(&xg.times(&x1), &xg.times(&q));
        assert_eq!(g, xg);
        assert_eq!(bivariate_div(&xg.times(&q), &xg).unwrap(), q);
    }
}
