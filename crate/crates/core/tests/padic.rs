use famzeta::ff2::{BinField, Embedding, Gf2Poly, minimal_polynomial};
use famzeta::padic::*;
use famzeta::{Poly, Scalar};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ints(v: &[i64], prec: u64) -> Vec<BigInt> {
    v.iter().map(|&x| trunc(&BigInt::from(x), prec)).collect()
}

#[test]
fn cyclotomic_modulus_is_already_teichmuller() {
    let m = teichmuller_modulus(&Gf2Poly::from_u64(0b111), 32).unwrap();
    assert_eq!(m, ints(&[1, 1, 1], 32));
}

#[test]
fn linear_modulus_has_root_one() {
    // the Teichmüller lift of 1 is 1, so the modulus is x - 1
    let m = teichmuller_modulus(&Gf2Poly::from_u64(0b11), 40).unwrap();
    assert_eq!(m, ints(&[-1, 1], 40));
    assert!(check_divides_frobenius(&m, 1, 40));
}

#[test]
fn cubic_modulus_matches_brute_force() {
    let prec = 5;
    let mut found = Vec::new();
    for c0 in (1..32).step_by(2) {
        for c1 in (1..32).step_by(2) {
            for c2 in (0..32).step_by(2) {
                let cand = ints(&[c0, c1, c2, 1], prec);
                if check_divides_frobenius(&cand, 3, prec) {
                    found.push(cand);
                }
            }
        }
    }
    assert_eq!(found.len(), 1);
    let m = teichmuller_modulus(&Gf2Poly::from_u64(0b1011), prec).unwrap();
    assert_eq!(m, found[0]);
}

#[test]
fn moduli_divide_frobenius_at_256_bits() {
    for bits in [0b111u64, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0b100011011] {
        let g = Gf2Poly::from_u64(bits);
        let d = g.degree().unwrap();
        let m = teichmuller_modulus(&g, 256).unwrap();
        assert!(check_divides_frobenius(&m, d, 256), "degree {d}");
    }
    assert!(teichmuller_modulus(&Gf2Poly::from_u64(0b101), 16).is_err());
}

fn random_elem(ctx: &std::sync::Arc<UnramCtx>, rng: &mut ChaCha8Rng, val: i64) -> Qq {
    let c = (0..ctx.degree()).map(|_| BigInt::from(rng.gen::<u64>())).collect();
    ctx.from_coeffs(val, c)
}

#[test]
fn frobenius_is_a_ring_morphism() {
    let ctx = unram_ctx(&Gf2Poly::from_u64(0b1011), 60).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let a = random_elem(&ctx, &mut rng, 0);
        let vb = rng.gen_range(-3..3);
        let b = random_elem(&ctx, &mut rng, vb);
        // products with a negative-valuation factor lose |vb| absolute bits
        let d = a.times(&b).frobenius().minus(&a.frobenius().times(&b.frobenius()));
        assert!(d.val_or_prec() >= 60 + vb.min(0));
        assert_eq!(a.plus(&b).frobenius(), a.frobenius().plus(&b.frobenius()));
        assert_eq!(a.frobenius_pow(3), a);
    }
    let x = ctx.gen();
    assert_eq!(x.frobenius(), x.sqr());
}

#[test]
fn unit_inverse_roundtrip() {
    let ctx = unram_ctx(&Gf2Poly::from_u64(0b10011), 80).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let va = rng.gen_range(0..4);
        let a = random_elem(&ctx, &mut rng, va);
        let mut b = random_elem(&ctx, &mut rng, 0);
        while b.valuation() != Some(0) {
            b = random_elem(&ctx, &mut rng, 0);
        }
        assert_eq!(a.times(&b).times(&b.inv().unwrap()), a);
    }
    let z2 = z2_ctx(50);
    let three = z2.from_i64(3);
    assert!(three.times(&three.inv().unwrap()).is_one());
    let half = z2.from_i64(2).inv().unwrap();
    assert_eq!(half.valuation(), Some(-1));
}

#[test]
fn teichmuller_lift_examples() {
    let ctx = unram_ctx(&Gf2Poly::from_u64(0b111), 40).unwrap();
    assert!(teichmuller_lift_element(&ctx, &Gf2Poly::one()).is_one());
    let x = ctx.gen();
    assert_eq!(teichmuller_lift_element(&ctx, &Gf2Poly::from_u64(0b10)), x);
    let w = teichmuller_lift_element(&ctx, &Gf2Poly::from_u64(0b11));
    assert_eq!(w, x.negate().minus(&ctx.one()));
}

#[test]
fn lift_then_reduce_is_identity() {
    let ctx = unram_ctx(&Gf2Poly::from_u64(0b100101), 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let v = Gf2Poly::from_u64(rng.gen_range(0..32));
        let w = teichmuller_lift_element(&ctx, &v);
        assert_eq!(w.residue(), v);
        assert_eq!(teichmuller_lift_element(&ctx, &w.residue()), w);
    }
}

#[test]
fn tower_modulus_examples() {
    let z2 = z2_ctx(5);
    let f2 = BinField::prime();
    let cubic = Poly::new(
        [1u64, 1, 0, 1].iter().map(|&b| f2.elem(Gf2Poly::from_u64(b))).collect(),
        f2.zero(),
    );
    let t = tower_modulus(&cubic, &z2).unwrap();
    let direct = teichmuller_modulus(&Gf2Poly::from_u64(0b1011), 5).unwrap();
    let got: Vec<BigInt> = t.psi.iter().map(|x| trunc(&x.with_ctx(&z2).scaled_coeffs(0)[0], 5)).collect();
    assert_eq!(got, direct);
    assert!(check_tower(&t));

    let quad = Poly::new(vec![f2.one(), f2.one(), f2.one()], f2.zero());
    let t = tower_modulus(&quad, &z2_ctx(30)).unwrap();
    let got: Vec<BigInt> = t.psi.iter().map(|x| x.scaled_coeffs(0)[0].clone()).collect();
    assert_eq!(got, ints(&[1, 1, 1], 30));
}

#[test]
fn degree_one_tower_over_f4() {
    let ctx = unram_ctx(&Gf2Poly::from_u64(0b111), 40).unwrap();
    let f4 = BinField::new(Gf2Poly::from_u64(0b111)).unwrap();
    let c = f4.gen();
    let lin = Poly::new(vec![c.clone(), f4.one()], f4.zero());
    let t = tower_modulus(&lin, &ctx).unwrap();
    let w = teichmuller_lift_element(&ctx, &c.v);
    assert_eq!(t.psi[0].with_ctx(&ctx), w.negate());
    assert_eq!(t.gen().c[0], w);
}

#[test]
fn tower_over_f4_frobenius_orbit() {
    // F_16 over F_4, tower of degree 2 over Z_4
    let ctx = unram_ctx(&Gf2Poly::from_u64(0b111), 48).unwrap();
    let f4 = BinField::new(Gf2Poly::from_u64(0b111)).unwrap();
    let f16 = BinField::new(Gf2Poly::from_u64(0b10011)).unwrap();
    let emb = Embedding::new(f4.clone(), f16.clone()).unwrap();
    let psibar = minimal_polynomial(&f16.gen(), &emb);
    let t = tower_modulus(&psibar, &ctx).unwrap();
    assert!(check_tower(&t));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let c: Vec<Qq> = (0..2).map(|_| random_elem(&ctx, &mut rng, 0)).collect();
        let e = t.from_coeffs(c);
        let c2: Vec<Qq> = (0..2).map(|_| random_elem(&ctx, &mut rng, 0)).collect();
        let f = t.from_coeffs(c2);
        assert_eq!(e.frobenius_power(0), e);
        assert_eq!(e.frobenius_power(4), e);
        assert_eq!(e.times(&f).frobenius(), e.frobenius().times(&f.frobenius()));
        if e.valuation() == Some(0) {
            assert!(e.times(&e.inv().unwrap()).is_one());
        }
    }
    let z = t.gen();
    assert_eq!(z.frobenius(), z.sqr());
    assert_eq!(teichmuller_lift_tower(&z), z);
}
