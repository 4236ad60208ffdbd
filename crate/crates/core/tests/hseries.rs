use famzeta::ff2::Gf2Poly;
use famzeta::hseries::{SeriesRing, SeriesShape};
use famzeta::padic::{unram_ctx, Qq};
use famzeta::Poly;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn rand_poly(ctx: &Arc<famzeta::padic::UnramCtx>, rng: &mut ChaCha8Rng, deg: usize) -> Poly<Qq> {
    let a = ctx.degree();
    Poly::new(
        (0..=deg).map(|_| ctx.from_coeffs(0, (0..a).map(|_| BigInt::from(rng.gen::<u64>())).collect())).collect(),
        ctx.zero(),
    )
}

#[test]
fn products_match_polynomial_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (mq, hbits) in [(0b11u64, vec![1i64, 1]), (0b111, vec![1, 1, 1]), (0b1011, vec![3, 0, 5, 1]), (0b11, vec![0, 1])] {
        let w = 70u64;
        let ctx = unram_ctx(&Gf2Poly::from_u64(mq), w as i64).unwrap();
        let hb = Poly::new(hbits.iter().map(|&c| ctx.from_i64(c)).collect(), ctx.zero());
        let shape = SeriesShape::new(&hb, &ctx);
        let ring: SeriesRing = shape.ring(w);
        for _ in 0..10 {
            let (dp, dq) = (rng.gen_range(0..12), rng.gen_range(0..12));
            let p = rand_poly(&ctx, &mut rng, dp);
            let q = rand_poly(&ctx, &mut rng, dq);
            let (k, m) = (rng.gen_range(-5..5), rng.gen_range(-5..5));
            let sp = ring.from_digits(&shape.digits_of(&p), k);
            let sq = ring.from_digits(&shape.digits_of(&q), m);
            let want = ring.from_digits(&shape.digits_of(&p.times(&q)), k + m);
            assert_eq!(ring.mul(&sp, &sq), want);
            let sum = ring.from_digits(&shape.digits_of(&p.plus(&q)), 0);
            assert_eq!(ring.add(&ring.from_poly(&p), &ring.from_poly(&q)), sum);
            assert_eq!(ring.sub(&sum, &ring.from_poly(&q)), ring.from_poly(&p));
            assert_eq!(ring.nonnegative_part(&ring.from_poly(&p), &ctx), p);
            let hp = p.times(&hb.pow(2));
            assert_eq!(ring.nonnegative_part(&ring.shift(&ring.from_poly(&p), 2), &ctx), hp);
        }
    }
}
