use famzeta::ff2::{BinField, FfPoly, Gf2Poly};
use famzeta::oracle::*;
use famzeta::poly::Poly;
use num_bigint::BigInt;

fn poly(f: &std::sync::Arc<BinField>, bits: &[u64]) -> FfPoly {
    Poly::new(bits.iter().map(|&b| f.elem(Gf2Poly::from_u64(b))).collect(), f.zero())
}

#[test]
fn hand_counts() {
    let f2 = BinField::prime();
    assert_eq!(count_points_naive(&poly(&f2, &[1]), &poly(&f2, &[0, 0, 0, 1]), &f2).unwrap(), 3);
    assert_eq!(count_points_naive(&poly(&f2, &[0, 1]), &poly(&f2, &[0, 1, 1, 1]), &f2).unwrap(), 2);
    let f4 = BinField::smallest_of_degree(2);
    assert_eq!(count_points_naive(&poly(&f4, &[1]), &poly(&f4, &[0, 0, 0, 1]), &f4).unwrap(), 9);
}

#[test]
fn zeta_from_counts_examples() {
    let two = BigInt::from(2);
    assert_eq!(zeta_from_counts(&[3], 1, &two).unwrap().b, vec![1.into(), 0.into(), 2.into()]);
    assert_eq!(zeta_from_counts(&[2], 1, &two).unwrap().b, vec![1.into(), (-1).into(), 2.into()]);
    assert!(zeta_from_counts(&[9], 1, &two).is_err());
}

#[test]
fn count_table_extends_the_field() {
    let f2 = BinField::prime();
    let t = count_table(&poly(&f2, &[1]), &poly(&f2, &[0, 0, 0, 1]), 2).unwrap();
    assert_eq!(t, vec![3, 9]);
}

#[test]
fn too_large_field_is_refused() {
    let big = BinField::smallest_of_degree(25);
    let r = count_points_naive(&poly(&big, &[1]), &poly(&big, &[0, 0, 0, 1]), &big);
    assert_eq!(r, Err(OracleError::TooLarge(25)));
}
