use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Zero};

/// Commutative ring element that can manufacture constants of its own ring.
///
/// Elements of context-carrying rings (2-adic extensions, towers, finite
/// fields) cannot produce `0` or `1` out of thin air, so constants are built
/// from an existing element with the `*_like` constructors.
pub trait Scalar: Clone + Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    /// Multiplicative inverse, or `None` when `self` is not a unit.
    fn inv(&self) -> Option<Self>;

    fn from_ratio_like(&self, n: i64, d: i64) -> Self {
        let d = self
            .from_i64_like(d)
            .inv()
            .expect("denominator is not a unit of this ring");
        self.from_i64_like(n).times(&d)
    }

    fn is_one(&self) -> bool {
        self.minus(&self.one_like()).is_zero()
    }

    fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

fn float_scalar_inv<T: Float>(x: T) -> Option<T> {
    if x == T::zero() {
        None
    } else {
        Some(x.recip())
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn zero_like(&self) -> Self {
                <$t as Zero>::zero()
            }
            fn one_like(&self) -> Self {
                <$t as One>::one()
            }
            fn is_zero(&self) -> bool {
                *self == 0.0
            }
            fn plus(&self, o: &Self) -> Self {
                self + o
            }
            fn minus(&self, o: &Self) -> Self {
                self - o
            }
            fn times(&self, o: &Self) -> Self {
                self * o
            }
            fn negate(&self) -> Self {
                -self
            }
            fn from_i64_like(&self, n: i64) -> Self {
                n as $t
            }
            fn inv(&self) -> Option<Self> {
                float_scalar_inv(*self)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ratio() {
        let one = BigRational::one();
        let r = one.from_ratio_like(9, 11);
        assert_eq!(r, BigRational::new(9.into(), 11.into()));
        assert_eq!(r.inv().unwrap().times(&r), one);
    }

    #[test]
    fn float_pow() {
        assert_eq!(2.0f64.pow_u(10), 1024.0);
        assert!(0.0f32.inv().is_none());
    }
}
