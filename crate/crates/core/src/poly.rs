use crate::scalar::Scalar;

/// Dense univariate polynomial, low degree first, no stored leading zeros.
///
/// `zero` is a zero element of the coefficient ring; it carries whatever
/// context the ring needs so that the zero polynomial can still build
/// coefficients.
#[derive(Clone, Debug)]
pub struct Poly<S> {
    c: Vec<S>,
    zero: S,
}

impl<S: Scalar> PartialEq for Poly<S> {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut c: Vec<S>, zero: S) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c, zero }
    }

    pub fn from_coeffs(c: Vec<S>) -> Self {
        let zero = c.first().expect("need at least one coefficient").zero_like();
        Self::new(c, zero)
    }

    pub fn zero(zero: S) -> Self {
        Poly { c: Vec::new(), zero }
    }

    pub fn constant(k: S) -> Self {
        let zero = k.zero_like();
        Self::new(vec![k], zero)
    }

    pub fn monomial(k: S, e: usize) -> Self {
        let zero = k.zero_like();
        let mut c = vec![zero.clone(); e];
        c.push(k);
        Self::new(c, zero)
    }

    /// The variable itself.
    pub fn x(zero: S) -> Self {
        Self::monomial(zero.one_like(), 1)
    }

    pub fn ring_zero(&self) -> &S {
        &self.zero
    }

    pub fn coeffs(&self) -> &[S] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.c
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> S {
        self.c.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn lead(&self) -> Option<&S> {
        self.c.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|l| l.is_one())
    }

    pub fn map<T: Scalar>(&self, zero: T, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.c.iter().map(f).collect(), zero)
    }

    pub fn plus(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a.plus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(c, self.zero.clone())
    }

    pub fn negate(&self) -> Self {
        Self::new(self.c.iter().map(|a| a.negate()).collect(), self.zero.clone())
    }

    pub fn minus(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a.minus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.negate(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(c, self.zero.clone())
    }

    pub fn times(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.zero.clone());
        }
        let mut c = vec![self.zero.clone(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].plus(&a.times(b));
            }
        }
        Self::new(c, self.zero.clone())
    }

    /// Product truncated modulo `x^n`.
    pub fn times_trunc(&self, o: &Self, n: usize) -> Self {
        let mut c = vec![self.zero.clone(); n.min(self.c.len() + o.c.len())];
        for (i, a) in self.c.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n - i) {
                c[i + j] = c[i + j].plus(&a.times(b));
            }
        }
        Self::new(c, self.zero.clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::new(self.c.iter().map(|a| a.times(k)).collect(), self.zero.clone())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.zero.clone(); k];
        c.extend(self.c.iter().cloned());
        Self::new(c, self.zero.clone())
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.c.iter().take(n).cloned().collect(), self.zero.clone())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(self.zero.one_like());
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a.times(&a.from_i64_like(i as i64)))
            .collect();
        Self::new(c, self.zero.clone())
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = self.zero.clone();
        for a in self.c.iter().rev() {
            acc = acc.times(x).plus(a);
        }
        acc
    }

    /// Substitute `x -> x^k`.
    pub fn stretch(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.zero.clone(); (self.c.len() - 1) * k + 1];
        for (i, a) in self.c.iter().enumerate() {
            c[i * k] = a.clone();
        }
        Self::new(c, self.zero.clone())
    }

    /// Division with remainder by a divisor whose leading coefficient is a unit.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let li = d.c[dd].inv().expect("leading coefficient is not a unit");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(self.zero.clone()), self.clone());
        }
        let mut q = vec![self.zero.clone(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let t = r[i].times(&li);
            for (j, dj) in d.c.iter().enumerate() {
                r[i - dd + j] = r[i - dd + j].minus(&t.times(dj));
            }
            q[i - dd] = t;
        }
        r.truncate(dd);
        (Self::new(q, self.zero.clone()), Self::new(r, self.zero.clone()))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Exact quotient; panics when the division leaves a remainder.
    pub fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

impl<S: Scalar> Scalar for Poly<S> {
    fn zero_like(&self) -> Self {
        Self::zero(self.zero.clone())
    }
    fn one_like(&self) -> Self {
        Self::constant(self.zero.one_like())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        Poly::plus(self, o)
    }
    fn minus(&self, o: &Self) -> Self {
        Poly::minus(self, o)
    }
    fn times(&self, o: &Self) -> Self {
        Poly::times(self, o)
    }
    fn negate(&self) -> Self {
        Poly::negate(self)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Self::constant(self.zero.from_i64_like(n))
    }
    fn inv(&self) -> Option<Self> {
        if self.c.len() == 1 {
            self.c[0].inv().map(Self::constant)
        } else {
            None
        }
    }
    fn from_ratio_like(&self, n: i64, d: i64) -> Self {
        Self::constant(self.zero.from_ratio_like(n, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn p(c: &[i64]) -> Poly<BigRational> {
        Poly::new(c.iter().map(|&x| q(x)).collect(), q(0))
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(a.times(&b), p(&[-1, 0, 1]));
        assert_eq!(a.minus(&a).degree(), None);
        assert_eq!(p(&[0, 0, 3]).derivative(), p(&[0, 6]));
        assert_eq!(p(&[1, 2, 3]).eval(&q(2)), q(17));
        assert_eq!(p(&[1, 1]).stretch(3), p(&[1, 0, 0, 1]));
    }

    #[test]
    fn division() {
        let a = p(&[5, 0, 3, 1]);
        let d = p(&[1, 2]);
        let (qq, r) = a.divrem(&d);
        assert_eq!(qq.times(&d).plus(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn nested_scalar() {
        let inner = p(&[0, 1]);
        let outer = Poly::new(vec![inner.clone(), inner.one_like()], inner.zero_like());
        let sq = outer.times(&outer);
        assert_eq!(sq.coeff(0), p(&[0, 0, 1]));
        assert_eq!(sq.coeff(1), p(&[0, 2]));
    }
}
