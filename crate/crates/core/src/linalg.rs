use crate::poly::Poly;
use crate::scalar::Scalar;

/// Row-major dense matrix.
pub type Mat<S> = Vec<Vec<S>>;

pub fn mat_zero<S: Scalar>(z: &S, r: usize, c: usize) -> Mat<S> {
    vec![vec![z.zero_like(); c]; r]
}

pub fn mat_identity<S: Scalar>(z: &S, n: usize) -> Mat<S> {
    let mut m = mat_zero(z, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = z.one_like();
    }
    m
}

pub fn mat_mul<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let z = b[0][0].zero_like();
    let mut out = mat_zero(&z, n, m);
    for i in 0..n {
        for (l, brow) in b.iter().enumerate().take(k) {
            let x = &a[i][l];
            if x.is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].plus(&x.times(&brow[j]));
            }
        }
    }
    out
}

pub fn mat_add<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.plus(v)).collect())
        .collect()
}

pub fn mat_sub<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.minus(v)).collect())
        .collect()
}

pub fn mat_scale<S: Scalar>(a: &Mat<S>, k: &S) -> Mat<S> {
    a.iter().map(|r| r.iter().map(|x| x.times(k)).collect()).collect()
}

pub fn mat_map<S, T>(a: &Mat<S>, f: impl Fn(&S) -> T) -> Mat<T> {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

/// Characteristic polynomial `det(xI - A)` by Berkowitz's division-free
/// algorithm. Returned low degree first.
pub fn charpoly_berkowitz<S: Scalar>(a: &Mat<S>) -> Vec<S> {
    let n = a.len();
    assert!(n > 0);
    let one = a[0][0].one_like();
    // v holds coefficients high degree first
    let mut v = vec![one.clone(), a[0][0].negate()];
    for r in 1..n {
        let mut t = Vec::with_capacity(r + 2);
        t.push(one.clone());
        t.push(a[r][r].negate());
        let mut c: Vec<S> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 2..=r + 1 {
            let mut s = one.zero_like();
            for (j, cj) in c.iter().enumerate() {
                s = s.plus(&a[r][j].times(cj));
            }
            t.push(s.negate());
            c = (0..r)
                .map(|i| {
                    let mut s = one.zero_like();
                    for (j, cj) in c.iter().enumerate() {
                        s = s.plus(&a[i][j].times(cj));
                    }
                    s
                })
                .collect();
        }
        let mut nv = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut s = one.zero_like();
            for j in 0..=i.min(r) {
                s = s.plus(&t[i - j].times(&v[j]));
            }
            nv.push(s);
        }
        v = nv;
    }
    v.reverse();
    v
}

pub fn det<S: Scalar>(a: &Mat<S>) -> S {
    let n = a.len();
    let cp = charpoly_berkowitz(a);
    if n % 2 == 0 {
        cp[0].clone()
    } else {
        cp[0].negate()
    }
}

/// Inverse by Gauss-Jordan elimination. `key` ranks pivot candidates (smaller
/// is better, `None` means unusable).
pub fn mat_inverse_by<S: Scalar>(a: &Mat<S>, key: impl Fn(&S) -> Option<i64>) -> Option<Mat<S>> {
    let n = a.len();
    let z = a[0][0].zero_like();
    let mut m: Mat<S> = a.clone();
    let mut inv = mat_identity(&z, n);
    for col in 0..n {
        let piv = (col..n)
            .filter_map(|r| key(&m[r][col]).map(|k| (k, r)))
            .min()?
            .1;
        m.swap(col, piv);
        inv.swap(col, piv);
        let pinv = m[col][col].inv()?;
        for j in 0..n {
            m[col][j] = m[col][j].times(&pinv);
            inv[col][j] = inv[col][j].times(&pinv);
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                let a1 = m[col][j].times(&f);
                m[r][j] = m[r][j].minus(&a1);
                let b1 = inv[col][j].times(&f);
                inv[r][j] = inv[r][j].minus(&b1);
            }
        }
    }
    Some(inv)
}

pub fn mat_inverse<S: Scalar>(a: &Mat<S>) -> Option<Mat<S>> {
    mat_inverse_by(a, |x| if x.inv().is_some() { Some(0) } else { None })
}

/// Sylvester matrix of `p` (degree m) and `q` (degree n), rows high degree first.
pub fn sylvester<S: Scalar>(p: &Poly<S>, q: &Poly<S>) -> Mat<S> {
    let m = p.degree().expect("zero polynomial");
    let n = q.degree().expect("zero polynomial");
    let z = p.ring_zero().clone();
    let size = m + n;
    let mut s = mat_zero(&z, size, size);
    for i in 0..n {
        for k in 0..=m {
            s[i][i + k] = p.coeff(m - k);
        }
    }
    for i in 0..m {
        for k in 0..=n {
            s[n + i][i + k] = q.coeff(n - k);
        }
    }
    s
}

/// `Res(p, q)` as the determinant of the Sylvester matrix.
pub fn resultant<S: Scalar>(p: &Poly<S>, q: &Poly<S>) -> S {
    let m = p.degree().expect("zero polynomial");
    let n = q.degree().expect("zero polynomial");
    if m == 0 {
        return p.coeff(0).pow_u(n as u64);
    }
    if n == 0 {
        return q.coeff(0).pow_u(m as u64);
    }
    det(&sylvester(p, q))
}

/// Returns `(res, a, b)` with `a*p + b*q = res = Res(p, q)`, deg a < deg q,
/// deg b < deg p, computed division-free from cofactors.
pub fn bezout_resultant<S: Scalar>(p: &Poly<S>, q: &Poly<S>) -> (S, Poly<S>, Poly<S>) {
    let m = p.degree().expect("zero polynomial");
    let n = q.degree().expect("zero polynomial");
    let z = p.ring_zero().clone();
    if m == 0 || n == 0 {
        let res = resultant(p, q);
        // res = p0^n (m = 0) or q0^m (n = 0)
        if m == 0 {
            let a = Poly::constant(p.coeff(0).pow_u(n.saturating_sub(1) as u64));
            let a = if n == 0 { Poly::constant(z.one_like()) } else { a };
            return (res, a, Poly::zero(z));
        }
        let b = Poly::constant(q.coeff(0).pow_u((m - 1) as u64));
        return (res, Poly::zero(z), b);
    }
    let size = m + n;
    // column c < n is x^c p, column n + c is x^c q; rows are coefficient degrees
    let mut mm = mat_zero(&z, size, size);
    for c in 0..n {
        for k in 0..=m {
            mm[c + k][c] = p.coeff(k);
        }
    }
    for c in 0..m {
        for k in 0..=n {
            mm[c + k][n + c] = q.coeff(k);
        }
    }
    let mut w = Vec::with_capacity(size);
    for k in 0..size {
        let minor: Mat<S> = (1..size)
            .map(|r| (0..size).filter(|&c| c != k).map(|c| mm[r][c].clone()).collect())
            .collect();
        let d = if size == 1 { z.one_like() } else { det(&minor) };
        w.push(if k % 2 == 0 { d } else { d.negate() });
    }
    let a = Poly::new(w[..n].to_vec(), z.clone());
    let b = Poly::new(w[n..].to_vec(), z.clone());
    let dm = a.times(p).plus(&b.times(q)).coeff(0);
    let res = resultant(p, q);
    if dm == res {
        (res, a, b)
    } else {
        (res, a.negate(), b.negate())
    }
}
