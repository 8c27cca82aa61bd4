//! Eigenvalue routines.
//!
//! Hermitian spectra go through the real symmetric embedding
//! `[[Re, -Im], [Im, Re]]`, Householder tridiagonalisation and implicit QL.
//! General real spectra use balancing, Hessenberg reduction by stabilised
//! elimination and the Francis double-shift QR iteration.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, RMatrix};
use crate::scalar::{c, Real, C};

const MAX_QL_ITERATIONS: usize = 60;
const MAX_QR_ITERATIONS: usize = 60;

/// Square scratch matrix with 1-based indexing, used by the ported
/// Hessenberg/QR kernels.
struct OneBased<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> OneBased<T> {
    fn from_rmatrix(m: &RMatrix<T>) -> Self {
        let n = m.dim();
        let mut data = vec![T::zero(); (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                data[(i + 1) * (n + 1) + j + 1] = m[(i, j)];
            }
        }
        Self { n, data }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> T {
        self.data[i * (self.n + 1) + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * (self.n + 1) + j] = v;
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, v: T) {
        self.data[i * (self.n + 1) + j] += v;
    }

    fn swap(&mut self, a: (usize, usize), b: (usize, usize)) {
        let ia = a.0 * (self.n + 1) + a.1;
        let ib = b.0 * (self.n + 1) + b.1;
        self.data.swap(ia, ib);
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the Hermitian part of
/// the input is used.
pub fn hermitian_eigenvalues<T: Real>(h: &CMatrix<T>) -> Result<Vec<T>> {
    let n = h.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let half = T::of(0.5);
    let m = 2 * n;
    let mut a = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = (h[(i, j)] + h[(j, i)].conj()).scale(half);
            a[i * m + j] = z.re;
            a[(i + n) * m + j + n] = z.re;
            a[i * m + j + n] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let mut ev = symmetric_eigenvalues(a, m)?;
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    Ok(ev.chunks(2).map(|p| (p[0] + p[1]) * half).collect())
}

/// Eigenvalues of a real symmetric matrix stored row-major (unsorted).
fn symmetric_eigenvalues<T: Real>(mut a: Vec<T>, n: usize) -> Result<Vec<T>> {
    let idx = |i: usize, j: usize| i * n + j;
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];

    // Householder reduction to tridiagonal form.
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = (0..=l).fold(T::zero(), |s, k| s + a[idx(i, k)].abs());
            if scale == T::zero() {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let aik = a[idx(i, k)];
                        a[idx(j, k)] -= f * e[k] + g * aik;
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }

    // Implicit QL on the tridiagonal matrix.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::EigenSolverFailed);
            }
            let mut g = (d[l + 1] - d[l]) / (T::of(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + sign(r, g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::of(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(d)
}

fn balance<T: Real>(a: &mut OneBased<T>) {
    let radix = T::of(2.0);
    let sqrdx = radix * radix;
    let n = a.n;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 1..=n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < T::of(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 1..=n {
                        let v = a.get(i, j) * g;
                        a.set(i, j, v);
                    }
                    for j in 1..=n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
    }
}

fn hessenberg<T: Real>(a: &mut OneBased<T>) {
    let n = a.n;
    for m in 2..n {
        let mut x = T::zero();
        let mut i = m;
        for j in m..=n {
            if a.get(j, m - 1).abs() > x.abs() {
                x = a.get(j, m - 1);
                i = j;
            }
        }
        if i != m {
            for j in m - 1..=n {
                a.swap((i, j), (m, j));
            }
            for j in 1..=n {
                a.swap((j, i), (j, m));
            }
        }
        if x != T::zero() {
            for i in m + 1..=n {
                let mut y = a.get(i, m - 1);
                if y != T::zero() {
                    y /= x;
                    a.set(i, m - 1, y);
                    for j in m..=n {
                        let v = a.get(m, j);
                        a.add(i, j, -y * v);
                    }
                    for j in 1..=n {
                        let v = a.get(j, i);
                        a.add(j, m, y * v);
                    }
                }
            }
        }
    }
    for i in 3..=n {
        for j in 1..i - 1 {
            a.set(i, j, T::zero());
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hessenberg_qr<T: Real>(a: &mut OneBased<T>) -> Result<Vec<C<T>>> {
    let n = a.n as isize;
    let mut wr = vec![T::zero(); a.n + 1];
    let mut wi = vec![T::zero(); a.n + 1];
    let mut anorm = T::zero();
    for i in 1..=a.n {
        for j in (i.max(2) - 1)..=a.n {
            anorm += a.get(i, j).abs();
        }
    }
    let g = |a: &OneBased<T>, i: isize, j: isize| a.get(i as usize, j as usize);
    let mut nn = n;
    let mut t = T::zero();
    let (mut p, mut q, mut r) = (T::zero(), T::zero(), T::zero());
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = g(a, l - 1, l - 1).abs() + g(a, l, l).abs();
                if s == T::zero() {
                    s = anorm;
                }
                if g(a, l, l - 1).abs() + s == s {
                    a.set(l as usize, (l - 1) as usize, T::zero());
                    break;
                }
                l -= 1;
            }
            x = g(a, nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = T::zero();
                nn -= 1;
            } else {
                y = g(a, nn - 1, nn - 1);
                w = g(a, nn, nn - 1) * g(a, nn - 1, nn);
                if l == nn - 1 {
                    p = T::of(0.5) * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    let (i1, i2) = ((nn - 1) as usize, nn as usize);
                    if q >= T::zero() {
                        z = p + sign(z, p);
                        wr[i1] = x + z;
                        wr[i2] = x + z;
                        if z != T::zero() {
                            wr[i2] = x - w / z;
                        }
                        wi[i1] = T::zero();
                        wi[i2] = T::zero();
                    } else {
                        wr[i1] = x + p;
                        wr[i2] = x + p;
                        wi[i1] = -z;
                        wi[i2] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITERATIONS {
                        return Err(Error::EigenSolverFailed);
                    }
                    if its == 10 || its == 20 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a.add(i as usize, i as usize, -x);
                        }
                        let s = g(a, nn, nn - 1).abs() + g(a, nn - 1, nn - 2).abs();
                        x = T::of(0.75) * s;
                        y = x;
                        w = T::of(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    while m >= l {
                        z = g(a, m, m);
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / g(a, m + 1, m) + g(a, m, m + 1);
                        q = g(a, m + 1, m + 1) - z - r - s;
                        r = g(a, m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = g(a, m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (g(a, m - 1, m - 1).abs() + z.abs() + g(a, m + 1, m + 1).abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a.set(i as usize, (i - 2) as usize, T::zero());
                        if i != m + 2 {
                            a.set(i as usize, (i - 3) as usize, T::zero());
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = g(a, k, k - 1);
                            q = g(a, k + 1, k - 1);
                            r = T::zero();
                            if k != nn - 1 {
                                r = g(a, k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    let v = -g(a, k, k - 1);
                                    a.set(k as usize, (k - 1) as usize, v);
                                }
                            } else {
                                a.set(k as usize, (k - 1) as usize, -s * x);
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = g(a, k, j) + q * g(a, k + 1, j);
                                if k != nn - 1 {
                                    p += r * g(a, k + 2, j);
                                    a.add((k + 2) as usize, j as usize, -p * z);
                                }
                                a.add((k + 1) as usize, j as usize, -p * y);
                                a.add(k as usize, j as usize, -p * x);
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * g(a, i, k) + y * g(a, i, k + 1);
                                if k != nn - 1 {
                                    p += z * g(a, i, k + 2);
                                    a.add(i as usize, (k + 2) as usize, -p * r);
                                }
                                a.add(i as usize, (k + 1) as usize, -p * q);
                                a.add(i as usize, k as usize, -p);
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=a.n).map(|i| c(wr[i], wi[i])).collect())
}

/// Eigenvalues of a general real square matrix, unsorted.
pub fn real_eigenvalues<T: Real>(m: &RMatrix<T>) -> Result<Vec<C<T>>> {
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if m.dim() == 0 {
        return Ok(Vec::new());
    }
    let mut a = OneBased::from_rmatrix(m);
    balance(&mut a);
    hessenberg(&mut a);
    hessenberg_qr(&mut a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;

    fn sorted(mut v: Vec<C<f64>>) -> Vec<C<f64>> {
        v.sort_by(|a, b| {
            b.re.partial_cmp(&a.re)
                .unwrap()
                .then(b.im.partial_cmp(&a.im).unwrap())
        });
        v
    }

    #[test]
    fn hermitian_pauli_y_spectrum() {
        let [_, y, _] = crate::matrix::pauli::<f64>();
        let ev = hermitian_eigenvalues(&y).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_diagonal_spectrum() {
        let d = CMatrix::diagonal(&[cr(3.0), cr(-1.0), cr(0.5), cr(2.0)]);
        let ev = hermitian_eigenvalues(&d).unwrap();
        assert_eq!(ev, vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn hermitian_trace_and_frobenius_preserved() {
        let h = CMatrix::from_fn(6, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j { 0.3 * (a - b) } else if i > j { 0.3 * (b - a) } else { 0.0 };
            crate::scalar::c(1.0 / (1.0 + a + b), im)
        });
        let ev = hermitian_eigenvalues(&h).unwrap();
        let tr: f64 = ev.iter().sum();
        let fro: f64 = ev.iter().map(|x| x * x).sum();
        assert!((tr - h.trace().re).abs() < 1e-12);
        assert!((fro - h.frobenius_norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let m = RMatrix::from_vec(2, vec![0.0, -2.0, 2.0, 0.0]).unwrap();
        let ev = sorted(real_eigenvalues(&m).unwrap());
        assert!((ev[0] - crate::scalar::c(0.0, 2.0)).norm() < 1e-14);
        assert!((ev[1] - crate::scalar::c(0.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = RMatrix::from_vec(3, vec![6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let ev = sorted(real_eigenvalues(&m).unwrap());
        for (z, want) in ev.iter().zip([3.0, 2.0, 1.0]) {
            assert!((z.re - want).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn larger_matrix_trace_and_determinant_consistency() {
        let n = 12;
        let m = RMatrix::from_fn(n, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 0.5 } else { 0.0 });
        let ev = real_eigenvalues(&m).unwrap();
        let tr: f64 = (0..n).map(|i| m[(i, i)]).sum();
        let sum: C<f64> = ev.iter().sum();
        assert!((sum.re - tr).abs() < 1e-9 && sum.im.abs() < 1e-9);
        // trace of M^2 equals sum of squared eigenvalues
        let tr2: f64 = (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).map(|(i, k)| m[(i, k)] * m[(k, i)]).sum();
        let sum2: C<f64> = ev.iter().map(|z| z * z).sum();
        assert!((sum2.re - tr2).abs() < 1e-8 && sum2.im.abs() < 1e-8);
    }
}
