use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, RMatrix};
use crate::scalar::{Real, C};

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve_complex<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.dim(),
        });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == T::zero() || !pmax.is_finite() {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
                let t = x[(k, j)];
                x[(k, j)] = x[(p, j)];
                x[(p, j)] = t;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= f * v;
            }
            for j in 0..n {
                let v = x[(k, j)];
                x[(i, j)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[(k, k)];
        for j in 0..n {
            let mut acc: C<T> = x[(k, j)];
            for m in k + 1..n {
                acc -= lu[(k, m)] * x[(m, j)];
            }
            x[(k, j)] = acc / pivot;
        }
    }
    Ok(x)
}

/// Outcome of a rank-revealing solve of `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum RankRevealingSolve<T> {
    Unique(Vec<T>),
    Deficient { rank: usize },
}

/// Gaussian elimination with complete pivoting. Pivots below
/// `tol * max|A|` count as zero and make the system rank deficient.
pub fn solve_real_rank_revealing<T: Real>(
    a: &RMatrix<T>,
    b: &[T],
    tol: T,
) -> Result<RankRevealingSolve<T>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let scale = a.max_abs();
    if scale == T::zero() {
        return Ok(RankRevealingSolve::Deficient { rank: 0 });
    }
    let threshold = tol * scale;
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut best = (k, k, T::zero());
        for i in k..n {
            for j in k..n {
                let v = m[(i, j)].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= threshold {
            return Ok(RankRevealingSolve::Deficient { rank: k });
        }
        let (pi, pj, _) = best;
        if pi != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(pi, j)];
                m[(pi, j)] = t;
            }
            rhs.swap(k, pi);
        }
        if pj != k {
            for i in 0..n {
                let t = m[(i, k)];
                m[(i, k)] = m[(i, pj)];
                m[(i, pj)] = t;
            }
            col_perm.swap(k, pj);
        }
        let pivot = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
            let v = rhs[k];
            rhs[i] -= f * v;
        }
    }
    let mut y = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for j in k + 1..n {
            acc -= m[(k, j)] * y[j];
        }
        y[k] = acc / m[(k, k)];
    }
    let mut x = vec![T::zero(); n];
    for (k, &orig) in col_perm.iter().enumerate() {
        x[orig] = y[k];
    }
    Ok(RankRevealingSolve::Unique(x))
}
