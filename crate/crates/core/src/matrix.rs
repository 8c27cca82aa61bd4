//! Dense square matrices over complex and real scalars.
//!
//! Everything in the library is an `n x n` operator on a small Hilbert space,
//! so a flat row-major `Vec` is all the storage we need.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, i_unit, Real, C};

/// Default relative tolerance for Hermiticity and similar structural checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Dense `n x n` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C::one();
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails on a non-square length
    /// or non-finite entries.
    pub fn from_vec(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::BadShape {
                rows: dim,
                cols: data.len().checked_div(dim).unwrap_or(0),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::BadShape {
                rows: dim,
                cols: bad.len(),
            });
        }
        Self::from_vec(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn diagonal(values: &[C<T>]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: C<T>, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * s;
        }
    }

    /// Matrix product. Zero entries of the left factor are skipped, so a
    /// banded left operand costs `O(n^2 * bandwidth)`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C::zero(); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let b_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(b_row) {
                    *o += a * *b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `tr(self * rhs)` in `O(n^2)`.
    pub fn trace_of_product(&self, rhs: &Self) -> C<T> {
        assert_eq!(self.dim, rhs.dim, "trace_of_product dimension mismatch");
        let n = self.dim;
        let mut acc = C::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * rhs.data[j * n + i];
            }
        }
        acc
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) + &rhs.matmul(self)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Maximum entrywise `|M - M^dagger|`.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermiticity within `tol` relative to the largest entry.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_deviation() <= tol * T::one().max(self.max_abs())
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::of(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()).scale(half))
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.dim, v.len(), "apply dimension mismatch");
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C<T>], v: &[C<T>]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// Real square matrix from the real parts; the largest discarded
    /// imaginary part is returned alongside.
    pub fn split_real(&self) -> (RMatrix<T>, T) {
        let residue = self.data.iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
        let re = RMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.re).collect(),
        };
        (re, residue)
    }

    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| C::new(U::of(z.re.to_f64_lossy()), U::of(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<T: Real> $trait<&CMatrix<T>> for &CMatrix<T> {
            type Output = CMatrix<T>;
            fn $method(self, rhs: &CMatrix<T>) -> CMatrix<T> {
                assert_eq!(self.dim, rhs.dim, "elementwise dimension mismatch");
                CMatrix {
                    dim: self.dim,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a $op *b).collect(),
                }
            }
        }
        impl<T: Real> $trait<CMatrix<T>> for CMatrix<T> {
            type Output = CMatrix<T>;
            fn $method(self, rhs: CMatrix<T>) -> CMatrix<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl<T: Real> AddAssign<&CMatrix<T>> for CMatrix<T> {
    fn add_assign(&mut self, rhs: &CMatrix<T>) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
    }
}

impl<T: Real> SubAssign<&CMatrix<T>> for CMatrix<T> {
    fn sub_assign(&mut self, rhs: &CMatrix<T>) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
    }
}

impl<T: Real> Mul<&CMatrix<T>> for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul<CMatrix<T>> for CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: CMatrix<T>) -> CMatrix<T> {
        self.matmul(&rhs)
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        self.scale_real(-T::one())
    }
}

/// Hilbert-Schmidt inner product `tr(A^dagger B)`.
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<C<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let acc = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(C::zero(), |acc, (x, y)| acc + x.conj() * *y);
    Ok(acc)
}

/// A matrix that passed the Hermiticity check.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, T::of(DEFAULT_TOL))
    }

    pub fn with_tolerance(matrix: CMatrix<T>, tol: T) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        if !matrix.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                deviation: matrix.hermiticity_deviation().to_f64_lossy(),
            });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix whose Hermiticity follows from how it was computed.
    pub(crate) fn new_unchecked(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    /// Builds from real entries (always Hermitian if the input is symmetric).
    pub fn from_real_diagonal(values: &[T]) -> Self {
        Self {
            matrix: CMatrix::diagonal(&values.iter().map(|v| cr(*v)).collect::<Vec<_>>()),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim),
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Real linear combination of Hermitian operators stays Hermitian.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        crate::linalg::eig::hermitian_eigenvalues(&self.matrix)
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> Result<T> {
        let ev = self.eigenvalues()?;
        Ok(ev.iter().fold(T::zero(), |m, x| m.max(x.abs())))
    }
}

impl<T: Real> AsRef<CMatrix<T>> for HermitianOperator<T> {
    fn as_ref(&self) -> &CMatrix<T> {
        &self.matrix
    }
}

/// Pauli matrices `(sigma_x, sigma_y, sigma_z)`, with `sigma_z = diag(1, -1)`.
pub fn pauli<T: Real>() -> [CMatrix<T>; 3] {
    let (o, l, i) = (C::zero(), C::one(), i_unit::<T>());
    [
        CMatrix::from_vec(2, vec![o, l, l, o]).unwrap(),
        CMatrix::from_vec(2, vec![o, -i, i, o]).unwrap(),
        CMatrix::from_vec(2, vec![l, o, o, -l]).unwrap(),
    ]
}

/// Dense `n x n` real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix<T: Real> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> RMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::BadShape {
                rows: dim,
                cols: data.len().checked_div(dim).unwrap_or(0),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.dim, v.len(), "matvec dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn to_complex(&self) -> CMatrix<T> {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| cr(*x)).collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for RMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for RMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
