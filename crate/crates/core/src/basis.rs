//! Orthonormal Hermitian operator basis built from generalized Gell-Mann
//! matrices.

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, HermitianOperator};
use crate::scalar::{c, cr, Real, C};

/// Hilbert-Schmidt orthonormal Hermitian basis `{sigma_0, ..., sigma_{n^2-1}}`
/// with `sigma_0 = I / sqrt(n)`; the remaining elements are trace free.
///
/// Ordering of the trace-free elements: symmetric off-diagonal pairs
/// `(j, k)` with `j < k` in row-major order, then the antisymmetric pairs in
/// the same order, then the diagonal elements `l = 1, ..., n - 1`.
#[derive(Clone, Debug)]
pub struct OperatorBasis<T: Real> {
    dim: usize,
    elements: Vec<HermitianOperator<T>>,
    // integer-entry generators with sigma_j = raw_j / sqrt(raw_norm_sq_j)
    raw: Vec<CMatrix<T>>,
    raw_norm_sq: Vec<T>,
}

/// What a trace-free basis element is made of; used for labelling output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Identity,
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
    Diagonal(usize),
}

impl<T: Real> OperatorBasis<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements, `n^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of trace-free elements, `n^2 - 1`.
    pub fn bloch_len(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn element(&self, j: usize) -> &HermitianOperator<T> {
        &self.elements[j]
    }

    pub fn elements(&self) -> &[HermitianOperator<T>] {
        &self.elements
    }

    pub fn trace_free(&self) -> &[HermitianOperator<T>] {
        &self.elements[1..]
    }

    /// Unnormalised generator with integer entries and its squared
    /// Hilbert-Schmidt norm; `sigma_j = raw / sqrt(norm_sq)`. Lets callers
    /// postpone the irrational normalisation to a single final division.
    pub fn raw_element(&self, j: usize) -> (&CMatrix<T>, T) {
        (&self.raw[j], self.raw_norm_sq[j])
    }

    pub fn kind(&self, j: usize) -> ElementKind {
        let n = self.dim;
        let pairs = n * (n - 1) / 2;
        match j {
            0 => ElementKind::Identity,
            j if j <= pairs => {
                let (a, b) = pair_at(n, j - 1);
                ElementKind::Symmetric(a, b)
            }
            j if j <= 2 * pairs => {
                let (a, b) = pair_at(n, j - 1 - pairs);
                ElementKind::Antisymmetric(a, b)
            }
            j => ElementKind::Diagonal(j - 2 * pairs),
        }
    }

    /// Coordinates `tr(sigma_j A)` over the full basis.
    pub fn coordinates(&self, a: &CMatrix<T>) -> Result<Vec<C<T>>> {
        crate::matrix::check_dim(self.dim, a.dim())?;
        Ok(self
            .elements
            .iter()
            .map(|s| s.matrix().trace_of_product(a))
            .collect())
    }

    /// `sum_j coeffs[j] sigma_j` over the full basis.
    pub fn reconstruct(&self, coeffs: &[C<T>]) -> Result<CMatrix<T>> {
        crate::matrix::check_dim(self.len(), coeffs.len())?;
        let mut out = CMatrix::zeros(self.dim);
        for (s, k) in self.elements.iter().zip(coeffs) {
            out.axpy(*k, s.matrix());
        }
        Ok(out)
    }

    /// Real combination of the trace-free elements, `sum_j x_j sigma_{j+1}`.
    pub fn combine_trace_free(&self, coeffs: &[T]) -> Result<HermitianOperator<T>> {
        crate::matrix::check_dim(self.bloch_len(), coeffs.len())?;
        let mut out = CMatrix::zeros(self.dim);
        for (s, k) in self.trace_free().iter().zip(coeffs) {
            out.axpy(cr(*k), s.matrix());
        }
        Ok(HermitianOperator::new_unchecked(out))
    }
}

fn pair_at(n: usize, mut idx: usize) -> (usize, usize) {
    for a in 0..n {
        let row = n - 1 - a;
        if idx < row {
            return (a, a + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("pair index out of range")
}

/// Generalized Gell-Mann basis scaled by `1/sqrt(2)`, prefixed by
/// `I / sqrt(n)`. For `n = 2` this is the Pauli matrices over `sqrt(2)`.
pub fn gell_mann_basis<T: Real>(n: usize) -> Result<OperatorBasis<T>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let mut raw = Vec::with_capacity(n * n);
    let mut raw_norm_sq = Vec::with_capacity(n * n);
    raw.push(CMatrix::identity(n));
    raw_norm_sq.push(T::of_usize(n));
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    for &(a, b) in &pairs {
        let mut m = CMatrix::zeros(n);
        m[(a, b)] = cr(T::one());
        m[(b, a)] = cr(T::one());
        raw.push(m);
        raw_norm_sq.push(T::of(2.0));
    }
    for &(a, b) in &pairs {
        let mut m = CMatrix::zeros(n);
        m[(a, b)] = c(T::zero(), -T::one());
        m[(b, a)] = c(T::zero(), T::one());
        raw.push(m);
        raw_norm_sq.push(T::of(2.0));
    }
    for l in 1..n {
        let mut m = CMatrix::zeros(n);
        for k in 0..l {
            m[(k, k)] = cr(T::one());
        }
        m[(l, l)] = cr(-T::of_usize(l));
        raw.push(m);
        raw_norm_sq.push(T::of_usize(l * (l + 1)));
    }
    let elements = raw
        .iter()
        .zip(&raw_norm_sq)
        .map(|(m, ns)| HermitianOperator::new_unchecked(m.scale_real(T::one() / ns.sqrt())))
        .collect();
    Ok(OperatorBasis {
        dim: n,
        elements,
        raw,
        raw_norm_sq,
    })
}
