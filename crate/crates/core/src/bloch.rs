//! Density matrices and their Euclidean Bloch-vector coordinates.

use crate::basis::OperatorBasis;
use crate::error::{Error, Result};
use crate::matrix::{check_dim, CMatrix, HermitianOperator};
use crate::scalar::{cr, Real, C};

/// Trace tolerance for a valid state.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Unit-trace positive semidefinite Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    op: HermitianOperator<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let op = HermitianOperator::new(matrix)
            .map_err(|e| Error::InvalidDensityMatrix(e.to_string()))?;
        let tr = op.matrix().trace();
        if (tr - cr(T::one())).norm() > T::of(TRACE_TOL) {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {} differs from 1",
                tr.re
            )));
        }
        let rho = Self { op };
        let min = rho.min_eigenvalue()?;
        if min < -T::of(POSITIVITY_TOL) {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    /// Skips validation. Used for integrator output, where positivity is
    /// monitored separately.
    pub(crate) fn new_unchecked(matrix: CMatrix<T>) -> Self {
        Self {
            op: HermitianOperator::new_unchecked(matrix),
        }
    }

    /// `|psi><psi|` for a (not necessarily normalised) state vector.
    pub fn from_pure(psi: &[C<T>]) -> Result<Self> {
        let norm = psi.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if psi.len() < 2 {
            return Err(Error::DimensionTooSmall(psi.len()));
        }
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::InvalidDensityMatrix("zero or non-finite state vector".into()));
        }
        let v: Vec<C<T>> = psi.iter().map(|z| z.unscale(norm)).collect();
        Ok(Self::new_unchecked(CMatrix::outer(&v, &v)))
    }

    /// Computational basis projector `|k><k|`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if k >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut m = CMatrix::zeros(dim);
        m[(k, k)] = cr(T::one());
        Ok(Self::new_unchecked(m))
    }

    /// `I / n`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        Ok(Self::new_unchecked(
            CMatrix::identity(dim).scale_real(T::one() / T::of_usize(dim)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.op.matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.op.eigenvalues()?.first().copied().unwrap_or_else(T::zero))
    }

    /// Re-validates a state (e.g. one taken from a trajectory).
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix().clone()).map(|_| ())
    }
}

/// Real coordinates `r_j = tr(rho sigma_j)`, `j = 1, ..., n^2 - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochVector<T: Real> {
    dim_hilbert: usize,
    components: Vec<T>,
}

impl<T: Real> BlochVector<T> {
    /// Checks the length and that `|r|^2 <= 1 - 1/n` (plus `1e-10`).
    pub fn new(dim_hilbert: usize, components: Vec<T>) -> Result<Self> {
        if dim_hilbert < 2 {
            return Err(Error::DimensionTooSmall(dim_hilbert));
        }
        check_dim(dim_hilbert * dim_hilbert - 1, components.len())?;
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let v = Self {
            dim_hilbert,
            components,
        };
        let bound = v.max_norm_sq() + T::of(1e-10);
        let norm_sq = v.norm_sq();
        if norm_sq > bound {
            return Err(Error::OutsideBlochSphere {
                norm_sq: norm_sq.to_f64_lossy(),
                bound: bound.to_f64_lossy(),
            });
        }
        Ok(v)
    }

    pub(crate) fn new_unchecked(dim_hilbert: usize, components: Vec<T>) -> Self {
        Self {
            dim_hilbert,
            components,
        }
    }

    /// The origin, i.e. the maximally mixed state.
    pub fn zero(dim_hilbert: usize) -> Self {
        Self::new_unchecked(dim_hilbert, vec![T::zero(); dim_hilbert * dim_hilbert - 1])
    }

    pub fn dim_hilbert(&self) -> usize {
        self.dim_hilbert
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn norm_sq(&self) -> T {
        self.components.iter().fold(T::zero(), |a, x| a + *x * *x)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Squared radius of the sphere of pure states, `1 - 1/n`.
    pub fn max_norm_sq(&self) -> T {
        T::one() - T::one() / T::of_usize(self.dim_hilbert)
    }

    pub fn dot(&self, other: &[T]) -> T {
        self.components
            .iter()
            .zip(other)
            .fold(T::zero(), |a, (x, y)| a + *x * *y)
    }
}

/// Bloch coordinates of a density matrix.
pub fn embed<T: Real>(rho: &DensityMatrix<T>, basis: &OperatorBasis<T>) -> Result<BlochVector<T>> {
    check_dim(basis.dim(), rho.dim())?;
    let comps = basis
        .trace_free()
        .iter()
        .map(|s| s.matrix().trace_of_product(rho.matrix()).re)
        .collect();
    Ok(BlochVector::new_unchecked(basis.dim(), comps))
}

/// Real coordinates of a trace-free Hermitian operator (for example a
/// velocity `L rho`) over the trace-free basis elements.
pub fn embed_traceless<T: Real>(x: &CMatrix<T>, basis: &OperatorBasis<T>) -> Result<Vec<T>> {
    check_dim(basis.dim(), x.dim())?;
    Ok(basis
        .trace_free()
        .iter()
        .map(|s| s.matrix().trace_of_product(x).re)
        .collect())
}

/// `I/n + sum_j r_j sigma_j`, rejected when the result is not positive
/// semidefinite.
pub fn unembed<T: Real>(r: &BlochVector<T>, basis: &OperatorBasis<T>) -> Result<DensityMatrix<T>> {
    let rho = unembed_unchecked(r, basis)?;
    let min = rho.min_eigenvalue()?;
    if min < -T::of(POSITIVITY_TOL) {
        return Err(Error::UnphysicalBlochVector {
            min_eigenvalue: min.to_f64_lossy(),
        });
    }
    Ok(rho)
}

/// As [`unembed`] without the positivity check.
pub(crate) fn unembed_unchecked<T: Real>(
    r: &BlochVector<T>,
    basis: &OperatorBasis<T>,
) -> Result<DensityMatrix<T>> {
    check_dim(basis.dim(), r.dim_hilbert())?;
    check_dim(basis.bloch_len(), r.len())?;
    let n = basis.dim();
    let mut m = CMatrix::identity(n).scale_real(T::one() / T::of_usize(n));
    for (s, x) in basis.trace_free().iter().zip(r.components()) {
        m.axpy(cr(*x), s.matrix());
    }
    Ok(DensityMatrix::new_unchecked(m))
}

/// `tr(rho^2)`.
pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    let f = rho.matrix().frobenius_norm();
    f * f
}

/// `sqrt(tr[(rho - I/n)^2])`, the Euclidean distance from the maximally
/// mixed state.
pub fn radial_distance<T: Real>(rho: &DensityMatrix<T>) -> T {
    let n = rho.dim();
    let shift = cr(T::one() / T::of_usize(n));
    let mut m = rho.matrix().clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    m.frobenius_norm()
}
