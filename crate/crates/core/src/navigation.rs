//! First-order response of the squared speed to a change of Hamiltonian
//! `H -> H + eps * Delta` with the environment held fixed.

use crate::basis::OperatorBasis;
use crate::bloch::DensityMatrix;
use crate::error::{Error, Result};
use crate::liouvillian::LindbladModel;
use crate::matrix::{check_dim, CMatrix, HermitianOperator};
use crate::scalar::{cr, i_unit, Real, C};

/// Gradient norms at or below this are reported as stationary.
pub const STATIONARY_TOL: f64 = 1e-14;

/// Best first-order Hamiltonian perturbation at a given state.
#[derive(Clone, Debug)]
pub struct PerturbationReport<T: Real> {
    /// Trace-free, unit Hilbert-Schmidt norm.
    pub direction: HermitianOperator<T>,
    /// Rate of change of `v^2` per unit `eps` along `direction`.
    pub delta_v2: T,
    /// Gradient coordinates over the trace-free basis elements.
    pub coefficients: Vec<T>,
}

/// `d v^2 / d eps` at `eps = 0` for `H -> H + eps * delta`.
pub fn speed_gradient<T: Real>(
    model: &LindbladModel<T>,
    rho: &DensityMatrix<T>,
    delta: &HermitianOperator<T>,
) -> Result<T> {
    check_dim(model.dim(), rho.dim())?;
    check_dim(model.dim(), delta.dim())?;
    let r = rho.matrix();
    let h = model.hamiltonian().matrix();
    let d = delta.matrix();
    let rho2 = r.matmul(r);
    let two = T::of(2.0);

    let sym = h.anticommutator(d);
    let unitary = (rho2.trace_of_product(&sym) - h.matmul(r).trace_of_product(&d.matmul(r)) * cr(two))
        * cr(two);

    let mut acc = C::new(T::zero(), T::zero());
    for l in model.lindblad_ops() {
        let sandwich = l.matmul(r).matmul(&l.adjoint());
        acc += r.trace_of_product(&sandwich.commutator(d));
        let jump = l.adjoint().matmul(l);
        acc += rho2.trace_of_product(&d.commutator(&jump)) * cr(T::of(0.5));
    }
    let cross = acc * (-i_unit::<T>()) * cr(two);
    Ok((unitary + cross).re)
}

/// Hermitian `G` with `speed_gradient(delta) = tr(delta G)` for every
/// Hermitian `delta`.
pub fn gradient_operator<T: Real>(
    model: &LindbladModel<T>,
    rho: &DensityMatrix<T>,
) -> Result<HermitianOperator<T>> {
    check_dim(model.dim(), rho.dim())?;
    let r = rho.matrix();
    let h = model.hamiltonian().matrix();
    let two = T::of(2.0);
    let rho2 = r.matmul(r);

    // 2({H, rho^2} - 2 rho H rho)
    let mut g = h.anticommutator(&rho2);
    g.axpy(cr(-two), &r.matmul(&h.matmul(r)));
    let mut g = g.scale_real(two);

    // -2i([rho, M] + [J, rho^2] / 2) with M = sum_k L rho L^dagger
    let mut m = CMatrix::zeros(model.dim());
    for l in model.lindblad_ops() {
        m += &l.matmul(r).matmul(&l.adjoint());
    }
    let mut inner = r.commutator(&m);
    inner.axpy(cr(T::of(0.5)), &model.jump_sum().commutator(&rho2));
    g.axpy(-i_unit::<T>() * cr(two), &inner);
    Ok(HermitianOperator::new_unchecked(g.hermitian_part()))
}

/// `|c|`, the Hilbert-Schmidt norm of the trace-free part of the gradient
/// operator. Equals `best_perturbation(..).delta_v2` without building a basis.
pub fn gradient_norm<T: Real>(model: &LindbladModel<T>, rho: &DensityMatrix<T>) -> Result<T> {
    let g = gradient_operator(model, rho)?;
    let mut traceless = g.into_matrix();
    let n = traceless.dim();
    let shift = traceless.trace() / cr(T::of_usize(n));
    for k in 0..n {
        traceless[(k, k)] -= shift;
    }
    Ok(traceless.frobenius_norm())
}

/// Unit trace-free direction maximising the first-order growth of `v^2`.
///
/// Fails with [`Error::StationaryPoint`] when no direction changes the
/// speed to first order.
pub fn best_perturbation<T: Real>(
    model: &LindbladModel<T>,
    rho: &DensityMatrix<T>,
    basis: &OperatorBasis<T>,
) -> Result<PerturbationReport<T>> {
    check_dim(model.dim(), basis.dim())?;
    let g = gradient_operator(model, rho)?;
    let coefficients: Vec<T> = basis
        .trace_free()
        .iter()
        .map(|s| s.matrix().trace_of_product(g.matrix()).re)
        .collect();
    let norm = coefficients
        .iter()
        .fold(T::zero(), |acc, &x| acc + x * x)
        .sqrt();
    if norm <= T::of(STATIONARY_TOL) {
        return Err(Error::StationaryPoint {
            norm: norm.to_f64_lossy(),
        });
    }
    let unit: Vec<T> = coefficients.iter().map(|&x| x / norm).collect();
    let direction = basis.combine_trace_free(&unit)?;
    Ok(PerturbationReport {
        direction,
        delta_v2: norm,
        coefficients,
    })
}
