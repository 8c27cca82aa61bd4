//! Evolution speed `v = ||L rho||_HS`, its decomposition into unitary,
//! cross and dissipative parts, and the radial/tangential split of the
//! Bloch velocity.

use crate::bloch::{purity, radial_distance, DensityMatrix};
use crate::error::Result;
use crate::liouvillian::LindbladModel;
use crate::matrix::{check_dim, CMatrix};
use crate::scalar::{i_unit, Real};

/// Below this distance from `I/n` the radial velocity is reported as zero.
pub const RADIAL_DEGENERACY: f64 = 1e-12;

/// Speed and its parts at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedSample<T> {
    pub t: T,
    /// `tr[(L rho)^2]`.
    pub v2: T,
    pub term_unitary: T,
    pub term_cross: T,
    pub term_dissipative: T,
    /// `(r . r') / |r|`; positive while purity grows.
    pub v_radial_signed: T,
    pub v_tangential: T,
    pub purity: T,
}

impl<T: Real> SpeedSample<T> {
    pub fn v(&self) -> T {
        self.v2.max(T::zero()).sqrt()
    }

    /// Sum of the three parts; equals `v2` up to rounding.
    pub fn decomposition_sum(&self) -> T {
        self.term_unitary + self.term_cross + self.term_dissipative
    }

    pub fn at_time(mut self, t: T) -> Self {
        self.t = t;
        self
    }
}

/// `tr(X^dagger X rho^2) - tr(X rho X^dagger rho)`.
///
/// Real for any `X`. Not necessarily non-negative when `X` is not normal.
pub fn modified_skew_information<T: Real>(x: &CMatrix<T>, rho: &DensityMatrix<T>) -> Result<T> {
    check_dim(rho.dim(), x.dim())?;
    let r = rho.matrix();
    let x_rho = x.matmul(r);
    let rho_x = r.matmul(x);
    // tr(X^dagger X rho^2) = ||X rho||^2
    let first = x_rho.frobenius_norm();
    let second = x_rho.trace_of_product(&rho_x.adjoint());
    Ok(first * first - second.re)
}

/// Sum of the skew information of every Lindblad operator.
pub fn skew_sum<T: Real>(model: &LindbladModel<T>, rho: &DensityMatrix<T>) -> Result<T> {
    check_dim(model.dim(), rho.dim())?;
    let mut s = T::zero();
    for l in model.lindblad_ops() {
        s += modified_skew_information(l, rho)?;
    }
    Ok(s)
}

/// `d tr(rho^2) / dt = -2 sum_k S(L_k)`.
pub fn purity_rate<T: Real>(model: &LindbladModel<T>, rho: &DensityMatrix<T>) -> Result<T> {
    Ok(-T::of(2.0) * skew_sum(model, rho)?)
}

/// Signed radial velocity `tr(rho L rho) / |r|`, zero at the maximally mixed
/// state.
pub fn radial_velocity<T: Real>(model: &LindbladModel<T>, rho: &DensityMatrix<T>) -> Result<T> {
    check_dim(model.dim(), rho.dim())?;
    let lrho = model.generator_hermitian(rho.matrix());
    Ok(radial_from(rho, &lrho))
}

fn radial_from<T: Real>(rho: &DensityMatrix<T>, lrho: &CMatrix<T>) -> T {
    let dist = radial_distance(rho);
    if dist <= T::of(RADIAL_DEGENERACY) {
        return T::zero();
    }
    rho.matrix().trace_of_product(lrho).re / dist
}

/// Radial and tangential parts of the velocity. The tangential part is the
/// norm of `L rho` with its component along `rho - I/n` removed, which keeps
/// full relative accuracy when the motion is almost purely radial.
fn radial_split<T: Real>(rho: &DensityMatrix<T>, lrho: &CMatrix<T>, v2: T) -> (T, T) {
    let n = rho.dim();
    let mut shifted = rho.matrix().clone();
    let shift = crate::scalar::cr(T::one() / T::of_usize(n));
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let dist = shifted.frobenius_norm();
    if dist <= T::of(RADIAL_DEGENERACY) {
        return (T::zero(), v2.max(T::zero()).sqrt());
    }
    let along = shifted.trace_of_product(lrho).re / dist;
    let mut tangential = lrho.clone();
    tangential.axpy(crate::scalar::cr(-along / dist), &shifted);
    (along, tangential.frobenius_norm())
}

/// Squared speed with its three-term decomposition and radial split. The
/// returned sample has `t = 0`; see [`SpeedSample::at_time`].
pub fn speed_squared<T: Real>(
    model: &LindbladModel<T>,
    rho: &DensityMatrix<T>,
) -> Result<SpeedSample<T>> {
    check_dim(model.dim(), rho.dim())?;
    let r = rho.matrix();
    let h = model.hamiltonian().matrix();
    let two = T::of(2.0);

    let lrho = model.generator_hermitian(r);
    let v2 = lrho.trace_of_product(&lrho).re;

    let h_rho = h.matmul(r);
    let hr_norm = h_rho.frobenius_norm();
    let term_unitary = two * (hr_norm * hr_norm - h_rho.trace_of_product(&h_rho).re);

    let d_rho = model.dissipator(r);
    let term_dissipative = d_rho.trace_of_product(&d_rho).re;
    let comm = d_rho.commutator(h);
    let term_cross = (r.trace_of_product(&comm) * (-i_unit::<T>())).re * two;

    let (v_radial_signed, v_tangential) = radial_split(rho, &lrho, v2);
    Ok(SpeedSample {
        t: T::zero(),
        v2,
        term_unitary,
        term_cross,
        term_dissipative,
        v_radial_signed,
        v_tangential,
        purity: purity(rho),
    })
}

/// Cross term written through the individual jump operators:
/// `-2i sum_k [tr(rho [L rho L^dagger, H]) + tr(rho^2 [H, L^dagger L]) / 2]`.
pub fn cross_term_alt<T: Real>(model: &LindbladModel<T>, rho: &DensityMatrix<T>) -> Result<T> {
    check_dim(model.dim(), rho.dim())?;
    let r = rho.matrix();
    let h = model.hamiltonian().matrix();
    let rho2 = r.matmul(r);
    let half = T::of(0.5);
    let mut acc = crate::scalar::C::new(T::zero(), T::zero());
    for l in model.lindblad_ops() {
        let sandwich = l.matmul(r).matmul(&l.adjoint());
        acc += r.trace_of_product(&sandwich.commutator(h));
        let jump = l.adjoint().matmul(l);
        acc += rho2.trace_of_product(&h.commutator(&jump)) * half;
    }
    Ok((acc * (-i_unit::<T>())).re * T::of(2.0))
}

/// Speed samples along a sequence of states.
pub fn speed_trace<T: Real>(
    model: &LindbladModel<T>,
    times: &[T],
    states: &[DensityMatrix<T>],
) -> Result<Vec<SpeedSample<T>>> {
    check_dim(times.len(), states.len())?;
    times
        .iter()
        .zip(states)
        .map(|(&t, rho)| Ok(speed_squared(model, rho)?.at_time(t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{pauli, HermitianOperator};
    use crate::scalar::{c, cr};

    fn plus() -> DensityMatrix<f64> {
        let s = 0.5f64.sqrt();
        DensityMatrix::from_pure(&[cr(s), cr(s)]).unwrap()
    }

    #[test]
    fn skew_of_identity_vanishes() {
        let rho = DensityMatrix::new(CMatrix::from_rows(&[
            vec![cr(0.7f64), c(0.1, 0.2)],
            vec![c(0.1, -0.2), cr(0.3)],
        ]).unwrap())
        .unwrap();
        assert!(modified_skew_information(&CMatrix::identity(2), &rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn skew_of_sigma_z_on_plus_is_one() {
        let [_, _, z] = pauli::<f64>();
        let s = modified_skew_information(&z, &plus()).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn skew_of_lowering_can_be_negative() {
        for p in [0.1f64, 0.3, 0.5, 0.8] {
            let rho = DensityMatrix::new(CMatrix::diagonal(&[cr(p), cr(1.0 - p)])).unwrap();
            let mut lower = CMatrix::zeros(2);
            lower[(1, 0)] = cr(1.0);
            let s = modified_skew_information(&lower, &rho).unwrap();
            assert!((s - p * (2.0 * p - 1.0)).abs() < 1e-15, "p={p}");
        }
    }

    #[test]
    fn unitary_qubit_speed() {
        let [_, _, z] = pauli::<f64>();
        let model = LindbladModel::unitary(HermitianOperator::new(z.scale_real(0.5)).unwrap()).unwrap();
        let s = speed_squared(&model, &plus()).unwrap();
        assert!((s.v2 - 0.5).abs() < 1e-15);
        assert!((s.term_unitary - 0.5).abs() < 1e-15);
        assert_eq!(s.term_cross, 0.0);
        assert_eq!(s.term_dissipative, 0.0);
        assert_eq!(s.v_radial_signed, 0.0);
        assert!((s.v_tangential - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dephasing_speed_at_start() {
        let (g, gamma) = (1.0f64, 0.3f64);
        let [_, _, z] = pauli::<f64>();
        let model = LindbladModel::new(
            HermitianOperator::new(z.scale_real(g / 2.0)).unwrap(),
            vec![z.scale_real(gamma.sqrt())],
        )
        .unwrap();
        let s = speed_squared(&model, &plus()).unwrap();
        let want = (4.0 * gamma * gamma + g * g) / 2.0;
        assert!((s.v2 - want).abs() < 1e-14);
        assert!(s.term_cross.abs() < 1e-15);
        assert!((s.decomposition_sum() - s.v2).abs() < 1e-14);
        assert!((cross_term_alt(&model, &plus()).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_has_zero_radial_velocity() {
        let [x, _, z] = pauli::<f64>();
        let model = LindbladModel::new(HermitianOperator::new(x).unwrap(), vec![z]).unwrap();
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(radial_velocity(&model, &rho).unwrap(), 0.0);
    }
}
