use super::{check_finite, check_rate};
use crate::bloch::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::matrix_exp;
use crate::liouvillian::LindbladModel;
use crate::matrix::{check_dim, CMatrix, HermitianOperator};
use crate::scalar::{c, cr, i_unit, Real, C};

/// Spin-`N/2` angular momentum on dimension `N + 1`, basis ordered
/// `m = N/2, N/2 - 1, ..., -N/2`.
#[derive(Clone, Debug)]
pub struct AngularMomentum<T: Real> {
    pub jx: HermitianOperator<T>,
    pub jy: HermitianOperator<T>,
    pub jz: HermitianOperator<T>,
}

impl<T: Real> AngularMomentum<T> {
    pub fn dim(&self) -> usize {
        self.jz.dim()
    }

    /// `J_x + i J_y`.
    pub fn raising(&self) -> CMatrix<T> {
        let mut out = self.jx.matrix().clone();
        out.axpy(i_unit(), self.jy.matrix());
        out
    }
}

pub fn angular_momentum_ops<T: Real>(n_particles: usize) -> Result<AngularMomentum<T>> {
    if n_particles == 0 {
        return Err(Error::InvalidParameter(
            "particle number must be at least 1".into(),
        ));
    }
    let dim = n_particles + 1;
    let j = T::of_usize(n_particles) * T::of(0.5);
    let m = |k: usize| j - T::of_usize(k);
    // <m + 1| J+ |m> sits at (k - 1, k)
    let mut plus = CMatrix::zeros(dim);
    for k in 1..dim {
        let mk = m(k);
        plus[(k - 1, k)] = cr((j * (j + T::one()) - mk * (mk + T::one())).sqrt());
    }
    let minus = plus.adjoint();
    let half = T::of(0.5);
    let jx = (&plus + &minus).scale_real(half);
    let jy = (&plus - &minus).scale(c(T::zero(), -half));
    let jz = HermitianOperator::from_real_diagonal(&(0..dim).map(m).collect::<Vec<_>>());
    Ok(AngularMomentum {
        jx: HermitianOperator::new_unchecked(jx),
        jy: HermitianOperator::new_unchecked(jy),
        jz,
    })
}

/// Two-site Bose-Hubbard dimer with `N` particles and collective loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BECParams<T> {
    /// Tunnelling frequency.
    pub omega: T,
    /// On-site interaction.
    pub u: T,
    /// Dissipation rate.
    pub gamma: T,
    pub n_particles: usize,
    /// Polar angle of the initial coherent state, in `[0, pi]`.
    pub theta: T,
    /// Azimuth of the initial coherent state, in `[0, 2 pi)`.
    pub phi: T,
}

impl<T: Real> BECParams<T> {
    pub fn validate(&self) -> Result<()> {
        check_finite("omega", self.omega)?;
        check_rate("u", self.u)?;
        check_rate("gamma", self.gamma)?;
        if self.n_particles == 0 {
            return Err(Error::InvalidParameter("n_particles must be at least 1".into()));
        }
        check_angles(self.theta, self.phi)
    }

    pub fn dim(&self) -> usize {
        self.n_particles + 1
    }

    pub fn initial_state(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::from_pure(&su2_coherent_state(self.n_particles, self.theta, self.phi)?)
    }
}

fn check_angles<T: Real>(theta: T, phi: T) -> Result<()> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, pi], got {theta}"
        )));
    }
    if !(phi >= T::zero() && phi < T::TAU()) {
        return Err(Error::InvalidParameter(format!(
            "phi must lie in [0, 2 pi), got {phi}"
        )));
    }
    Ok(())
}

/// `H = -Omega J_x + U J_z^2`, `L = sqrt(gamma) (J_z - i J_y)`.
pub fn bec_model<T: Real>(p: &BECParams<T>) -> Result<LindbladModel<T>> {
    p.validate()?;
    let ops = angular_momentum_ops::<T>(p.n_particles)?;
    let jz = ops.jz.matrix();
    let mut h = ops.jx.matrix().scale_real(-p.omega);
    h.axpy(cr(p.u), &jz.matmul(jz));
    let mut l = jz.clone();
    l.axpy(-i_unit::<T>(), ops.jy.matrix());
    LindbladModel::new(
        HermitianOperator::new(h)?,
        vec![l.scale_real(p.gamma.sqrt())],
    )
}

/// `exp[i theta (J_x sin phi - J_y cos phi)] |m = N/2>`.
pub fn su2_coherent_state<T: Real>(n_particles: usize, theta: T, phi: T) -> Result<Vec<C<T>>> {
    check_angles(theta, phi)?;
    let ops = angular_momentum_ops::<T>(n_particles)?;
    let mut gen = ops.jx.matrix().scale_real(phi.sin());
    gen.axpy(cr(-phi.cos()), ops.jy.matrix());
    let u = matrix_exp(&gen.scale(c(T::zero(), theta)))?;
    let dim = n_particles + 1;
    Ok((0..dim).map(|k| u[(k, 0)]).collect())
}

/// Sampling of the sphere for the Husimi function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HusimiSpec {
    /// Uniform in `[0, pi]`, both poles included.
    pub theta_samples: usize,
    /// Uniform in `[0, 2 pi)`.
    pub phi_samples: usize,
}

impl Default for HusimiSpec {
    fn default() -> Self {
        Self {
            theta_samples: 101,
            phi_samples: 101,
        }
    }
}

/// `Q(theta, phi)` on a grid, stored row-major with `theta` outer.
#[derive(Clone, Debug)]
pub struct HusimiGrid<T> {
    /// Hilbert-space dimension `N + 1` of the sampled state.
    pub dim_hilbert: usize,
    pub theta: Vec<T>,
    pub phi: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> HusimiGrid<T> {
    pub fn get(&self, i_theta: usize, i_phi: usize) -> T {
        self.values[i_theta * self.phi.len() + i_phi]
    }

    /// Rows `(theta, phi, q)` in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.theta.iter().enumerate().flat_map(move |(i, &th)| {
            self.phi
                .iter()
                .enumerate()
                .map(move |(j, &ph)| (th, ph, self.get(i, j)))
        })
    }

    /// `(N + 1) / (4 pi) * integral of Q over the sphere`: trapezoid rule in
    /// `theta` with the `sin(theta)` weight and the periodic rectangle rule
    /// in `phi`. Equals 1 for any state up to quadrature error.
    pub fn normalization(&self) -> T {
        let nt = self.theta.len();
        let np = self.phi.len();
        if nt < 2 || np == 0 {
            return T::nan();
        }
        let dtheta = T::PI() / T::of_usize(nt - 1);
        let dphi = T::TAU() / T::of_usize(np);
        let mut total = T::zero();
        for (i, &th) in self.theta.iter().enumerate() {
            let w = if i == 0 || i + 1 == nt { T::of(0.5) } else { T::one() };
            let row: T = (0..np).fold(T::zero(), |acc, j| acc + self.get(i, j));
            total += w * th.sin() * row;
        }
        let dim = T::of_usize(self.dim_hilbert);
        total * dtheta * dphi * dim / (T::of(4.0) * T::PI())
    }
}

/// Husimi function on the default 101 x 101 grid.
pub fn husimi<T: Real>(rho: &DensityMatrix<T>) -> Result<HusimiGrid<T>> {
    husimi_on(rho, &HusimiSpec::default())
}

/// Husimi function `Q = <theta, phi| rho |theta, phi>` on a custom grid.
///
/// Uses `|theta, phi> = exp(-i phi J_z) exp(-i theta J_y) |N/2>` up to a
/// global phase, so only one exponential per polar angle is needed.
pub fn husimi_on<T: Real>(rho: &DensityMatrix<T>, spec: &HusimiSpec) -> Result<HusimiGrid<T>> {
    let dim = rho.dim();
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if spec.theta_samples < 2 || spec.phi_samples < 1 {
        return Err(Error::InvalidGrid(
            "husimi grid needs at least 2 polar and 1 azimuthal samples".into(),
        ));
    }
    let n_particles = dim - 1;
    let ops = angular_momentum_ops::<T>(n_particles)?;
    let j = T::of_usize(n_particles) * T::of(0.5);
    let nt = spec.theta_samples;
    let np = spec.phi_samples;
    let theta: Vec<T> = (0..nt)
        .map(|i| {
            if i + 1 == nt {
                T::PI()
            } else {
                T::PI() * T::of_usize(i) / T::of_usize(nt - 1)
            }
        })
        .collect();
    let phi: Vec<T> = (0..np)
        .map(|k| T::TAU() * T::of_usize(k) / T::of_usize(np))
        .collect();
    let r = rho.matrix();
    let mut values = Vec::with_capacity(nt * np);
    let mut psi = vec![C::new(T::zero(), T::zero()); dim];
    for &th in &theta {
        let rot = matrix_exp(&ops.jy.matrix().scale(c(T::zero(), -th)))?;
        let d: Vec<C<T>> = (0..dim).map(|k| rot[(k, 0)]).collect();
        for &ph in &phi {
            for (k, slot) in psi.iter_mut().enumerate() {
                let m = j - T::of_usize(k);
                *slot = d[k] * C::from_polar(T::one(), -ph * m);
            }
            let r_psi = r.apply(&psi);
            let q = psi
                .iter()
                .zip(&r_psi)
                .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
            values.push(q.re);
        }
    }
    Ok(HusimiGrid {
        dim_hilbert: dim,
        theta,
        phi,
        values,
    })
}

/// `C = 2 |<J_x + i J_y>| / sqrt(N^2 - 4 <J_z>^2)` on dimension `N + 1`.
///
/// Undefined for states at the poles, where the denominator vanishes.
pub fn phase_coherence<T: Real>(rho: &DensityMatrix<T>, n_particles: usize) -> Result<T> {
    check_dim(n_particles + 1, rho.dim())?;
    let ops = angular_momentum_ops::<T>(n_particles)?;
    phase_coherence_with(rho, &ops)
}

/// [`phase_coherence`] with prebuilt angular momentum operators.
pub fn phase_coherence_with<T: Real>(
    rho: &DensityMatrix<T>,
    ops: &AngularMomentum<T>,
) -> Result<T> {
    check_dim(ops.dim(), rho.dim())?;
    let n = T::of_usize(ops.dim() - 1);
    let r = rho.matrix();
    let jz = r.trace_of_product(ops.jz.matrix()).re;
    let jp = r.trace_of_product(&ops.raising());
    let denom_sq = n * n - T::of(4.0) * jz * jz;
    if denom_sq <= T::of(1e-12) {
        return Err(Error::CoherenceUndefined {
            denominator: denom_sq.max(T::zero()).sqrt().to_f64_lossy(),
        });
    }
    Ok(T::of(2.0) * jp.norm() / denom_sq.sqrt())
}
