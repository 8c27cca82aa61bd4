//! Time propagation through two independent backends.
//!
//! The affine backend is exact: it exponentiates the augmented generator
//! `[[0, 0], [b, Lambda]]` once per sample spacing. The operator backend
//! integrates `rho' = L rho` with classical fixed-step RK4 and works for
//! Hilbert spaces too large to build `Lambda`.

use crate::basis::OperatorBasis;
use crate::bloch::{embed, unembed_unchecked, BlochVector, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::matrix_exp;
use crate::liouvillian::{AffineGenerator, LindbladModel};
use crate::matrix::{check_dim, CMatrix};
use crate::scalar::{cr, Real};

/// Uniform sampling grid including both end points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<T: Real> {
    t_start: T,
    t_end: T,
    n_samples: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_start: T, t_end: T, n_samples: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidGrid("non-finite end points".into()));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid(format!(
                "t_end ({t_end}) must exceed t_start ({t_start})"
            )));
        }
        if n_samples < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples, got {n_samples}"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            n_samples,
        })
    }

    pub fn t_start(&self) -> T {
        self.t_start
    }

    pub fn t_end(&self) -> T {
        self.t_end
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn spacing(&self) -> T {
        (self.t_end - self.t_start) / T::of_usize(self.n_samples - 1)
    }

    pub fn time(&self, k: usize) -> T {
        if k + 1 == self.n_samples {
            self.t_end
        } else {
            self.t_start + self.spacing() * T::of_usize(k)
        }
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.n_samples).map(|k| self.time(k)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Affine,
    Operator,
}

/// First sample at which the operator backend left the positive cone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityViolation<T> {
    pub sample: usize,
    pub time: T,
    pub min_eigenvalue: T,
}

#[derive(Clone, Debug)]
pub enum States<T: Real> {
    Bloch(Vec<BlochVector<T>>),
    Density(Vec<DensityMatrix<T>>),
}

/// Sampled solution of the master equation.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    times: Vec<T>,
    states: States<T>,
    backend: Backend,
    positivity_violation: Option<PositivityViolation<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn states(&self) -> &States<T> {
        &self.states
    }

    /// Set when a sampled state had an eigenvalue below the monitoring
    /// tolerance. The trajectory is still returned in full.
    pub fn positivity_violation(&self) -> Option<&PositivityViolation<T>> {
        self.positivity_violation.as_ref()
    }

    pub fn bloch_vectors(&self, basis: &OperatorBasis<T>) -> Result<Vec<BlochVector<T>>> {
        match &self.states {
            States::Bloch(v) => {
                if let Some(r) = v.first() {
                    check_dim(basis.dim(), r.dim_hilbert())?;
                }
                Ok(v.clone())
            }
            States::Density(v) => v.iter().map(|rho| embed(rho, basis)).collect(),
        }
    }

    /// States as density matrices. States from the affine backend are
    /// reconstructed without a positivity check.
    pub fn density_matrices(&self, basis: &OperatorBasis<T>) -> Result<Vec<DensityMatrix<T>>> {
        match &self.states {
            States::Bloch(v) => v.iter().map(|r| unembed_unchecked(r, basis)).collect(),
            States::Density(v) => {
                if let Some(rho) = v.first() {
                    check_dim(basis.dim(), rho.dim())?;
                }
                Ok(v.clone())
            }
        }
    }

    /// Density-matrix states without needing a basis; `None` for the affine
    /// backend.
    pub fn density_states(&self) -> Option<&[DensityMatrix<T>]> {
        match &self.states {
            States::Density(v) => Some(v),
            States::Bloch(_) => None,
        }
    }
}

/// Exact propagation of `r' = Lambda r + b`.
pub fn evolve_affine<T: Real>(
    gen: &AffineGenerator<T>,
    r0: &BlochVector<T>,
    grid: &TimeGrid<T>,
) -> Result<Trajectory<T>> {
    check_dim(gen.dim_hilbert(), r0.dim_hilbert())?;
    let aug = gen.augmented().to_complex();
    let step = matrix_exp(&aug.scale_real(grid.spacing()))?;
    let (step, _) = step.split_real();
    let n = r0.dim_hilbert();
    let mut y: Vec<T> = std::iter::once(T::one())
        .chain(r0.components().iter().copied())
        .collect();
    let mut states = Vec::with_capacity(grid.n_samples());
    states.push(r0.clone());
    for _ in 1..grid.n_samples() {
        y = step.matvec(&y);
        // the first slot stays exactly 1 in exact arithmetic
        y[0] = T::one();
        states.push(BlochVector::new_unchecked(n, y[1..].to_vec()));
    }
    Ok(Trajectory {
        times: grid.times(),
        states: States::Bloch(states),
        backend: Backend::Affine,
        positivity_violation: None,
    })
}

/// Settings for the RK4 operator backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RkOptions<T> {
    /// Upper bound on `h * ||L||` for the internal step `h`.
    pub max_step_norm: T,
    /// Fixed number of RK4 steps per sample spacing; overrides
    /// `max_step_norm` when set.
    pub substeps: Option<usize>,
    /// Eigenvalues below `-positivity_tol` are flagged.
    pub positivity_tol: T,
}

/// Default bound on `h * ||L||`.
pub const DEFAULT_MAX_STEP_NORM: f64 = 0.02;
/// Default positivity monitoring tolerance.
pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-7;

impl<T: Real> Default for RkOptions<T> {
    fn default() -> Self {
        Self {
            max_step_norm: T::of(DEFAULT_MAX_STEP_NORM),
            substeps: None,
            positivity_tol: T::of(DEFAULT_POSITIVITY_TOL),
        }
    }
}

impl<T: Real> RkOptions<T> {
    /// Number of RK4 steps per sample interval of length `dt`.
    pub fn substeps_for(&self, model: &LindbladModel<T>, dt: T) -> Result<usize> {
        if let Some(k) = self.substeps {
            return Ok(k.max(1));
        }
        if !(self.max_step_norm > T::zero()) {
            return Err(Error::InvalidParameter(
                "max_step_norm must be positive".into(),
            ));
        }
        let norm = model.norm_estimate()?;
        let k = (dt * norm / self.max_step_norm).ceil().to_f64_lossy();
        Ok(if k.is_finite() && k >= 1.0 { k as usize } else { 1 })
    }
}

fn rk4_step<T: Real>(model: &LindbladModel<T>, x: &CMatrix<T>, h: T) -> CMatrix<T> {
    let half = T::of(0.5) * h;
    let k1 = model.generator_hermitian(x);
    let mut tmp = x.clone();
    tmp.axpy(cr(half), &k1);
    let k2 = model.generator_hermitian(&tmp);
    let mut tmp = x.clone();
    tmp.axpy(cr(half), &k2);
    let k3 = model.generator_hermitian(&tmp);
    let mut tmp = x.clone();
    tmp.axpy(cr(h), &k3);
    let k4 = model.generator_hermitian(&tmp);
    let sixth = h / T::of(6.0);
    let mut out = x.clone();
    out.axpy(cr(sixth), &k1);
    out.axpy(cr(sixth * T::of(2.0)), &k2);
    out.axpy(cr(sixth * T::of(2.0)), &k3);
    out.axpy(cr(sixth), &k4);
    out
}

/// Fourth-order Runge-Kutta integration of the master equation with the
/// default [`RkOptions`].
pub fn evolve_operator<T: Real>(
    model: &LindbladModel<T>,
    rho0: &DensityMatrix<T>,
    grid: &TimeGrid<T>,
) -> Result<Trajectory<T>> {
    evolve_operator_with(model, rho0, grid, &RkOptions::default())
}

pub fn evolve_operator_with<T: Real>(
    model: &LindbladModel<T>,
    rho0: &DensityMatrix<T>,
    grid: &TimeGrid<T>,
    opts: &RkOptions<T>,
) -> Result<Trajectory<T>> {
    check_dim(model.dim(), rho0.dim())?;
    let dt = grid.spacing();
    let substeps = opts.substeps_for(model, dt)?;
    let h = dt / T::of_usize(substeps);
    let mut x = rho0.matrix().clone();
    let mut states = Vec::with_capacity(grid.n_samples());
    let mut violation = None;
    let mut record = |k: usize, x: &CMatrix<T>, states: &mut Vec<DensityMatrix<T>>| -> Result<()> {
        let rho = DensityMatrix::new_unchecked(x.clone());
        if violation.is_none() {
            let min = rho.min_eigenvalue()?;
            if min < -opts.positivity_tol {
                violation = Some(PositivityViolation {
                    sample: k,
                    time: grid.time(k),
                    min_eigenvalue: min,
                });
            }
        }
        states.push(rho);
        Ok(())
    };
    record(0, &x, &mut states)?;
    for k in 1..grid.n_samples() {
        for _ in 0..substeps {
            x = rk4_step(model, &x, h);
        }
        let tr = x.trace().re;
        if !(tr.is_finite() && tr > T::zero()) {
            return Err(Error::InvalidDensityMatrix(format!(
                "integration diverged at t = {}",
                grid.time(k)
            )));
        }
        x = x.scale_real(T::one() / tr);
        record(k, &x, &mut states)?;
    }
    Ok(Trajectory {
        times: grid.times(),
        states: States::Density(states),
        backend: Backend::Operator,
        positivity_violation: violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gell_mann_basis;
    use crate::bloch::purity;
    use crate::liouvillian::build_affine;
    use crate::matrix::{pauli, HermitianOperator, RMatrix};
    use crate::scalar::c;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 5).is_err());
        let g = TimeGrid::new(0.0, 1.0, 5).unwrap();
        assert_eq!(g.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn zero_generator_gives_constant_trajectory() {
        let gen = AffineGenerator::new(2, RMatrix::zeros(3), vec![0.0; 3]).unwrap();
        let r0 = BlochVector::new(2, vec![0.1, -0.2, 0.3]).unwrap();
        let traj = evolve_affine(&gen, &r0, &TimeGrid::new(0.0, 5.0, 11).unwrap()).unwrap();
        let States::Bloch(v) = traj.states() else { panic!() };
        assert!(v.iter().all(|r| r == &r0));
    }

    #[test]
    fn dephasing_transverse_norm_decays_at_four_gamma() {
        let (g, gamma) = (1.0f64, 0.3f64);
        let [_, _, z] = pauli::<f64>();
        let model = LindbladModel::new(
            HermitianOperator::new(z.scale_real(g / 2.0)).unwrap(),
            vec![z.scale_real(gamma.sqrt())],
        )
        .unwrap();
        let basis = gell_mann_basis(2).unwrap();
        let gen = build_affine(&model, &basis).unwrap();
        let r0 = BlochVector::new(2, vec![0.4, -0.3, 0.2]).unwrap();
        let grid = TimeGrid::new(0.0, 4.0, 41).unwrap();
        let traj = evolve_affine(&gen, &r0, &grid).unwrap();
        let s0 = 0.4f64 * 0.4 + 0.3 * 0.3;
        for (t, r) in traj.times().iter().zip(traj.bloch_vectors(&basis).unwrap()) {
            let c = r.components();
            let want = (-4.0 * gamma * t).exp() * s0;
            assert!((c[0] * c[0] + c[1] * c[1] - want).abs() < 1e-10);
            assert!((c[2] - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_evolution_keeps_purity() {
        let h = HermitianOperator::new(CMatrix::from_fn(3, |i, j| {
            if i == j {
                cr(i as f64 - 0.4)
            } else if i < j {
                c(0.3, 0.2 * (j - i) as f64)
            } else {
                c(0.3, -0.2 * (i - j) as f64)
            }
        }))
        .unwrap();
        let model = LindbladModel::unitary(h).unwrap();
        let rho0 = DensityMatrix::from_pure(&[cr(1.0), c(0.0, 1.0), cr(0.5)]).unwrap();
        let traj = evolve_operator(&model, &rho0, &TimeGrid::new(0.0, 3.0, 31).unwrap()).unwrap();
        for rho in traj.density_states().unwrap() {
            assert!((purity(rho) - 1.0).abs() < 1e-10);
            assert!(rho.matrix().hermiticity_deviation() <= 1e-15);
        }
        assert!(traj.positivity_violation().is_none());
    }
}
