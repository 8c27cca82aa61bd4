use super::{check_finite, check_rate};
use crate::bloch::BlochVector;
use crate::error::Result;
use crate::liouvillian::LindbladModel;
use crate::matrix::{check_dim, pauli, HermitianOperator};
use crate::scalar::Real;

/// Qubit driven about `x` at frequency `g` and dephased along `z` at rate
/// `gamma`; a passive PT-symmetric system with an exceptional point at
/// `g = gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PTParams<T> {
    pub g: T,
    pub gamma: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PTPhase {
    /// `g > gamma`: damped oscillation.
    Broken,
    /// `g = gamma`.
    Critical,
    /// `g < gamma`: overdamped.
    Unbroken,
}

impl<T: Real> PTParams<T> {
    pub fn validate(&self) -> Result<()> {
        check_finite("g", self.g)?;
        check_rate("gamma", self.gamma)
    }

    pub fn phase(&self) -> PTPhase {
        let g = self.g.abs();
        if g > self.gamma {
            PTPhase::Broken
        } else if g == self.gamma {
            PTPhase::Critical
        } else {
            PTPhase::Unbroken
        }
    }

    /// `sqrt(g^2 - gamma^2)` in the broken phase.
    pub fn omega(&self) -> Option<T> {
        match self.phase() {
            PTPhase::Broken => Some((self.g * self.g - self.gamma * self.gamma).sqrt()),
            _ => None,
        }
    }

    /// Oscillation period `pi / omega` in the broken phase.
    pub fn period(&self) -> Option<T> {
        self.omega().map(|w| T::PI() / w)
    }

    /// Closed-form Bloch components `(r_x, r_y, r_z)` at time `t`.
    ///
    /// Continued through `cosh`/`sinh` in the unbroken phase and through the
    /// `sin(w t) / w -> t` limit at the critical point.
    pub fn bloch_at(&self, r0: &BlochVector<T>, t: T) -> Result<[T; 3]> {
        check_dim(2, r0.dim_hilbert())?;
        let c0 = r0.components();
        let (g, gamma) = (self.g, self.gamma);
        let w2 = g * g - gamma * gamma;
        let (cos_like, sinc_like) = match self.phase() {
            PTPhase::Broken => {
                let w = w2.sqrt();
                ((w * t).cos(), (w * t).sin() / w)
            }
            PTPhase::Critical => (T::one(), t),
            PTPhase::Unbroken => {
                let k = (-w2).sqrt();
                ((k * t).cosh(), (k * t).sinh() / k)
            }
        };
        let damp = (-gamma * t).exp();
        let rx = (-T::of(2.0) * gamma * t).exp() * c0[0];
        let ry = damp * ((cos_like - gamma * sinc_like) * c0[1] - g * sinc_like * c0[2]);
        let rz = damp * (g * sinc_like * c0[1] + (cos_like + gamma * sinc_like) * c0[2]);
        Ok([rx, ry, rz])
    }

    /// Closed-form trajectory for a fixed initial state.
    pub fn analytic_trajectory(
        &self,
        r0: &BlochVector<T>,
    ) -> Result<impl Fn(T) -> [T; 3] + Clone> {
        check_dim(2, r0.dim_hilbert())?;
        let p = *self;
        let r0 = r0.clone();
        Ok(move |t: T| p.bloch_at(&r0, t).unwrap_or([T::nan(); 3]))
    }

    /// The four generator eigenvalues `0, -2 gamma, -gamma +- sqrt(gamma^2 - g^2)`
    /// as `(re, im)` pairs.
    pub fn eigenvalues(&self) -> [(T, T); 4] {
        let (g, gamma) = (self.g, self.gamma);
        let d = gamma * gamma - g * g;
        let (a, b) = if d >= T::zero() {
            ((-gamma + d.sqrt(), T::zero()), (-gamma - d.sqrt(), T::zero()))
        } else {
            ((-gamma, (-d).sqrt()), (-gamma, -(-d).sqrt()))
        };
        [(T::zero(), T::zero()), (-T::of(2.0) * gamma, T::zero()), a, b]
    }
}

/// `H = g sigma_x / 2`, `L = sqrt(gamma) sigma_z`.
pub fn pt_model<T: Real>(p: &PTParams<T>) -> Result<LindbladModel<T>> {
    p.validate()?;
    let [x, _, z] = pauli::<T>();
    let h = HermitianOperator::new(x.scale_real(p.g * T::of(0.5)))?;
    LindbladModel::new(h, vec![z.scale_real(p.gamma.sqrt())])
}
