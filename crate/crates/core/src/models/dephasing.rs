use super::{check_finite, check_rate};
use crate::bloch::BlochVector;
use crate::error::Result;
use crate::liouvillian::LindbladModel;
use crate::matrix::{check_dim, pauli, HermitianOperator};
use crate::scalar::Real;

/// Qubit precessing about `z` at frequency `g` while dephasing at rate
/// `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingParams<T> {
    pub g: T,
    pub gamma: T,
}

impl<T: Real> DephasingParams<T> {
    pub fn validate(&self) -> Result<()> {
        check_finite("g", self.g)?;
        check_rate("gamma", self.gamma)
    }

    /// `v^2(t) = exp(-4 gamma t) (4 gamma^2 + g^2) (r_x(0)^2 + r_y(0)^2)`.
    pub fn speed_squared_at(&self, r0: &BlochVector<T>, t: T) -> Result<T> {
        check_dim(2, r0.dim_hilbert())?;
        let c = r0.components();
        let four = T::of(4.0);
        Ok((-four * self.gamma * t).exp()
            * (four * self.gamma * self.gamma + self.g * self.g)
            * (c[0] * c[0] + c[1] * c[1]))
    }

    /// Closed-form `v^2` as a function of time for a fixed initial state.
    pub fn analytic_speed_squared(
        &self,
        r0: &BlochVector<T>,
    ) -> Result<impl Fn(T) -> T + Clone> {
        check_dim(2, r0.dim_hilbert())?;
        let p = *self;
        let r0 = r0.clone();
        Ok(move |t: T| p.speed_squared_at(&r0, t).unwrap_or_else(|_| T::nan()))
    }
}

/// `H = g sigma_z / 2`, `L = sqrt(gamma) sigma_z`.
pub fn dephasing_model<T: Real>(p: &DephasingParams<T>) -> Result<LindbladModel<T>> {
    p.validate()?;
    let [_, _, z] = pauli::<T>();
    let h = HermitianOperator::new(z.scale_real(p.g * T::of(0.5)))?;
    LindbladModel::new(h, vec![z.scale_real(p.gamma.sqrt())])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let p = DephasingParams { g: 1.0f64, gamma: 0.3 };
        let r0 = BlochVector::new(2, vec![0.5f64.sqrt(), 0.0, 0.0]).unwrap();
        let v2 = p.analytic_speed_squared(&r0).unwrap();
        assert!((v2(0.0) - 0.68).abs() < 1e-15);
        assert!((v2(1.0) - 0.204812).abs() < 1e-6);
    }

    #[test]
    fn negative_rate_rejected() {
        assert!(dephasing_model(&DephasingParams { g: 1.0, gamma: -0.1 }).is_err());
    }
}
