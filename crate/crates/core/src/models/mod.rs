//! The three example systems and their closed-form references.

mod bec;
mod dephasing;
mod pt;

pub use bec::{
    angular_momentum_ops, bec_model, husimi, husimi_on, phase_coherence,
    phase_coherence_with, su2_coherent_state,
    AngularMomentum, BECParams, HusimiGrid, HusimiSpec,
};
pub use dephasing::{dephasing_model, DephasingParams};
pub use pt::{pt_model, PTParams, PTPhase};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) fn check_rate<T: Real>(name: &str, value: T) -> Result<()> {
    if !value.is_finite() || value < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and non-negative, got {value}"
        )));
    }
    Ok(())
}

pub(crate) fn check_finite<T: Real>(name: &str, value: T) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite")));
    }
    Ok(())
}
