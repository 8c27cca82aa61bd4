//! Open-system quantum dynamics in the Lindblad form, with the evolution
//! speed of the density matrix and its geometric decomposition.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.

pub mod basis;
pub mod bloch;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod liouvillian;
pub mod matrix;
pub mod models;
pub mod navigation;
pub mod scalar;
pub mod speed;

pub use basis::{gell_mann_basis, ElementKind, OperatorBasis};
pub use bloch::{embed, purity, radial_distance, unembed, BlochVector, DensityMatrix};
pub use dynamics::{
    evolve_affine, evolve_operator, evolve_operator_with, Backend, PositivityViolation,
    RkOptions, States, TimeGrid, Trajectory,
};
pub use error::{Error, Result};
pub use liouvillian::{
    build_affine, spectrum, steady_state, AffineGenerator, LindbladModel,
};
pub use matrix::{hs_inner, pauli, CMatrix, HermitianOperator, RMatrix};
pub use navigation::{
    best_perturbation, gradient_norm, gradient_operator, speed_gradient, PerturbationReport,
};
pub use scalar::{Real, C};
pub use speed::{
    cross_term_alt, modified_skew_information, purity_rate, radial_velocity, skew_sum,
    speed_squared, speed_trace, SpeedSample,
};

pub type Complex64 = C<f64>;
pub type Matrix = CMatrix<f64>;
pub type RealMatrix = RMatrix<f64>;
pub type Hermitian = HermitianOperator<f64>;
pub type Density = DensityMatrix<f64>;
pub type Bloch = BlochVector<f64>;
pub type Basis = OperatorBasis<f64>;
pub type Model = LindbladModel<f64>;
pub type Affine = AffineGenerator<f64>;
pub type Grid = TimeGrid<f64>;
pub type Traj = Trajectory<f64>;
pub type Speed = SpeedSample<f64>;
pub type Perturbation = PerturbationReport<f64>;
