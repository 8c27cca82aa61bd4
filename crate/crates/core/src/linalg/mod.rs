//! Small dense numerical kernels: linear solves, the matrix exponential and
//! eigenvalue routines.

pub mod eig;
pub mod expm;
pub mod solve;

pub use eig::{hermitian_eigenvalues, real_eigenvalues};
pub use expm::matrix_exp;
pub use solve::{solve_complex, solve_real_rank_revealing, RankRevealingSolve};
