#![allow(dead_code)]

use lindblad_speed::{CMatrix, DensityMatrix, HermitianOperator, LindbladModel, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> CMatrix<f64> {
    CMatrix::from_fn(n, |_, _| {
        C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> HermitianOperator<f64> {
    HermitianOperator::new(random_matrix(rng, n, scale).hermitian_part()).unwrap()
}

/// Trace-free Hermitian operator with unit Hilbert-Schmidt norm.
pub fn random_unit_traceless(rng: &mut impl Rng, n: usize) -> HermitianOperator<f64> {
    let mut m = random_matrix(rng, n, 1.0).hermitian_part();
    let shift = m.trace() / n as f64;
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let norm = m.frobenius_norm();
    HermitianOperator::new(m.scale_real(1.0 / norm)).unwrap()
}

/// Hamiltonian plus one to three generic (non-normal) jump operators.
pub fn random_model(rng: &mut impl Rng, n: usize) -> LindbladModel<f64> {
    let h = random_hermitian(rng, n, 1.0);
    let k = rng.gen_range(1..=3);
    let ls = (0..k).map(|_| random_matrix(rng, n, 0.5)).collect();
    LindbladModel::new(h, ls).unwrap()
}

/// Full-rank mixed state `A A^dagger / tr`.
pub fn random_state(rng: &mut impl Rng, n: usize) -> DensityMatrix<f64> {
    let a = random_matrix(rng, n, 1.0);
    let m = a.matmul(&a.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}

pub fn random_pure(rng: &mut impl Rng, n: usize) -> DensityMatrix<f64> {
    let psi: Vec<C<f64>> = (0..n)
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    DensityMatrix::from_pure(&psi).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
