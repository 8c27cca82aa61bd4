//! The Lindblad generator, both as a map on density matrices and as the
//! affine system `r' = Lambda r + b` on Bloch vectors.

use std::cmp::Ordering;

use crate::basis::OperatorBasis;
use crate::bloch::{BlochVector, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{real_eigenvalues, solve_real_rank_revealing, RankRevealingSolve};
use crate::matrix::{check_dim, CMatrix, HermitianOperator, RMatrix};
use crate::scalar::{c, cr, i_unit, Real, C};

/// Imaginary residues in `Lambda` or `b` above this (relative to the
/// largest entry) are treated as an input error rather than rounding.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-8;

/// Hamiltonian plus Lindblad operators on an `n`-dimensional Hilbert space
/// (`hbar = 1`).
#[derive(Clone, Debug)]
pub struct LindbladModel<T: Real> {
    hamiltonian: HermitianOperator<T>,
    lindblad_ops: Vec<CMatrix<T>>,
    lindblad_adj: Vec<CMatrix<T>>,
    // sum_k L_k^dagger L_k
    jump_sum: CMatrix<T>,
    // H - (i/2) sum_k L_k^dagger L_k
    effective: CMatrix<T>,
}

impl<T: Real> LindbladModel<T> {
    pub fn new(hamiltonian: HermitianOperator<T>, lindblad_ops: Vec<CMatrix<T>>) -> Result<Self> {
        let n = hamiltonian.dim();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        for l in &lindblad_ops {
            check_dim(n, l.dim())?;
            if !l.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let lindblad_adj: Vec<CMatrix<T>> = lindblad_ops.iter().map(CMatrix::adjoint).collect();
        let mut jump_sum = CMatrix::zeros(n);
        for (l, ld) in lindblad_ops.iter().zip(&lindblad_adj) {
            jump_sum += &ld.matmul(l);
        }
        let mut effective = hamiltonian.matrix().clone();
        effective.axpy(c(T::zero(), -T::of(0.5)), &jump_sum);
        Ok(Self {
            hamiltonian,
            lindblad_ops,
            lindblad_adj,
            jump_sum,
            effective,
        })
    }

    /// Purely unitary model.
    pub fn unitary(hamiltonian: HermitianOperator<T>) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator<T> {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[CMatrix<T>] {
        &self.lindblad_ops
    }

    /// `sum_k L_k^dagger L_k`.
    pub fn jump_sum(&self) -> &CMatrix<T> {
        &self.jump_sum
    }

    /// Same environment, different Hamiltonian.
    pub fn with_hamiltonian(&self, hamiltonian: HermitianOperator<T>) -> Result<Self> {
        Self::new(hamiltonian, self.lindblad_ops.clone())
    }

    /// Dissipator applied to an arbitrary operator.
    pub fn dissipator(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.dim());
        for (l, ld) in self.lindblad_ops.iter().zip(&self.lindblad_adj) {
            out += &l.matmul(x).matmul(ld);
        }
        out.axpy(cr(-T::of(0.5)), &self.jump_sum.anticommutator(x));
        out
    }

    /// Generator applied to a Hermitian operator, using
    /// `L X = -i (K X - (K X)^dagger) + sum_k L_k X L_k^dagger` with
    /// `K = H - (i/2) sum_k L_k^dagger L_k`. Every product keeps a model
    /// operator on the left, so banded `H` and `L_k` stay cheap.
    pub fn generator_hermitian(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let n = self.dim();
        let y = self.effective.matmul(x);
        let mut out = CMatrix::zeros(n);
        let minus_i = -i_unit::<T>();
        for a in 0..n {
            for b in 0..n {
                out[(a, b)] = (y[(a, b)] - y[(b, a)].conj()) * minus_i;
            }
        }
        let half = T::of(0.5);
        for l in &self.lindblad_ops {
            // L X L^dagger = L (L X)^dagger for Hermitian X; symmetrised so
            // the output is Hermitian to the last bit.
            let t = l.matmul(&l.matmul(x).adjoint());
            for a in 0..n {
                for b in 0..n {
                    out[(a, b)] += (t[(a, b)] + t[(b, a)].conj()).scale(half);
                }
            }
        }
        out
    }

    /// Estimate of the generator norm, `2 ||H|| + 2 sum_k ||L_k^dagger L_k||`
    /// in spectral norms.
    pub fn norm_estimate(&self) -> Result<T> {
        let mut total = T::of(2.0) * self.hamiltonian.spectral_norm()?;
        for (l, ld) in self.lindblad_ops.iter().zip(&self.lindblad_adj) {
            let a = HermitianOperator::new_unchecked(ld.matmul(l));
            total += T::of(2.0) * a.spectral_norm()?;
        }
        Ok(total)
    }
}

/// `sum_k [L_k rho L_k^dagger - (L_k^dagger L_k rho + rho L_k^dagger L_k)/2]`.
pub fn dissipator_apply<T: Real>(
    model: &LindbladModel<T>,
    rho: &DensityMatrix<T>,
) -> Result<HermitianOperator<T>> {
    check_dim(model.dim(), rho.dim())?;
    Ok(HermitianOperator::new_unchecked(model.dissipator(rho.matrix())))
}

/// `-i[H, rho] + D rho`.
pub fn generator_apply<T: Real>(
    model: &LindbladModel<T>,
    rho: &DensityMatrix<T>,
) -> Result<HermitianOperator<T>> {
    check_dim(model.dim(), rho.dim())?;
    Ok(HermitianOperator::new_unchecked(
        model.generator_hermitian(rho.matrix()),
    ))
}

/// Affine form `r' = Lambda r + b` of the generator in a given basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineGenerator<T: Real> {
    dim_hilbert: usize,
    lambda: RMatrix<T>,
    b: Vec<T>,
}

impl<T: Real> AffineGenerator<T> {
    pub fn new(dim_hilbert: usize, lambda: RMatrix<T>, b: Vec<T>) -> Result<Self> {
        let m = dim_hilbert * dim_hilbert - 1;
        check_dim(m, lambda.dim())?;
        check_dim(m, b.len())?;
        Ok(Self {
            dim_hilbert,
            lambda,
            b,
        })
    }

    pub fn dim_hilbert(&self) -> usize {
        self.dim_hilbert
    }

    pub fn lambda(&self) -> &RMatrix<T> {
        &self.lambda
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `Lambda r + b`.
    pub fn velocity(&self, r: &[T]) -> Vec<T> {
        let mut v = self.lambda.matvec(r);
        for (x, b) in v.iter_mut().zip(&self.b) {
            *x += *b;
        }
        v
    }

    /// Full `n^2 x n^2` superoperator in the basis including `sigma_0`:
    /// first row zero (trace preservation), first column `sqrt(n) b`.
    pub fn superoperator(&self) -> RMatrix<T> {
        let m = self.lambda.dim();
        let sqrt_n = T::of_usize(self.dim_hilbert).sqrt();
        RMatrix::from_fn(m + 1, |i, j| match (i, j) {
            (0, _) => T::zero(),
            (i, 0) => sqrt_n * self.b[i - 1],
            (i, j) => self.lambda[(i - 1, j - 1)],
        })
    }

    /// Augmented `(n^2) x (n^2)` matrix `[[0, 0], [b, Lambda]]` acting on
    /// `(1, r)`.
    pub fn augmented(&self) -> RMatrix<T> {
        let m = self.lambda.dim();
        RMatrix::from_fn(m + 1, |i, j| match (i, j) {
            (0, _) => T::zero(),
            (i, 0) => self.b[i - 1],
            (i, j) => self.lambda[(i - 1, j - 1)],
        })
    }
}

/// Builds `Lambda_ij = tr(-i[sigma_j, sigma_i] H + sum_k L_k sigma_j L_k^dagger sigma_i
/// - 1/2 sum_k (L_k^dagger L_k sigma_j sigma_i + L_k^dagger L_k sigma_i sigma_j))` and
/// `b_i = (1/n) sum_k tr([L_k, L_k^dagger] sigma_i)`.
pub fn build_affine<T: Real>(
    model: &LindbladModel<T>,
    basis: &OperatorBasis<T>,
) -> Result<AffineGenerator<T>> {
    let n = basis.dim();
    check_dim(n, model.dim())?;
    // Work with the integer-entry generators and normalise at the end, so
    // Lambda is exact whenever H and L_k are exactly representable.
    let m = basis.bloch_len();
    let raw: Vec<(&CMatrix<T>, T)> = (1..=m).map(|j| basis.raw_element(j)).collect();
    let h = model.hamiltonian.matrix();
    let a = &model.jump_sum;
    let minus_i = -i_unit::<T>();
    let half = cr(T::of(0.5));

    let mut lambda = CMatrix::zeros(m);
    for (j, &(sj, nj)) in raw.iter().enumerate() {
        let a_sj = a.matmul(sj);
        let lsl: Vec<CMatrix<T>> = model
            .lindblad_ops
            .iter()
            .zip(&model.lindblad_adj)
            .map(|(l, ld)| l.matmul(sj).matmul(ld))
            .collect();
        for (i, &(si, ni)) in raw.iter().enumerate() {
            let comm = sj.commutator(si);
            let mut acc = minus_i * comm.trace_of_product(h);
            for x in &lsl {
                acc += x.trace_of_product(si);
            }
            acc -= half * (a_sj.trace_of_product(si) + a.matmul(si).trace_of_product(sj));
            let norm = if ni == nj { ni } else { (ni * nj).sqrt() };
            lambda[(i, j)] = acc.unscale(norm);
        }
    }

    let n_real = T::of_usize(n);
    let mut lindblad_comm = CMatrix::zeros(n);
    for (l, ld) in model.lindblad_ops.iter().zip(&model.lindblad_adj) {
        lindblad_comm += &l.commutator(ld);
    }
    let b: Vec<C<T>> = raw
        .iter()
        .map(|&(s, ns)| lindblad_comm.trace_of_product(s).unscale(n_real * ns.sqrt()))
        .collect();

    let (lambda, lam_res) = lambda.split_real();
    let b_res = b.iter().fold(T::zero(), |r, z| r.max(z.im.abs()));
    let scale = T::one()
        .max(lambda.max_abs())
        .max(b.iter().fold(T::zero(), |r, z| r.max(z.re.abs())));
    let residue = lam_res.max(b_res);
    if residue > T::of(IMAGINARY_RESIDUE_TOL) * scale {
        return Err(Error::ComplexResidue {
            residue: residue.to_f64_lossy(),
        });
    }
    AffineGenerator::new(n, lambda, b.iter().map(|z| z.re).collect())
}

/// Orders eigenvalues by real part descending, then imaginary part
/// descending.
pub fn sort_spectrum<T: Real>(values: &mut [C<T>]) {
    values.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
    });
}

/// Eigenvalues of the full superoperator, including the trivial zero from
/// trace preservation.
pub fn spectrum<T: Real>(gen: &AffineGenerator<T>) -> Result<Vec<C<T>>> {
    let mut ev = real_eigenvalues(&gen.superoperator())?;
    sort_spectrum(&mut ev);
    Ok(ev)
}

/// Relative pivot threshold below which `Lambda` counts as singular.
pub const STEADY_STATE_RANK_TOL: f64 = 1e-10;

/// Fixed point `r*` with `Lambda r* + b = 0`.
pub fn steady_state<T: Real>(gen: &AffineGenerator<T>) -> Result<BlochVector<T>> {
    let rhs: Vec<T> = gen.b.iter().map(|x| -*x).collect();
    match solve_real_rank_revealing(&gen.lambda, &rhs, T::of(STEADY_STATE_RANK_TOL))? {
        RankRevealingSolve::Unique(r) => Ok(BlochVector::new_unchecked(gen.dim_hilbert, r)),
        RankRevealingSolve::Deficient { rank } => Err(Error::NonUniqueSteadyState {
            rank,
            dim: gen.lambda.dim(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gell_mann_basis;
    use crate::bloch::embed;
    use crate::matrix::pauli;

    fn pt(g: f64, gamma: f64) -> LindbladModel<f64> {
        let [x, _, z] = pauli::<f64>();
        LindbladModel::new(
            HermitianOperator::new(x.scale_real(g / 2.0)).unwrap(),
            vec![z.scale_real(gamma.sqrt())],
        )
        .unwrap()
    }

    #[test]
    fn pt_lambda_matches_closed_form() {
        let (g, gamma) = (1.3f64, 0.45f64);
        let gen = build_affine(&pt(g, gamma), &gell_mann_basis(2).unwrap()).unwrap();
        let want = [
            [-2.0 * gamma, 0.0, 0.0],
            [0.0, -2.0 * gamma, -g],
            [0.0, g, 0.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((gen.lambda()[(i, j)] - want[i][j]).abs() < 1e-14, "({i},{j})");
            }
        }
        assert!(gen.b().iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn raising_plus_lowering_pair_has_zero_drift() {
        let [x, y, _] = pauli::<f64>();
        let i = c(0.0, 1.0);
        let plus = &x + &y.scale(i);
        let minus = &x - &y.scale(i);
        let model =
            LindbladModel::new(HermitianOperator::zeros(2), vec![plus.clone(), minus]).unwrap();
        let gen = build_affine(&model, &gell_mann_basis(2).unwrap()).unwrap();
        assert!(gen.b().iter().all(|v| v.abs() < 1e-14));
        // a single raising operator alone does drive the state
        let single = LindbladModel::new(HermitianOperator::zeros(2), vec![plus]).unwrap();
        let gen = build_affine(&single, &gell_mann_basis(2).unwrap()).unwrap();
        assert!(gen.b()[2].abs() > 1.0);
    }

    #[test]
    fn dephasing_of_maximally_mixed_state_vanishes() {
        let [_, _, z] = pauli::<f64>();
        let model =
            LindbladModel::new(HermitianOperator::zeros(2), vec![z.scale_real(0.7f64.sqrt())])
                .unwrap();
        let d = dissipator_apply(&model, &DensityMatrix::maximally_mixed(2).unwrap()).unwrap();
        assert!(d.matrix().max_abs() < 1e-16);
    }

    #[test]
    fn dephasing_damps_coherences_at_twice_the_rate() {
        // L = sqrt(gamma) sigma_z on |+><+|: D rho = -2 gamma * (off-diagonal part of rho)
        let gamma = 0.37f64;
        let [_, _, z] = pauli::<f64>();
        let model =
            LindbladModel::new(HermitianOperator::zeros(2), vec![z.scale_real(gamma.sqrt())])
                .unwrap();
        let plus = DensityMatrix::from_pure(&[cr(1.0), cr(1.0)]).unwrap();
        let d = dissipator_apply(&model, &plus).unwrap();
        let want = CMatrix::from_rows(&[
            vec![cr(0.0), cr(-gamma)],
            vec![cr(-gamma), cr(0.0)],
        ])
        .unwrap();
        assert!((d.matrix() - &want).max_abs() < 1e-15);
    }

    #[test]
    fn eigenprojector_of_hamiltonian_is_stationary() {
        let h = HermitianOperator::from_real_diagonal(&[0.3, -1.1, 2.0]);
        let model = LindbladModel::unitary(h).unwrap();
        let rho = DensityMatrix::basis_state(3, 1).unwrap();
        let out = generator_apply(&model, &rho).unwrap();
        assert_eq!(out.matrix().max_abs(), 0.0);
    }

    #[test]
    fn generator_matches_affine_form_for_pt_model() {
        let model = pt(1.0, 0.2);
        let basis = gell_mann_basis(2).unwrap();
        let gen = build_affine(&model, &basis).unwrap();
        let rho = DensityMatrix::from_pure(&[c(0.6, 0.1), c(-0.2, 0.7)]).unwrap();
        let r = embed(&rho, &basis).unwrap();
        let direct =
            crate::bloch::embed_traceless(generator_apply(&model, &rho).unwrap().matrix(), &basis)
                .unwrap();
        for (a, b) in direct.iter().zip(gen.velocity(r.components())) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn pt_spectrum_matches_formula() {
        for &(g, gamma) in &[(1.0f64, 0.2f64), (1.0, 1.0), (1.0, 4.0)] {
            let gen = build_affine(&pt(g, gamma), &gell_mann_basis(2).unwrap()).unwrap();
            let ev = spectrum(&gen).unwrap();
            let disc = C::new(gamma * gamma - g * g, 0.0).sqrt();
            let mut want = vec![
                cr(0.0),
                cr(-2.0 * gamma),
                cr(-gamma) + disc,
                cr(-gamma) - disc,
            ];
            sort_spectrum(&mut want);
            for (a, b) in ev.iter().zip(&want) {
                assert!((a - b).norm() < 1e-10, "g={g} gamma={gamma}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn unitary_spectrum_is_imaginary_differences() {
        let energies = [0.5f64, -0.25, 1.75];
        let model =
            LindbladModel::unitary(HermitianOperator::from_real_diagonal(&energies)).unwrap();
        let gen = build_affine(&model, &gell_mann_basis(3).unwrap()).unwrap();
        let ev = spectrum(&gen).unwrap();
        assert!(ev.iter().all(|z| z.re.abs() < 1e-12));
        let mut want: Vec<f64> = energies
            .iter()
            .flat_map(|a| energies.iter().map(move |b| a - b))
            .collect();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut got: Vec<f64> = ev.iter().map(|z| z.im).collect();
        got.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dephasing_steady_state_is_not_unique() {
        let [_, _, z] = pauli::<f64>();
        let model = LindbladModel::new(
            HermitianOperator::new(z.scale_real(0.5)).unwrap(),
            vec![z.scale_real(0.3f64.sqrt())],
        )
        .unwrap();
        let gen = build_affine(&model, &gell_mann_basis(2).unwrap()).unwrap();
        assert_eq!(
            steady_state(&gen),
            Err(Error::NonUniqueSteadyState { rank: 2, dim: 3 })
        );
    }

    #[test]
    fn pt_steady_state_is_origin() {
        let gen = build_affine(&pt(1.0, 0.2), &gell_mann_basis(2).unwrap()).unwrap();
        let r = steady_state(&gen).unwrap();
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn non_hermitian_hamiltonian_is_rejected_by_construction() {
        let m = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]]).unwrap();
        assert!(HermitianOperator::new(m).is_err());
    }

    #[test]
    fn model_rejects_mismatched_lindblad_dimension() {
        let r = LindbladModel::new(HermitianOperator::<f64>::zeros(2), vec![CMatrix::identity(3)]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
