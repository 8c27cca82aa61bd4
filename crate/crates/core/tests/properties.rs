mod common;

use common::{
    random_hermitian, random_matrix, random_model, random_pure, random_state,
    random_unit_traceless, rng,
};
use lindblad_speed::linalg::matrix_exp;
use lindblad_speed::{
    build_affine, embed, evolve_operator, gell_mann_basis, hs_inner, modified_skew_information,
    spectrum, speed_gradient, speed_squared, unembed, CMatrix, DensityMatrix, HermitianOperator,
    LindbladModel, TimeGrid, C,
};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = usize> {
    2usize..=4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn basis_is_complete(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let basis = gell_mann_basis(n).unwrap();
        let a = random_hermitian(&mut rng, n, 1.0);
        let coords = basis.coordinates(a.matrix()).unwrap();
        let back = basis.reconstruct(&coords).unwrap();
        prop_assert!((&back - a.matrix()).max_abs() <= 1e-12);
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let a = random_matrix(&mut rng, n, 1.0);
        let b = random_matrix(&mut rng, n, 1.0);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-13);
        let aa = hs_inner(&a, &a).unwrap();
        prop_assert!(aa.re >= 0.0 && aa.im.abs() <= 1e-13);
    }

    #[test]
    fn exponential_of_commuting_sum_factorises(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let a = random_matrix(&mut rng, n, 0.5);
        // any polynomial in A commutes with A
        let mut b = a.matmul(&a).scale(C::new(0.3, -0.1));
        b.axpy(C::new(-0.7, 0.2), &a);
        let lhs = matrix_exp(&(&a + &b)).unwrap();
        let rhs = matrix_exp(&a).unwrap().matmul(&matrix_exp(&b).unwrap());
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-10 * lhs.max_abs().max(1.0));
    }

    #[test]
    fn embedding_round_trips(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let basis = gell_mann_basis(n).unwrap();
        let rho = random_state(&mut rng, n);
        let r = embed(&rho, &basis).unwrap();
        let back = unembed(&r, &basis).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).max_abs() <= 1e-12);
        let r2 = embed(&back, &basis).unwrap();
        for (x, y) in r.components().iter().zip(r2.components()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn embedding_is_an_affine_isometry(seed in any::<u64>(), n in dims(), lam in 0.0f64..1.0) {
        let mut rng = rng(seed);
        let basis = gell_mann_basis(n).unwrap();
        let a = random_state(&mut rng, n);
        let b = random_pure(&mut rng, n);
        let ra = embed(&a, &basis).unwrap();
        let rb = embed(&b, &basis).unwrap();
        let diff = a.matrix() - b.matrix();
        let hs = diff.trace_of_product(&diff).re;
        let euclid: f64 = ra.components().iter().zip(rb.components()).map(|(x, y)| (x - y).powi(2)).sum();
        prop_assert!((hs - euclid).abs() <= 1e-12);

        let mut mix = a.matrix().scale_real(lam);
        mix.axpy(C::new(1.0 - lam, 0.0), b.matrix());
        let rm = embed(&DensityMatrix::new(mix).unwrap(), &basis).unwrap();
        for k in 0..ra.len() {
            let want = lam * ra.components()[k] + (1.0 - lam) * rb.components()[k];
            prop_assert!((rm.components()[k] - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn purity_and_radius_match_bloch_norm(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let basis = gell_mann_basis(n).unwrap();
        let rho = random_state(&mut rng, n);
        let r = embed(&rho, &basis).unwrap();
        let p = lindblad_speed::purity(&rho);
        prop_assert!((p - (1.0 / n as f64 + r.norm_sq())).abs() <= 1e-12);
        prop_assert!((lindblad_speed::radial_distance(&rho) - r.norm()).abs() <= 1e-12);
        prop_assert!(p >= 1.0 / n as f64 - 1e-12 && p <= 1.0 + 1e-12);
        let pure = embed(&random_pure(&mut rng, n), &basis).unwrap();
        prop_assert!((pure.norm_sq() - (1.0 - 1.0 / n as f64)).abs() <= 1e-10);
    }

    #[test]
    fn generator_output_is_traceless_hermitian(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let model = random_model(&mut rng, n);
        let rho = random_state(&mut rng, n);
        let out = lindblad_speed::liouvillian::generator_apply(&model, &rho).unwrap();
        prop_assert!(out.matrix().trace().norm() <= 1e-13);
        prop_assert!(out.matrix().hermiticity_deviation() <= 1e-12);
        let d = lindblad_speed::liouvillian::dissipator_apply(&model, &rho).unwrap();
        prop_assert!(d.matrix().trace().norm() <= 1e-13);
    }

    #[test]
    fn generator_agrees_with_affine_form(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let basis = gell_mann_basis(n).unwrap();
        let model = random_model(&mut rng, n);
        let rho = random_state(&mut rng, n);
        let gen = build_affine(&model, &basis).unwrap();
        let direct = lindblad_speed::liouvillian::generator_apply(&model, &rho).unwrap();
        let direct = lindblad_speed::bloch::embed_traceless(direct.matrix(), &basis).unwrap();
        let affine = gen.velocity(embed(&rho, &basis).unwrap().components());
        for (x, y) in direct.iter().zip(&affine) {
            prop_assert!((x - y).abs() <= 1e-11);
        }
    }

    #[test]
    fn affine_form_ignores_energy_offset(seed in any::<u64>(), n in dims(), shift in -5.0f64..5.0) {
        let mut rng = rng(seed);
        let basis = gell_mann_basis(n).unwrap();
        let model = random_model(&mut rng, n);
        let moved = model
            .with_hamiltonian(model.hamiltonian().plus(&HermitianOperator::identity(n).scaled(shift)))
            .unwrap();
        let a = build_affine(&model, &basis).unwrap();
        let b = build_affine(&moved, &basis).unwrap();
        for (x, y) in a.lambda().as_slice().iter().zip(b.lambda().as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn spectrum_is_conjugation_closed_and_stable(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let gen = build_affine(&random_model(&mut rng, n), &gell_mann_basis(n).unwrap()).unwrap();
        let eigs = spectrum(&gen).unwrap();
        prop_assert_eq!(eigs.len(), n * n);
        for z in &eigs {
            prop_assert!(z.re <= 1e-9);
            let partner = eigs.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner <= 1e-9);
        }
    }

    #[test]
    fn hermitian_jumps_give_no_drift(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let h = random_hermitian(&mut rng, n, 1.0);
        let ls = vec![random_hermitian(&mut rng, n, 0.5).into_matrix(), random_hermitian(&mut rng, n, 0.5).into_matrix()];
        let gen = build_affine(&LindbladModel::new(h, ls).unwrap(), &gell_mann_basis(n).unwrap()).unwrap();
        prop_assert!(gen.b().iter().all(|x| x.abs() <= 1e-14));
    }

    #[test]
    fn speed_sample_invariants(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let model = random_model(&mut rng, n);
        let rho = random_state(&mut rng, n);
        let s = speed_squared(&model, &rho).unwrap();
        prop_assert!((s.decomposition_sum() - s.v2).abs() <= 1e-10);
        prop_assert!((s.v_tangential.powi(2) + s.v_radial_signed.powi(2) - s.v2).abs() <= 1e-10);
        prop_assert!(s.term_unitary >= -1e-12);
        prop_assert!(s.term_dissipative >= -1e-12);
        prop_assert!(s.v_radial_signed.abs() <= s.v() + 1e-12);
    }

    #[test]
    fn unitary_term_is_twice_skew_of_hamiltonian(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let h = random_hermitian(&mut rng, n, 1.0);
        let model = LindbladModel::unitary(h.clone()).unwrap();
        let rho = random_state(&mut rng, n);
        let s = speed_squared(&model, &rho).unwrap();
        let skew = modified_skew_information(h.matrix(), &rho).unwrap();
        prop_assert!((s.term_unitary - 2.0 * skew).abs() <= 1e-12);
        prop_assert!((s.v2 - s.term_unitary).abs() <= 1e-12);
    }

    #[test]
    fn speed_gradient_is_linear_and_gauge_free(
        seed in any::<u64>(), n in dims(), alpha in -2.0f64..2.0, beta in -2.0f64..2.0, c in -3.0f64..3.0
    ) {
        let mut rng = rng(seed);
        let model = random_model(&mut rng, n);
        let rho = random_state(&mut rng, n);
        let d1 = random_hermitian(&mut rng, n, 1.0);
        let d2 = random_unit_traceless(&mut rng, n);
        let g = |d: &HermitianOperator<f64>| speed_gradient(&model, &rho, d).unwrap();
        let combo = d1.scaled(alpha).plus(&d2.scaled(beta));
        prop_assert!((g(&combo) - (alpha * g(&d1) + beta * g(&d2))).abs() <= 1e-10);
        let shifted = d1.plus(&HermitianOperator::identity(n).scaled(c));
        prop_assert!((g(&shifted) - g(&d1)).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn operator_backend_keeps_trace_and_hermiticity(seed in any::<u64>(), n in dims()) {
        let mut rng = rng(seed);
        let model = random_model(&mut rng, n);
        let rho0 = random_pure(&mut rng, n);
        let traj = evolve_operator(&model, &rho0, &TimeGrid::new(0.0, 3.0, 31).unwrap()).unwrap();
        for rho in traj.density_states().unwrap() {
            prop_assert!((rho.matrix().trace() - C::new(1.0, 0.0)).norm() <= 1e-10);
            prop_assert!(rho.matrix().hermiticity_deviation() <= 1e-10);
        }
        prop_assert!(traj.positivity_violation().is_none());
    }
}

#[test]
fn zero_matrix_skew_is_zero() {
    let rho = DensityMatrix::<f64>::maximally_mixed(3).unwrap();
    assert_eq!(modified_skew_information(&CMatrix::zeros(3), &rho).unwrap(), 0.0);
}
