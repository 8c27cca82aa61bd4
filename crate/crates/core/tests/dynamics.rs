mod common;

use lindblad_speed::models::{pt_model, PTParams};
use lindblad_speed::{
    build_affine, embed, evolve_affine, evolve_operator, evolve_operator_with, gell_mann_basis,
    Backend, BlochVector, DensityMatrix, Error, RkOptions, States, TimeGrid,
};

#[test]
fn time_grid_rejects_degenerate_ranges() {
    assert!(matches!(TimeGrid::new(0.0, -1.0, 10), Err(Error::InvalidGrid(_))));
    assert!(matches!(TimeGrid::new(0.0, 1.0, 1), Err(Error::InvalidGrid(_))));
    assert!(matches!(TimeGrid::new(0.0, f64::NAN, 3), Err(Error::InvalidGrid(_))));
    let g = TimeGrid::new(1.0f64, 3.0, 201).unwrap();
    assert_eq!(g.times().len(), 201);
    assert_eq!(*g.times().last().unwrap(), 3.0);
    assert!((g.spacing() - 0.01).abs() < 1e-15);
}

#[test]
fn backends_reject_mismatched_dimensions() {
    let model = pt_model(&PTParams { g: 1.0f64, gamma: 0.2 }).unwrap();
    let grid = TimeGrid::new(0.0, 1.0, 3).unwrap();
    let rho3 = DensityMatrix::maximally_mixed(3).unwrap();
    assert!(matches!(
        evolve_operator(&model, &rho3, &grid),
        Err(Error::DimensionMismatch { .. })
    ));
    let gen = build_affine(&model, &gell_mann_basis(2).unwrap()).unwrap();
    assert!(evolve_affine(&gen, &BlochVector::zero(3), &grid).is_err());
}

#[test]
fn pt_broken_phase_follows_closed_form() {
    let p = PTParams { g: 1.0f64, gamma: 0.2 };
    let basis = gell_mann_basis(2).unwrap();
    let gen = build_affine(&pt_model(&p).unwrap(), &basis).unwrap();
    let r0 = BlochVector::new(2, vec![0.2, -0.3, 0.4]).unwrap();
    let grid = TimeGrid::new(0.0, 5.0 * p.period().unwrap(), 301).unwrap();
    let traj = evolve_affine(&gen, &r0, &grid).unwrap();
    assert_eq!(traj.backend(), Backend::Affine);
    let oracle = p.analytic_trajectory(&r0).unwrap();
    for (t, r) in traj.times().iter().zip(traj.bloch_vectors(&basis).unwrap()) {
        let want = oracle(*t);
        for k in 0..3 {
            assert!((r.components()[k] - want[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn pt_unbroken_phase_relaxes_to_the_centre() {
    let p = PTParams { g: 1.0, gamma: 4.0 };
    let basis = gell_mann_basis(2).unwrap();
    let gen = build_affine(&pt_model(&p).unwrap(), &basis).unwrap();
    let r0 = embed(&DensityMatrix::basis_state(2, 0).unwrap(), &basis).unwrap();
    let traj = evolve_affine(&gen, &r0, &TimeGrid::new(0.0, 200.0, 11).unwrap()).unwrap();
    let States::Bloch(rs) = traj.states() else { panic!("affine backend stores Bloch vectors") };
    assert!(rs.last().unwrap().norm() < 1e-10);
}

#[test]
fn operator_backend_matches_affine_on_random_models() {
    let mut rng = common::rng(41);
    for k in 0..9 {
        let n = 2 + k % 3;
        let basis = gell_mann_basis(n).unwrap();
        let model = common::random_model(&mut rng, n);
        let rho0 = common::random_state(&mut rng, n);
        let grid = TimeGrid::new(0.0, 1.5, 16).unwrap();
        let gen = build_affine(&model, &basis).unwrap();
        let a = evolve_affine(&gen, &embed(&rho0, &basis).unwrap(), &grid).unwrap();
        let o = evolve_operator(&model, &rho0, &grid).unwrap();
        assert_eq!(o.backend(), Backend::Operator);
        let am = a.density_matrices(&basis).unwrap();
        for (x, y) in am.iter().zip(o.density_states().unwrap()) {
            assert!((x.matrix() - y.matrix()).max_abs() < 1e-8);
        }
    }
}

#[test]
fn coarse_steps_are_flagged_not_repaired() {
    // a single huge RK4 step overshoots an amplitude-damping channel
    let mut lower = lindblad_speed::CMatrix::zeros(2);
    lower[(1, 0)] = lindblad_speed::C::new(3.0, 0.0);
    let model = lindblad_speed::LindbladModel::new(lindblad_speed::HermitianOperator::zeros(2), vec![lower]).unwrap();
    let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
    let opts = RkOptions { substeps: Some(1), ..RkOptions::default() };
    let traj = evolve_operator_with(&model, &rho0, &TimeGrid::new(0.0, 1.0, 3).unwrap(), &opts).unwrap();
    let v = traj.positivity_violation().expect("violation recorded");
    assert!(v.min_eigenvalue < -1e-7);
    assert_eq!(traj.len(), 3);
    let fine = evolve_operator(&model, &rho0, &TimeGrid::new(0.0, 1.0, 3).unwrap()).unwrap();
    assert!(fine.positivity_violation().is_none());
}
