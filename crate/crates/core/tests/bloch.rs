use lindblad_speed::{
    embed, gell_mann_basis, steady_state, build_affine, unembed, BlochVector, DensityMatrix, Error,
};
use lindblad_speed::models::{pt_model, PTParams};

#[test]
fn spin_up_embeds_on_the_z_axis() {
    let basis = gell_mann_basis::<f64>(2).unwrap();
    let r = embed(&DensityMatrix::basis_state(2, 0).unwrap(), &basis).unwrap();
    let want = [0.0f64, 0.0, std::f64::consts::FRAC_1_SQRT_2];
    for (a, b) in r.components().iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
    let origin = unembed(&BlochVector::<f64>::zero(2), &basis).unwrap();
    assert!((origin.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
}

#[test]
fn qutrit_boundary_contains_unphysical_points() {
    // diagonal Bloch vectors have diagonal density matrices, so positivity
    // can be read off the diagonal directly
    let basis = gell_mann_basis(3).unwrap();
    let radius = (2.0f64 / 3.0).sqrt();
    let (mut physical, mut unphysical) = (0, 0);
    for k in 0..72 {
        let a = k as f64 * std::f64::consts::TAU / 72.0;
        let mut c = vec![0.0; 8];
        c[6] = radius * a.cos();
        c[7] = radius * a.sin();
        let r = BlochVector::new(3, c).unwrap();
        let s3 = radius * a.cos() / 2f64.sqrt();
        let s8 = radius * a.sin() / 6f64.sqrt();
        let diag = [1.0 / 3.0 + s3 + s8, 1.0 / 3.0 - s3 + s8, 1.0 / 3.0 - 2.0 * s8];
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        match unembed(&r, &basis) {
            Ok(_) => {
                assert!(min >= -1e-10);
                physical += 1;
            }
            Err(Error::UnphysicalBlochVector { min_eigenvalue }) => {
                assert!((min_eigenvalue - min).abs() < 1e-12);
                unphysical += 1;
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert!(unphysical > 0 && physical > 0);
}

#[test]
fn steady_state_satisfies_its_equation() {
    let basis = gell_mann_basis(2).unwrap();
    let gen = build_affine(&pt_model(&PTParams { g: 1.0f64, gamma: 0.2 }).unwrap(), &basis).unwrap();
    let r = steady_state(&gen).unwrap();
    let res: f64 = gen.velocity(r.components()).iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert!(res <= 1e-10);
}
