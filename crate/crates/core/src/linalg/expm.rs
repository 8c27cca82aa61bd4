//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, picked from the 1-norm.

use crate::error::{Error, Result};
use crate::linalg::solve::solve_complex;
use crate::matrix::CMatrix;
use crate::scalar::{cr, Real};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

// Beyond this many squarings the result overflows for any sensible input.
const MAX_SQUARINGS: i32 = 1000;

fn one_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    (0..n)
        .map(|j| (0..n).fold(T::zero(), |acc, i| acc + a[(i, j)].norm()))
        .fold(T::zero(), T::max)
}

fn lin_comb<T: Real>(terms: &[(f64, &CMatrix<T>)], with_identity: Option<f64>) -> CMatrix<T> {
    let n = terms[0].1.dim();
    let mut out = CMatrix::zeros(n);
    for (coef, m) in terms {
        out.axpy(cr(T::of(*coef)), m);
    }
    if let Some(c0) = with_identity {
        for i in 0..n {
            out[(i, i)] += cr(T::of(c0));
        }
    }
    out
}

fn pade_low<T: Real>(a: &CMatrix<T>, b: &[f64]) -> (CMatrix<T>, CMatrix<T>) {
    // powers A^2, A^4, ... up to A^(m-1)
    let m = b.len() - 1;
    let a2 = a.matmul(a);
    let mut evens = vec![CMatrix::identity(a.dim()), a2.clone()];
    while evens.len() * 2 <= m {
        let next = evens.last().unwrap().matmul(&a2);
        evens.push(next);
    }
    let n = a.dim();
    let mut u_inner = CMatrix::zeros(n);
    let mut v = CMatrix::zeros(n);
    for (k, p) in evens.iter().enumerate() {
        if 2 * k < m {
            u_inner.axpy(cr(T::of(b[2 * k + 1])), p);
        }
        if 2 * k <= m {
            v.axpy(cr(T::of(b[2 * k])), p);
        }
    }
    (a.matmul(&u_inner), v)
}

fn pade13<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let b = &B13;
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let u_hi = lin_comb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], None);
    let mut u_inner = a6.matmul(&u_hi);
    u_inner += &lin_comb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], Some(b[1]));
    let u = a.matmul(&u_inner);
    let v_hi = lin_comb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], None);
    let mut v = a6.matmul(&v_hi);
    v += &lin_comb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], Some(b[0]));
    (u, v)
}

/// `exp(A)` for a dense complex matrix.
pub fn matrix_exp<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = one_norm(a).to_f64_lossy();
    let (u, v, squarings) = if let Some(&(m, _)) = THETA.iter().find(|(_, th)| norm <= *th) {
        let coeffs: &[f64] = match m {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            _ => &B9,
        };
        let (u, v) = pade_low(a, coeffs);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        if s > MAX_SQUARINGS {
            return Err(Error::ExpOverflow);
        }
        let scaled = a.scale_real(T::of(2f64.powi(-s)));
        let (u, v) = pade13(&scaled);
        (u, v, s)
    };
    let mut r = solve_complex(&(&v - &u), &(&v + &u)).map_err(|_| Error::ExpOverflow)?;
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    if !r.is_finite() {
        return Err(Error::ExpOverflow);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;
    use crate::scalar::c;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp(&CMatrix::<f64>::zeros(3)).unwrap();
        assert_eq!(e, CMatrix::identity(3));
    }

    #[test]
    fn exp_of_diagonal() {
        for &(a, b) in &[(0.001f64, -0.002f64), (0.3, -0.7), (1.5, 2.0), (-7.0, 12.0)] {
            let d = CMatrix::diagonal(&[cr(a), cr(b)]);
            let e = matrix_exp(&d).unwrap();
            let ea: f64 = a.exp();
            let eb: f64 = b.exp();
            assert!((e[(0, 0)].re - ea).abs() <= 1e-12 * ea, "{a}");
            assert!((e[(1, 1)].re - eb).abs() <= 1e-12 * eb, "{b}");
            assert!(e[(0, 1)].norm() < 1e-300 && e[(1, 0)].norm() < 1e-300);
        }
    }

    #[test]
    fn rotation_generator_matches_euler_formula() {
        // exp(i theta sigma_x) = cos(theta) I + i sin(theta) sigma_x
        let [x, _, _] = pauli::<f64>();
        for &theta in &[0.01, 0.4, 1.3, 3.0, 11.0] {
            let e = matrix_exp(&x.scale(c(0.0, theta))).unwrap();
            let expected = CMatrix::from_vec(
                2,
                vec![
                    cr(theta.cos()),
                    c(0.0, theta.sin()),
                    c(0.0, theta.sin()),
                    cr(theta.cos()),
                ],
            )
            .unwrap();
            assert!((&e - &expected).max_abs() <= 1e-12, "theta = {theta}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let d = CMatrix::diagonal(&[cr(1e6_f64), cr(0.0)]);
        assert_eq!(matrix_exp(&d), Err(Error::ExpOverflow));
    }

    #[test]
    fn works_in_single_precision() {
        let [_, _, z] = pauli::<f32>();
        let e = matrix_exp(&z.scale_real(0.5)).unwrap();
        assert!((e[(0, 0)].re - 0.5f32.exp()).abs() < 1e-6);
    }
}
