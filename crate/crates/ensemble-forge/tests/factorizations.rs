use ensemble_forge::factorizations::{
    csd, gsvd, odo_decompose, qdq_decompose, skew_hamiltonian_angles, structure_check, symmetric_unitary_angles,
    symplectic_residual, Partition,
};
use ensemble_forge::matrix::{sample_gaussian_matrix, sample_haar, svd, unitary_eigenangles};
use ensemble_forge::{DenseMatrix, Error, FieldTag, RngState};
use num_complex::Complex64;

fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.complex().iter().zip(b.complex().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn csd_of_identity() {
    let part = Partition::new(2, 2, 2, 2).unwrap();
    let u = DenseMatrix::identity(FieldTag::Real, 4);
    let r = csd(&u, part).unwrap();
    assert!(r.theta.iter().all(|t| t.abs() < 1e-15));
    assert!(max_diff(&r.reconstruct(), &u) < 1e-14);
}

#[test]
fn csd_of_rotation() {
    let phi = 0.7f64;
    let (s, c) = phi.sin_cos();
    let u = DenseMatrix::from_real_rows(2, 2, &[c, s, -s, c]).unwrap();
    let r = csd(&u, Partition::new(1, 1, 1, 1).unwrap()).unwrap();
    assert!((r.theta[0] - phi).abs() < 1e-14);
    assert!(max_diff(&r.reconstruct(), &u) < 1e-14);
}

#[test]
fn csd_haar_o5_matches_block_svd() {
    let mut rng = RngState::new(5);
    let u = sample_haar(FieldTag::Real, 5, &mut rng).unwrap();
    let part = Partition::new(3, 2, 4, 1).unwrap();
    let r = csd(&u, part).unwrap();
    assert!(max_diff(&r.reconstruct(), &u) <= 1e-10 * 5.0);
    assert!(r.factor_residual() <= 1e-10);
    // the q x s corner carries the cosines
    let corner = u.complex().view((3, 4), (2, 1)).into_owned();
    let s = svd(&DenseMatrix::new(FieldTag::Real, corner).unwrap());
    assert!((r.theta[0].cos().powi(2) - s.sigma[0].powi(2)).abs() < 1e-12);
}

#[test]
fn csd_rejects_bad_input() {
    let m = DenseMatrix::from_real_rows(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
    assert!(matches!(csd(&m, Partition::new(1, 1, 1, 1).unwrap()), Err(Error::NotUnitary { .. })));
    let u = DenseMatrix::identity(FieldTag::Real, 3);
    assert!(matches!(csd(&u, Partition::new(1, 1, 1, 1).unwrap()), Err(Error::Dimension(_))));
    assert!(Partition::new(2, 1, 1, 2).is_err());
    assert!(Partition::new(2, 2, 3, 2).is_err());
}

#[test]
fn csd_all_fields_random() {
    let mut rng = RngState::new(17);
    for field in [FieldTag::Real, FieldTag::Complex, FieldTag::Quaternion] {
        for &(p, q, s) in &[(2, 2, 1), (3, 2, 2), (4, 3, 2), (2, 3, 1), (1, 1, 1)] {
            let part = Partition::new(p, q, p + q - s, s).unwrap();
            let u = sample_haar(field, p + q, &mut rng).unwrap();
            let r = csd(&u, part).unwrap();
            let n = (p + q) as f64;
            assert!(max_diff(&r.reconstruct(), &u) <= 1e-10 * n, "{field:?} {p} {q} {s}");
            assert!(r.factor_residual() <= 1e-10, "{field:?} {p} {q} {s}: {}", r.factor_residual());
            assert!(r.theta.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn gsvd_identity_pair() {
    let a = DenseMatrix::identity(FieldTag::Real, 2);
    let r = gsvd(&a, &a).unwrap();
    for t in &r.theta {
        assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
    }
}

#[test]
fn gsvd_ratios_are_singular_values_of_quotient() {
    let mut rng = RngState::new(2);
    let a = sample_gaussian_matrix(FieldTag::Complex, 3, 2, &mut rng).unwrap();
    let b = sample_gaussian_matrix(FieldTag::Complex, 2, 2, &mut rng).unwrap();
    let r = gsvd(&a, &b).unwrap();
    let binv = b.complex().clone().try_inverse().unwrap();
    let quot = DenseMatrix::new(FieldTag::Complex, a.complex() * binv).unwrap();
    let sv = svd(&quot).sigma;
    let ratios = r.ratios();
    for (x, y) in ratios.iter().zip(&sv) {
        assert!((x - y).abs() <= 1e-9 * y.max(1.0), "{x} vs {y}");
    }
    let (ra, rb) = r.reconstruct();
    assert!(max_diff(&ra, &a) <= 1e-10);
    assert!(max_diff(&rb, &b) <= 1e-10);
}

#[test]
fn gsvd_rank_deficient() {
    let a = DenseMatrix::from_real_rows(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
    let b = DenseMatrix::from_real_rows(2, 2, &[2.0, 2.0, 0.0, 0.0]).unwrap();
    assert!(matches!(gsvd(&a, &b), Err(Error::Singular { .. })));
}

#[test]
fn odo_real_input() {
    let mut rng = RngState::new(4);
    let o = sample_haar(FieldTag::Real, 4, &mut rng).unwrap();
    let u = DenseMatrix::new(FieldTag::Complex, o.complex().clone()).unwrap();
    let r = odo_decompose(&u, &mut rng).unwrap();
    for d in &r.d {
        assert!((d.re.abs() - 1.0).abs() < 1e-12 || (d.im.abs() - 1.0).abs() < 1e-12);
        assert!((d * d - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
    assert!(max_diff(&r.reconstruct(), &u) < 1e-10);
}

#[test]
fn odo_scalar() {
    let phi = 2.5;
    let u = DenseMatrix::from_complex_rows(1, 1, &[Complex64::from_polar(1.0, phi)]).unwrap();
    let mut rng = RngState::new(0);
    let r = odo_decompose(&u, &mut rng).unwrap();
    assert!((r.d[0] - Complex64::from_polar(1.0, phi)).norm() < 1e-14);
    assert!((r.o1.complex()[(0, 0)].re.abs() - 1.0).abs() < 1e-14);
}

#[test]
fn odo_haar_u4() {
    let mut rng = RngState::new(8);
    for _ in 0..20 {
        let u = sample_haar(FieldTag::Complex, 4, &mut rng).unwrap();
        let r = odo_decompose(&u, &mut rng).unwrap();
        assert!(max_diff(&r.reconstruct(), &u) <= 1e-9);
        assert!(structure_check(&r.o1) <= 1e-10 && structure_check(&r.o2) <= 1e-10);
        let oracle = symmetric_unitary_angles(&u);
        for (a, b) in r.doubled_angles().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn qdq_of_symplectic_is_trivial() {
    let mut rng = RngState::new(1);
    // a unitary symplectic matrix: Q1 from a prior decomposition
    let u = sample_haar(FieldTag::Complex, 4, &mut rng).unwrap();
    let q = qdq_decompose(&u, &mut rng).unwrap().q1;
    let r = qdq_decompose(&q, &mut rng).unwrap();
    for d in &r.d {
        assert!((d - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn qdq_torus_element() {
    let phi = 1.1;
    let z = Complex64::from_polar(1.0, phi);
    let zero = Complex64::new(0.0, 0.0);
    let u = DenseMatrix::from_complex_rows(2, 2, &[z, zero, zero, z]).unwrap();
    let mut rng = RngState::new(2);
    let r = qdq_decompose(&u, &mut rng).unwrap();
    assert!((r.d[0] - z).norm() < 1e-12);
}

#[test]
fn qdq_haar_u4() {
    let mut rng = RngState::new(9);
    for _ in 0..20 {
        let u = sample_haar(FieldTag::Complex, 4, &mut rng).unwrap();
        let r = qdq_decompose(&u, &mut rng).unwrap();
        assert!(max_diff(&r.reconstruct(), &u) <= 1e-9);
        assert!(symplectic_residual(r.q1.complex()) <= 1e-10);
        assert!(symplectic_residual(r.q2.complex()) <= 1e-10);
        assert!(structure_check(&r.q1) <= 1e-10 && structure_check(&r.q2) <= 1e-10);
        let oracle = skew_hamiltonian_angles(&u);
        for (a, b) in r.doubled_angles().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn circular_angles_sorted() {
    let mut rng = RngState::new(3);
    let u = sample_haar(FieldTag::Complex, 5, &mut rng).unwrap();
    let a = unitary_eigenangles(&u);
    assert!(a.windows(2).all(|w| w[0] <= w[1]));
    assert!(a.iter().all(|x| (0.0..std::f64::consts::TAU).contains(x)));
}
