use std::f64::consts::PI;

use ensemble_forge::pingpong::{
    build_ad, measure_root_multiplicities, split_kp_basis, verify_exponential_map, Ambient, Involution, LieAlgebraSpec,
};
use ensemble_forge::roots::{dimension_consistent_root_data, root_data, Root, SpaceType};
use ensemble_forge::{Error, RngState};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn diag(v: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { c(v[i]) } else { c(0.0) })
}

fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new((m + m.transpose()) * 0.5).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn gl2_ad_spectrum() {
    let spec = LieAlgebraSpec::gl_real(2).unwrap();
    let ad = build_ad(&spec, &diag(&[1.5, 0.25])).unwrap();
    let want = [-1.25, 0.0, 0.0, 1.25];
    for (a, b) in sorted_eigs(&ad).iter().zip(want) {
        assert!((a - b).abs() < 1e-14);
    }
    let zero = build_ad(&spec, &diag(&[0.0, 0.0])).unwrap();
    assert!(zero.amax() == 0.0);
}

#[test]
fn o21_ad_spectrum() {
    let spec = LieAlgebraSpec::o_pq(2, 1).unwrap();
    let h = spec.torus_element(&[0.7]);
    let ad = build_ad(&spec, &h).unwrap();
    let e = sorted_eigs(&ad);
    for (a, b) in e.iter().zip([-0.7, 0.0, 0.7]) {
        assert!((a - b).abs() < 1e-14, "{e:?}");
    }
}

#[test]
fn h_outside_torus_is_rejected() {
    let spec = LieAlgebraSpec::gl_real(2).unwrap();
    let mut h = diag(&[1.0, 0.0]);
    h[(0, 1)] = c(1.0);
    assert!(matches!(build_ad(&spec, &h), Err(Error::Chamber(_))));
}

#[test]
fn non_commuting_involutions_rejected() {
    let rot = DMatrix::from_row_slice(3, 3, &[c(0.6), c(-0.8), c(0.0), c(0.8), c(0.6), c(0.0), c(0.0), c(0.0), c(1.0)]);
    let r = LieAlgebraSpec::new(
        "bad",
        Ambient::O(3),
        Involution::Inner(diag(&[1.0, -1.0, 1.0])),
        Involution::Inner(&rot * diag(&[1.0, -1.0, 1.0]) * rot.adjoint()),
        vec![diag(&[0.0, 0.0, 0.0])],
    );
    assert!(matches!(r, Err(Error::Involution(_))));
}

#[test]
fn exponential_of_eigenmatrix() {
    let spec = LieAlgebraSpec::gl_real(2).unwrap();
    let h = diag(&[1.0, 0.0]);
    let e = build_ad(&spec, &h).unwrap().exp();
    let mut y = DMatrix::zeros(2, 2);
    y[(0, 1)] = c(1.0);
    let out = spec.from_coordinates(&(e * spec.coordinates(&y)));
    assert!((out[(0, 1)].re - 1f64.exp()).abs() < 1e-13);
    assert!(out.iter().enumerate().all(|(k, z)| k == 2 || z.norm() < 1e-13));
    let mut rng = RngState::new(0);
    assert!(verify_exponential_map(&spec, &diag(&[0.0, 0.0]), 5, &mut rng).unwrap() < 1e-15);
}

#[test]
fn exponential_map_identities() {
    let mut rng = RngState::new(4);
    let specs = [
        LieAlgebraSpec::gl_real(4).unwrap(),
        LieAlgebraSpec::u_csd(2, 2, 2).unwrap(),
        LieAlgebraSpec::o_pq(3, 2).unwrap(),
        LieAlgebraSpec::for_space(SpaceType::BDI_I { p: 3, q: 2, s: 2 }).unwrap(),
    ];
    for spec in &specs {
        let h: Vec<f64> = (0..spec.torus_rank()).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let r = verify_exponential_map(spec, &spec.torus_element(&h), 50, &mut rng).unwrap();
        assert!(r <= 1e-9, "{}: {r:e}", spec.label);
    }
}

#[test]
fn ping_pong_relations() {
    let spec = LieAlgebraSpec::gl_real(3).unwrap();
    let h = spec.torus_element(&[0.9, -0.2, 0.4]);
    let rep = split_kp_basis(&spec, &h).unwrap();
    assert_eq!(rep.pairs.len(), 3);
    assert!(rep.roots.iter().all(|r| r.m_plus == 1 && r.m_minus == 0));
    for (key, v) in &rep.residuals {
        assert!(*v <= 1e-10, "{key}: {v:e}");
    }
    // k symmetric-antisymmetric pattern: tau = -X^T fixes antisymmetric k
    for pair in &rep.pairs {
        let k = spec.from_coordinates(&pair.k);
        let p = spec.from_coordinates(&pair.p);
        assert!((&k + k.transpose()).amax_norm() < 1e-10);
        assert!((&p - p.transpose()).amax_norm() < 1e-10);
    }
    assert_eq!(rep.kp_dims, [3, 0, 0, 6]);
}

trait AmaxNorm {
    fn amax_norm(&self) -> f64;
}

impl AmaxNorm for DMatrix<Complex64> {
    fn amax_norm(&self) -> f64 {
        self.iter().fold(0.0, |a, z| a.max(z.norm()))
    }
}

#[test]
fn ai_ii_mixed_multiplicities() {
    let spec = LieAlgebraSpec::for_space(SpaceType::AI_II { n: 2 }).unwrap();
    let h = spec.torus_element(&[0.3, 1.1]);
    let rep = split_kp_basis(&spec, &h).unwrap();
    assert_eq!(rep.roots.len(), 1);
    assert_eq!((rep.roots[0].m_plus, rep.roots[0].m_minus), (2, 2));
    assert!((rep.roots[0].value - 0.8).abs() < 1e-12);
}

#[test]
fn measurement_examples() {
    let mut rng = RngState::new(3);
    let d = measure_root_multiplicities(&LieAlgebraSpec::for_space(SpaceType::AI { n: 3 }).unwrap(), &mut rng).unwrap();
    assert_eq!(d.roots.len(), 3);
    assert!(d.roots.iter().all(|r| (r.m_plus, r.m_minus) == (1, 0)));
    let d = measure_root_multiplicities(&LieAlgebraSpec::u_csd(2, 2, 1).unwrap(), &mut rng).unwrap();
    assert_eq!(
        d.roots,
        vec![Root { coeffs: vec![1], m_plus: 2, m_minus: 2 }, Root { coeffs: vec![2], m_plus: 1, m_minus: 0 }]
    );
    let spec = LieAlgebraSpec::for_space(SpaceType::CII_noncompact { p: 2, q: 1 }).unwrap();
    let d = measure_root_multiplicities(&spec, &mut rng).unwrap();
    assert_eq!(
        d.roots,
        vec![Root { coeffs: vec![1], m_plus: 4, m_minus: 0 }, Root { coeffs: vec![2], m_plus: 3, m_minus: 0 }]
    );
}

#[test]
fn measured_tables_match() {
    let mut rng = RngState::new(1);
    for space in SpaceType::enumerate(3, 2, 5) {
        let spec = LieAlgebraSpec::for_space(space).unwrap();
        let measured = measure_root_multiplicities(&spec, &mut rng).unwrap();
        assert_eq!(measured, dimension_consistent_root_data(space).unwrap(), "{space}");
        let printed = root_data(space).unwrap();
        let differs = matches!(space, SpaceType::DI_III { p, q } | SpaceType::AII_III { p, q } if p > q);
        assert_eq!(measured != printed, differs, "{space}");
    }
}

#[test]
fn dimension_bookkeeping() {
    for space in SpaceType::enumerate(4, 3, 8) {
        if space.torus_rank() > 3 || matches!(space, SpaceType::AII_noncompact { n } | SpaceType::AI_II { n } if n > 3) {
            continue;
        }
        let spec = LieAlgebraSpec::for_space(space).unwrap();
        let h: Vec<f64> = (0..spec.torus_rank()).map(|j| 0.31 + PI / 7.0 * (j as f64 + 1.0).sqrt()).collect();
        let rep = split_kp_basis(&spec, &spec.torus_element(&h)).unwrap();
        let total: u32 = rep.roots.iter().map(|r| 2 * (r.m_plus + r.m_minus)).sum();
        assert_eq!(total as usize + rep.zero_dim, spec.dim(), "{space}");
        assert_eq!(rep.kp_dims.iter().sum::<usize>(), spec.dim());
        for (key, v) in &rep.residuals {
            assert!(*v <= 1e-9, "{space} {key}: {v:e}");
        }
    }
}
