use std::f64::consts::PI;

use ensemble_forge::ensembles::{sample, sample_circular, sample_hermite, sample_jacobi, sample_laguerre, EnsembleSpec, SamplerPath};
use ensemble_forge::stats::{ks_one_sample, ks_two_sample, moment_summary, numeric_marginal_cdf, Coordinate};
use ensemble_forge::{Error, RngState};
use rand::Rng;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};

const ALPHA: f64 = 0.01;

fn uniforms(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = RngState::new(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn uniform_against_uniform_and_normal() {
    let u = uniforms(100_000, 1);
    assert!(ks_one_sample(&u, |x| x.clamp(0.0, 1.0), ALPHA).unwrap().pass);
    let n = Normal::new(0.0, 1.0).unwrap();
    assert!(!ks_one_sample(&u, |x| n.cdf(x), ALPHA).unwrap().pass);
}

#[test]
fn ks_contract_errors() {
    let short = uniforms(50, 2);
    assert!(matches!(ks_one_sample(&short, |x| x, ALPHA), Err(Error::Contract(_))));
    let mut rev = uniforms(200, 3);
    rev.reverse();
    assert!(matches!(ks_one_sample(&rev, |x| x, ALPHA), Err(Error::Contract(_))));
    assert!(matches!(ks_two_sample(&uniforms(200, 4), &rev, ALPHA), Err(Error::Contract(_))));
}

#[test]
fn two_sample_cases() {
    let a = uniforms(10_000, 5);
    let r = ks_two_sample(&a, &a, ALPHA).unwrap();
    assert_eq!(r.statistic, 0.0);
    let mut sq: Vec<f64> = uniforms(10_000, 6).iter().map(|x| x * x).collect();
    sq.sort_by(f64::total_cmp);
    assert!(!ks_two_sample(&a, &sq, ALPHA).unwrap().pass);
}

#[test]
fn two_sample_statistic_matches_brute_force() {
    let a = uniforms(300, 7);
    let b: Vec<f64> = uniforms(200, 8).iter().map(|x| x * 0.9 + 0.05).collect();
    let ecdf = |v: &[f64], x: f64| v.iter().filter(|&&y| y <= x).count() as f64 / v.len() as f64;
    let brute = a.iter().chain(&b).map(|&x| (ecdf(&a, x) - ecdf(&b, x)).abs()).fold(0.0, f64::max);
    assert!((ks_two_sample(&a, &b, ALPHA).unwrap().statistic - brute).abs() < 1e-15);
}

#[test]
fn ks_calibration_under_null() {
    let reps = 1000;
    let mut rejected = 0;
    for k in 0..reps {
        let u = uniforms(500, 1000 + k);
        if !ks_one_sample(&u, |x| x, ALPHA).unwrap().pass {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / reps as f64;
    assert!((0.002..=0.03).contains(&rate), "rejection rate {rate}");
}

#[test]
fn p_value_tracks_threshold() {
    let u = uniforms(20_000, 9);
    let r = ks_one_sample(&u, |x| x, ALPHA).unwrap();
    assert!(r.p_value > ALPHA);
    let shifted = ks_one_sample(&u, |x| (x * 1.05).min(1.0), ALPHA).unwrap();
    assert!(shifted.p_value < ALPHA && !shifted.pass);
}

#[test]
fn quadrature_uniform_jacobi() {
    let spec = EnsembleSpec::jacobi(1, 1, 1, 2, SamplerPath::Gsvd).unwrap();
    let cdf = numeric_marginal_cdf(&spec, Coordinate::Min, 256).unwrap();
    for k in 0..=100 {
        let x = k as f64 / 100.0;
        assert!((cdf.eval(x) - x).abs() <= 1e-8);
    }
}

#[test]
fn quadrature_gaussian() {
    let spec = EnsembleSpec::hermite(1, 1).unwrap();
    let cdf = numeric_marginal_cdf(&spec, Coordinate::Min, 2048).unwrap();
    let n = Normal::new(0.0, 1.0).unwrap();
    let err = (0..=800).map(|k| -4.0 + k as f64 / 100.0).map(|x| (cdf.eval(x) - n.cdf(x)).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-6, "{err:e}");
}

#[test]
fn quadrature_arc_spacing() {
    let spec = EnsembleSpec::circular(2, 2, SamplerPath::Eig).unwrap();
    let cdf = numeric_marginal_cdf(&spec, Coordinate::ArcSpacing, 2048).unwrap();
    let err = (0..=314).map(|k| k as f64 / 100.0).map(|g| (cdf.eval(g) - (g - g.sin()) / PI).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-6, "{err:e}");
}

#[test]
fn quadrature_singular_endpoints() {
    // arcsine law: x^{-1/2} (1 - x)^{-1/2}
    let spec = EnsembleSpec::jacobi(1, 1, 1, 1, SamplerPath::Gsvd).unwrap();
    let cdf = numeric_marginal_cdf(&spec, Coordinate::Max, 512).unwrap();
    let law = Beta::new(0.5, 0.5).unwrap();
    let err = (1..100).map(|k| k as f64 / 100.0).map(|x| (cdf.eval(x) - law.cdf(x)).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-5, "{err:e}");
}

#[test]
fn quadrature_rank_two_order_statistics() {
    // two independent chi-square(1) variables have no Vandermonde factor,
    // so compare instead against a sampled batch
    let spec = EnsembleSpec::jacobi(3, 2, 2, 1, SamplerPath::Gsvd).unwrap();
    let batch = sample(&spec, 20_000, &mut RngState::new(10)).unwrap();
    for coord in [Coordinate::Min, Coordinate::Max] {
        let cdf = numeric_marginal_cdf(&spec, coord, 512).unwrap();
        assert!(cdf.values.windows(2).all(|w| w[0] <= w[1]));
        let data = if coord == Coordinate::Min { batch.minima() } else { batch.maxima() };
        let ks = ks_one_sample(&data, |x| cdf.eval(x), ALPHA).unwrap();
        assert!(ks.pass, "{coord:?}: {ks:?}");
    }
}

#[test]
fn quadrature_rejects_high_rank() {
    let spec = EnsembleSpec::hermite(3, 1).unwrap();
    assert!(matches!(numeric_marginal_cdf(&spec, Coordinate::Min, 64), Err(Error::Domain(_))));
}

#[test]
fn quadrature_reports_coarse_grids() {
    let spec = EnsembleSpec::laguerre(4, 2, 2).unwrap();
    assert!(matches!(numeric_marginal_cdf(&spec, Coordinate::Max, 8), Err(Error::Convergence(_))));
}

#[test]
fn laguerre_quadrature_matches_chi_square() {
    let spec = EnsembleSpec::laguerre(2, 1, 1).unwrap();
    let cdf = numeric_marginal_cdf(&spec, Coordinate::Min, 1024).unwrap();
    let chi = ChiSquared::new(2.0).unwrap();
    let err = (0..=300).map(|k| k as f64 / 10.0).map(|x| (cdf.eval(x) - chi.cdf(x)).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-6, "{err:e}");
}

#[test]
fn moments() {
    let b = sample_hermite(2, 1, 40_000, &mut RngState::new(11)).unwrap();
    let m = moment_summary(&b, &[2]).unwrap()[0];
    assert!((m.mean - 3.0).abs() <= 3.0 * m.std_error, "{m:?}");
    let b = sample_laguerre(1, 1, 1, 40_000, &mut RngState::new(12)).unwrap();
    let m = moment_summary(&b, &[1]).unwrap()[0];
    assert!((m.mean - 1.0).abs() <= 3.0 * m.std_error, "{m:?}");
    let b = sample_circular(3, 2, 100, &mut RngState::new(13), SamplerPath::Eig).unwrap();
    let m = moment_summary(&b, &[0]).unwrap()[0];
    assert_eq!(m.mean, 3.0);
}

#[test]
fn jacobi_quadrature_pass() {
    let b = sample_jacobi(2, 1, 1, 1, 50_000, &mut RngState::new(14), SamplerPath::Gsvd).unwrap();
    let cdf = numeric_marginal_cdf(&b.spec, Coordinate::Min, 512).unwrap();
    assert!(ks_one_sample(&b.column(0), |x| cdf.eval(x), ALPHA).unwrap().pass);
}
