//! Verification suites behind `ensemble-forge verify`.
//!
//! Each suite returns one [`CheckRecord`] per check: the measured statistic,
//! the threshold it is compared with, and the verdict.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::ensembles::{sample, EnsembleSpec, SamplerPath};
use crate::error::{Error, Result};
use crate::factorizations::{csd, gsvd, odo_decompose, qdq_decompose, structure_check, symplectic_residual, Partition};
use crate::field::FieldTag;
use crate::matrix::{sample_gaussian_matrix, sample_haar, DenseMatrix};
use crate::pingpong::{measure_root_multiplicities, verify_exponential_map, LieAlgebraSpec};
use crate::rng::RngState;
use crate::roots::{root_data, Root, SpaceType};
use crate::stats::{ks_one_sample, ks_two_sample, numeric_marginal_cdf, Coordinate, KsResult};

pub const ALPHA: f64 = 0.01;

/// One verified property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub test: String,
    pub spec: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(test: &str, spec: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self { test: test.into(), spec: spec.into(), statistic, threshold, pass: statistic <= threshold }
    }

    pub fn ks(test: &str, spec: impl Into<String>, r: &KsResult) -> Self {
        Self { test: test.into(), spec: spec.into(), statistic: r.statistic, threshold: r.threshold, pass: r.pass }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Factorizations,
    Pingpong,
    Densities,
    Crosspath,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "factorizations" => Ok(Suite::Factorizations),
            "pingpong" => Ok(Suite::Pingpong),
            "densities" => Ok(Suite::Densities),
            "crosspath" => Ok(Suite::Crosspath),
            "all" => Ok(Suite::All),
            _ => Err(Error::Unsupported(format!("unknown suite `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Fewer trials, rank-one density checks only.
    pub fast: bool,
}

pub fn run_suite(suite: Suite, opts: VerifyOptions) -> Result<Vec<CheckRecord>> {
    Ok(match suite {
        Suite::Factorizations => factorization_checks(opts)?,
        Suite::Pingpong => pingpong_checks(opts)?,
        Suite::Densities => density_checks(opts)?,
        Suite::Crosspath => crosspath_checks(opts)?,
        Suite::All => {
            let mut all = factorization_checks(opts)?;
            all.extend(pingpong_checks(opts)?);
            all.extend(density_checks(opts)?);
            all.extend(crosspath_checks(opts)?);
            all
        }
    })
}

const FACTOR_TOL: f64 = 1e-10;

fn random_field(rng: &mut RngState) -> FieldTag {
    [FieldTag::Real, FieldTag::Complex, FieldTag::Quaternion][rng.random_range(0..3)]
}

/// Worst `(reconstruction / n, factor structure)` residuals of one random
/// instance of each factorization, with `n <= 12`.
pub fn csd_residuals(rng: &mut RngState) -> Result<(f64, f64)> {
    let field = random_field(rng);
    let n = rng.random_range(2..=12);
    let s = rng.random_range(1..=n / 2);
    let p = rng.random_range(s..=n - s);
    let u = sample_haar(field, n, rng)?;
    let r = csd(&u, Partition::new(p, n - p, n - s, s)?)?;
    Ok((r.reconstruct().distance(&u) / n as f64, r.factor_residual()))
}

pub fn gsvd_residuals(rng: &mut RngState) -> Result<(f64, f64)> {
    let field = random_field(rng);
    let s = rng.random_range(1..=6);
    let p = rng.random_range(s..=12 - s);
    let q = rng.random_range(s..=12 - p);
    let a = sample_gaussian_matrix(field, p, s, rng)?;
    let b = sample_gaussian_matrix(field, q, s, rng)?;
    let g = gsvd(&a, &b)?;
    let (ra, rb) = g.reconstruct();
    let scale = a.norm().max(b.norm()).max(1.0);
    let recon = ra.distance(&a).max(rb.distance(&b)) / (scale * (p + q) as f64);
    let cs = g.c.iter().zip(&g.s).map(|(c, s)| (c * c + s * s - 1.0).abs()).fold(0.0, f64::max);
    Ok((recon, structure_check(&g.u).max(structure_check(&g.v)).max(cs)))
}

pub fn odo_residuals(rng: &mut RngState) -> Result<(f64, f64)> {
    let n = rng.random_range(1..=12);
    let u = sample_haar(FieldTag::Complex, n, rng)?;
    let r = odo_decompose(&u, rng)?;
    let real = |m: &DenseMatrix| m.complex().iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
    let unit = r.d.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let structure = r.o1.unitarity_residual().max(r.o2.unitarity_residual()).max(real(&r.o1)).max(real(&r.o2)).max(unit);
    Ok((r.reconstruct().distance(&u) / n as f64, structure))
}

pub fn qdq_residuals(rng: &mut RngState) -> Result<(f64, f64)> {
    let n = rng.random_range(1..=6);
    let u = sample_haar(FieldTag::Complex, 2 * n, rng)?;
    let r = qdq_decompose(&u, rng)?;
    let structure = [&r.q1, &r.q2]
        .iter()
        .map(|q| q.unitarity_residual().max(symplectic_residual(q.complex())))
        .fold(0.0, f64::max);
    Ok((r.reconstruct().distance(&u) / (2 * n) as f64, structure))
}

fn factorization_checks(opts: VerifyOptions) -> Result<Vec<CheckRecord>> {
    let trials = if opts.fast { 20 } else { 200 };
    let mut rng = RngState::new(opts.seed);
    type Check = fn(&mut RngState) -> Result<(f64, f64)>;
    let cases: [(&str, Check); 4] =
        [("csd", csd_residuals), ("gsvd", gsvd_residuals), ("odo", odo_residuals), ("qdq", qdq_residuals)];
    let mut out = Vec::new();
    for (name, f) in cases {
        let (mut recon, mut structure) = (0.0f64, 0.0f64);
        for _ in 0..trials {
            let (a, b) = f(&mut rng)?;
            recon = recon.max(a);
            structure = structure.max(b);
        }
        let spec = format!("{trials} random inputs, n <= 12");
        out.push(CheckRecord::at_most(&format!("{name}_reconstruction"), spec.clone(), recon, FACTOR_TOL));
        out.push(CheckRecord::at_most(&format!("{name}_factor_structure"), spec, structure, FACTOR_TOL));
    }
    Ok(out)
}

/// Number of `(m+, m-)` entries that differ between two root lists.
pub fn table_mismatches(a: &[Root], b: &[Root]) -> usize {
    let key = |r: &Root| r.coeffs.clone();
    let mut count = 0;
    for r in a {
        match b.iter().find(|x| key(x) == key(r)) {
            Some(x) => count += (x.m_plus != r.m_plus) as usize + (x.m_minus != r.m_minus) as usize,
            None => count += 2,
        }
    }
    count + b.iter().filter(|x| !a.iter().any(|r| key(r) == key(x))).count() * 2
}

fn pingpong_checks(opts: VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut rng = RngState::new(opts.seed);
    let spaces = if opts.fast { SpaceType::enumerate(3, 2, 4) } else { SpaceType::enumerate(4, 2, 6) };
    let mut out = Vec::new();
    for space in spaces {
        let spec = LieAlgebraSpec::for_space(space)?;
        let measured = measure_root_multiplicities(&spec, &mut rng)?;
        let printed = root_data(space)?;
        let bad = table_mismatches(&measured.roots, &printed.roots);
        out.push(CheckRecord::at_most("root_table", space.to_string(), bad as f64, 0.0));
    }
    let specs = [LieAlgebraSpec::gl_real(4)?, LieAlgebraSpec::u_csd(2, 2, 2)?, LieAlgebraSpec::o_pq(3, 2)?];
    for spec in &specs {
        let h: Vec<f64> = (0..spec.torus_rank()).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let r = verify_exponential_map(spec, &spec.torus_element(&h), 50, &mut rng)?;
        out.push(CheckRecord::at_most("exponential_map", spec.label.clone(), r, 1e-9));
    }
    Ok(out)
}

/// Rank-one and rank-two checks of sampled spectra against their densities.
fn density_checks(opts: VerifyOptions) -> Result<Vec<CheckRecord>> {
    let n = if opts.fast { 20_000 } else { 50_000 };
    let mut rng = RngState::new(opts.seed);
    let mut out = Vec::new();
    let beta_law = |a: f64, b: f64| Beta::new(a, b).expect("positive shape");
    let jacobi = [((2, 1, 1, 1), (0.5, 1.0)), ((2, 2, 1, 2), (2.0, 2.0)), ((2, 1, 1, 4), (2.0, 4.0))];
    for ((p, q, s, beta), (a, b)) in jacobi {
        let spec = EnsembleSpec::jacobi(p, q, s, beta, SamplerPath::Gsvd)?;
        let batch = sample(&spec, n, &mut rng)?;
        let law = beta_law(a, b);
        let ks = ks_one_sample(&batch.column(0), |x| law.cdf(x), ALPHA)?;
        out.push(CheckRecord::ks("jacobi_beta_law", spec.to_string(), &ks));
    }
    let spec = EnsembleSpec::laguerre(2, 1, 1)?;
    let batch = sample(&spec, n, &mut rng)?;
    let cdf = numeric_marginal_cdf(&spec, Coordinate::Min, 1024)?;
    out.push(CheckRecord::ks("laguerre_quadrature", spec.to_string(), &ks_one_sample(&batch.column(0), |x| cdf.eval(x), ALPHA)?));
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    for beta in [1, 2, 4] {
        let spec = EnsembleSpec::hermite(1, beta)?;
        let batch = sample(&spec, n, &mut rng)?;
        out.push(CheckRecord::ks("hermite_normal", spec.to_string(), &ks_one_sample(&batch.column(0), |x| normal.cdf(x), ALPHA)?));
    }
    let spec = EnsembleSpec::circular(2, 2, SamplerPath::Eig)?;
    let batch = sample(&spec, n, &mut rng)?;
    let ks = ks_one_sample(&batch.arc_spacings()?, |g| (g - g.sin()) / PI, ALPHA)?;
    out.push(CheckRecord::ks("circular_spacing", spec.to_string(), &ks));
    if opts.fast {
        return Ok(out);
    }
    let rank_two = [
        (EnsembleSpec::jacobi(3, 2, 2, 1, SamplerPath::CsdHaar)?, Coordinate::Min),
        (EnsembleSpec::jacobi(3, 2, 2, 2, SamplerPath::Gsvd)?, Coordinate::Max),
        (EnsembleSpec::laguerre(3, 2, 1)?, Coordinate::Min),
        (EnsembleSpec::hermite(2, 2)?, Coordinate::Max),
        (EnsembleSpec::circular(2, 1, SamplerPath::Odo)?, Coordinate::ArcSpacing),
        (EnsembleSpec::circular(2, 4, SamplerPath::Qdq)?, Coordinate::ArcSpacing),
    ];
    for (spec, coord) in rank_two {
        let batch = sample(&spec, n, &mut rng)?;
        let cdf = numeric_marginal_cdf(&spec, coord, 512)?;
        let data = match coord {
            Coordinate::Min => batch.minima(),
            Coordinate::Max => batch.maxima(),
            Coordinate::ArcSpacing => batch.arc_spacings()?,
        };
        let ks = ks_one_sample(&data, |x| cdf.eval(x), ALPHA)?;
        out.push(CheckRecord::ks(&format!("rank_two_{coord:?}").to_lowercase(), spec.to_string(), &ks));
    }
    Ok(out)
}

/// Two-sample KS between sampler paths of the same ensemble.
fn crosspath_checks(opts: VerifyOptions) -> Result<Vec<CheckRecord>> {
    let n = if opts.fast { 5_000 } else { 20_000 };
    let mut rng = RngState::new(opts.seed);
    let pairs = [
        (EnsembleSpec::circular(3, 1, SamplerPath::Odo)?, SamplerPath::UutEig),
        (EnsembleSpec::circular(2, 4, SamplerPath::Qdq)?, SamplerPath::SkewhamEig),
        (EnsembleSpec::jacobi(3, 2, 1, 1, SamplerPath::Gsvd)?, SamplerPath::CsdHaar),
        (EnsembleSpec::jacobi(3, 2, 1, 2, SamplerPath::Gsvd)?, SamplerPath::CsdHaar),
        (EnsembleSpec::jacobi(3, 3, 2, 1, SamplerPath::CoeBlock)?, SamplerPath::CsdHaar),
    ];
    let mut out = Vec::new();
    for (spec, other) in pairs {
        let a = sample(&spec, n, &mut rng)?;
        let b = sample(&spec.with_path(other)?, n, &mut rng)?;
        let label = format!("{} vs {}", spec, other);
        for (coord, xa, xb) in [("min", a.minima(), b.minima()), ("max", a.maxima(), b.maxima())] {
            let ks = ks_two_sample(&xa, &xb, ALPHA)?;
            out.push(CheckRecord::ks(&format!("crosspath_{coord}"), label.clone(), &ks));
        }
    }
    Ok(out)
}
