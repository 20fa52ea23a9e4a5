//! Kolmogorov-Smirnov tests, quadrature CDFs of low-rank joint densities, and
//! Monte Carlo moments.

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{joint_log_density, EnsembleSpec, SampleBatch};
use crate::error::{Error, Result};
use crate::roots::Family;

/// Minimum sample size for the asymptotic thresholds.
pub const MIN_SAMPLES: usize = 100;

/// Outcome of a KS test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    /// Effective sample size `N` (one sample) or `nm / (n + m)` (two samples).
    pub n_effective: f64,
    pub p_value: f64,
    pub alpha: f64,
    /// `sqrt(-ln(alpha / 2) / (2 N))`.
    pub threshold: f64,
    pub pass: bool,
}

impl KsResult {
    fn new(statistic: f64, n_effective: f64, alpha: f64) -> Self {
        let threshold = (-(alpha / 2.0).ln() / (2.0 * n_effective)).sqrt();
        let sq = n_effective.sqrt();
        let p_value = kolmogorov_survival((sq + 0.12 + 0.11 / sq) * statistic);
        Self { statistic, n_effective, p_value, alpha, threshold, pass: statistic <= threshold }
    }
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn check_sample(x: &[f64], what: &str) -> Result<()> {
    if x.len() < MIN_SAMPLES {
        return Err(Error::Contract(format!("{what} has {} samples, need at least {MIN_SAMPLES}", x.len())));
    }
    // negated so that NaN counts as unsorted
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if x.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Contract(format!("{what} is not sorted ascending")));
    }
    Ok(())
}

/// One-sample KS test of sorted `samples` against `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> Result<KsResult> {
    check_sample(samples, "sample")?;
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsResult::new(d, n, alpha))
}

/// Two-sample KS test of sorted `a` and `b`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    check_sample(a, "first sample")?;
    check_sample(b, "second sample")?;
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(KsResult::new(d, (n * m) as f64 / (n + m) as f64, alpha))
}

/// Which scalar a numeric CDF describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Min,
    Max,
    /// Shorter arc between the two angles of a circular `n = 2` draw.
    ArcSpacing,
}

/// A tabulated CDF. Between grid points it is interpolated by cubic Hermite
/// using the density, or linearly where the density is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericCdf {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Normalized density at the grid points.
    pub density: Vec<f64>,
}

impl NumericCdf {
    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x <= g[0] {
            return 0.0;
        }
        if x >= g[g.len() - 1] {
            return 1.0;
        }
        let k = g.partition_point(|&v| v <= x);
        let (x0, x1) = (g[k - 1], g[k]);
        let (f0, f1) = (self.values[k - 1], self.values[k]);
        let h = x1 - x0;
        if h <= 0.0 {
            return f1;
        }
        let t = (x - x0) / h;
        let (d0, d1) = (self.density[k - 1], self.density[k]);
        if !(d0.is_finite() && d1.is_finite()) {
            return f0 + t * (f1 - f0);
        }
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * h * d1;
        v.clamp(f0.min(f1), f0.max(f1))
    }
}

const NODES: usize = 8;

/// Graded map from `u in [0, 1]` onto `[a, b]`: near an endpoint with
/// exponent `e < 0` it behaves like `t^(1 / (1 + e))`, which makes
/// `(x - a)^e dx` bounded.
#[derive(Debug, Clone, Copy)]
struct Grading {
    a: f64,
    b: f64,
    ka: f64,
    kb: f64,
}

impl Grading {
    fn new(a: f64, b: f64, ea: f64, eb: f64) -> Self {
        let k = |e: f64| if e < 0.0 { 1.0 / (1.0 + e) } else { 1.0 };
        Self { a, b, ka: k(ea), kb: k(eb) }
    }

    /// `(x(u), x'(u))`.
    fn map(&self, u: f64) -> (f64, f64) {
        let h = self.b - self.a;
        if u <= 0.5 {
            let t = 2.0 * u;
            (self.a + 0.5 * h * t.powf(self.ka), h * self.ka * t.powf(self.ka - 1.0))
        } else {
            let t = 2.0 * (1.0 - u);
            (self.b - 0.5 * h * t.powf(self.kb), h * self.kb * t.powf(self.kb - 1.0))
        }
    }

    /// Composite Gauss-Legendre over `cells` equal cells in `u`.
    fn integrate(&self, rule: &GaussLegendre, cells: usize, f: impl Fn(f64) -> f64) -> f64 {
        let w = 1.0 / cells as f64;
        (0..cells)
            .map(|c| {
                rule.integrate(c as f64 * w, (c + 1) as f64 * w, |u| {
                    let (x, dx) = self.map(u);
                    if dx == 0.0 || !dx.is_finite() {
                        0.0
                    } else {
                        f(x) * dx
                    }
                })
            })
            .sum()
    }
}

fn spec_grading(spec: &EnsembleSpec) -> Result<Grading> {
    let p = spec.classical_params();
    let m = spec.m() as f64;
    let beta = spec.beta as f64;
    Ok(match spec.family {
        Family::Jacobi => {
            let (a1, a2) = (p.alpha1.unwrap_or(0.0), p.alpha2.unwrap_or(0.0));
            if a1 <= -1.0 || a2 <= -1.0 {
                return Err(Error::Domain(format!("jacobi weights ({a1}, {a2}) are not integrable")));
            }
            Grading::new(0.0, 1.0, a1, a2)
        }
        Family::Laguerre => {
            let a = p.alpha.unwrap_or(0.0);
            if a <= -1.0 {
                return Err(Error::Domain(format!("laguerre weight {a} is not integrable")));
            }
            // x^a e^{-x/2} is negligible well before this point
            let top = 120.0 + 6.0 * (a + 1.0) + 2.0 * beta * m;
            Grading::new(0.0, top, a, 0.0)
        }
        Family::Hermite => {
            let top = 12.0 + (2.0 * beta * m).sqrt();
            Grading::new(-top, top, 0.0, 0.0)
        }
        Family::Circular => Grading::new(0.0, std::f64::consts::TAU, 0.0, 0.0),
    })
}

/// Marginal density of `coord` at `t`, up to a constant, with inner
/// integrals over `inner` cells.
fn marginal_density(spec: &EnsembleSpec, coord: Coordinate, g: &Grading, rule: &GaussLegendre, inner: usize, t: f64) -> f64 {
    let dens = |x: &[f64]| {
        let v = joint_log_density(spec, x);
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };
    match (spec.m(), coord) {
        (1, Coordinate::Min | Coordinate::Max) => dens(&[t]),
        (2, Coordinate::ArcSpacing) => dens(&[0.0, t]),
        (2, Coordinate::Min) => {
            let sub = Grading { a: t, b: g.b, ka: 1.0, kb: g.kb };
            sub.integrate(rule, inner, |y| dens(&[t, y]))
        }
        (2, Coordinate::Max) => {
            let sub = Grading { a: g.a, b: t, ka: g.ka, kb: 1.0 };
            sub.integrate(rule, inner, |y| dens(&[y, t]))
        }
        _ => 0.0,
    }
}

fn tabulate(spec: &EnsembleSpec, coord: Coordinate, g: &Grading, cells: usize) -> NumericCdf {
    let rule = GaussLegendre::new(NODES).expect("rule with more than one node");
    let inner = (cells / 4).max(16);
    let w = 1.0 / cells as f64;
    let pieces: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|c| {
            rule.integrate(c as f64 * w, (c + 1) as f64 * w, |u| {
                let (x, dx) = g.map(u);
                if dx == 0.0 || !dx.is_finite() {
                    0.0
                } else {
                    marginal_density(spec, coord, g, &rule, inner, x) * dx
                }
            })
        })
        .collect();
    let total: f64 = pieces.iter().sum();
    let mut grid = Vec::with_capacity(cells + 1);
    let mut values = Vec::with_capacity(cells + 1);
    let mut acc = 0.0;
    grid.push(g.map(0.0).0);
    values.push(0.0);
    for (c, piece) in pieces.iter().enumerate() {
        acc += piece;
        grid.push(g.map((c + 1) as f64 * w).0);
        values.push((acc / total).min(1.0));
    }
    if let Some(last) = values.last_mut() {
        *last = 1.0;
    }
    let density = grid
        .par_iter()
        .map(|&x| {
            let d = marginal_density(spec, coord, g, &rule, inner, x) / total;
            if x <= g.a || x >= g.b { closed_end(g, x, d) } else { d }
        })
        .collect();
    NumericCdf { grid, values, density }
}

/// Density at an end of the support: unbounded where the grading is
/// singular, else the computed value.
fn closed_end(g: &Grading, x: f64, d: f64) -> f64 {
    let k = if x <= g.a { g.ka } else { g.kb };
    if k > 1.0 {
        f64::INFINITY
    } else {
        d
    }
}

/// CDF of `coord` under the joint density of `spec` (`m <= 2`), by
/// composite Gauss-Legendre quadrature on `grid_size` cells. The same
/// computation on twice as many cells must agree to `1e-6`.
pub fn numeric_marginal_cdf(spec: &EnsembleSpec, coord: Coordinate, grid_size: usize) -> Result<NumericCdf> {
    let m = spec.m();
    match (m, coord) {
        (1, Coordinate::Min | Coordinate::Max) | (2, Coordinate::Min | Coordinate::Max) => {}
        (2, Coordinate::ArcSpacing) if spec.family == Family::Circular => {}
        _ => return Err(Error::Domain(format!("no quadrature CDF for {coord:?} with m = {m} ({spec})"))),
    }
    let mut g = spec_grading(spec)?;
    if coord == Coordinate::ArcSpacing {
        g.b = std::f64::consts::PI;
    }
    let cells = grid_size.max(8);
    let coarse = tabulate(spec, coord, &g, cells);
    let fine = tabulate(spec, coord, &g, 2 * cells);
    let change = coarse.values.iter().enumerate().map(|(i, v)| (v - fine.values[2 * i]).abs()).fold(0.0, f64::max);
    if change >= 1e-6 {
        return Err(Error::Convergence(change));
    }
    Ok(coarse)
}

/// Monte Carlo estimate of `E sum_i x_i^power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub power: i32,
    pub mean: f64,
    /// Jackknife standard error.
    pub std_error: f64,
}

pub fn moment_summary(batch: &SampleBatch, powers: &[i32]) -> Result<Vec<MomentEstimate>> {
    let n = batch.draws();
    if n == 0 {
        return Err(Error::Contract("moment summary of an empty batch".into()));
    }
    Ok(powers
        .iter()
        .map(|&k| {
            let v: Vec<f64> = batch.spectra.iter().map(|r| r.iter().map(|x| x.powi(k)).sum()).collect();
            let total: f64 = v.iter().sum();
            let mean = total / n as f64;
            let std_error = if n < 2 {
                f64::NAN
            } else {
                let loo = v.iter().map(|x| (total - x) / (n - 1) as f64);
                let ss: f64 = loo.map(|t| (t - mean).powi(2)).sum();
                ((n - 1) as f64 / n as f64 * ss).sqrt()
            };
            MomentEstimate { power: k, mean, std_error }
        })
        .collect())
}
