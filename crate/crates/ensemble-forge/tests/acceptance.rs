//! Prints one PASS/FAIL line per criterion. Runs without the libtest harness so
//! the lines always reach the output; exits nonzero only on an unexpected result.

use std::f64::consts::PI;
use std::time::Instant;

use ensemble_forge::cli::parameter_rows;
use ensemble_forge::ensembles::{sample, EnsembleSpec, SamplerPath};
use ensemble_forge::pingpong::{measure_root_multiplicities, verify_exponential_map, LieAlgebraSpec};
use ensemble_forge::roots::{change_of_variables_defect, classical_params, dimension_consistent_root_data, root_data, SpaceType};
use ensemble_forge::stats::{ks_one_sample, ks_two_sample, numeric_marginal_cdf, Coordinate};
use ensemble_forge::verify::{csd_residuals, gsvd_residuals, odo_residuals, qdq_residuals, table_mismatches};
use ensemble_forge::{Result, RngState};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};

const ALPHA: f64 = 0.01;
const DENSITY_N: usize = 50_000;
const CROSS_N: usize = 20_000;

struct Outcome {
    pass: bool,
    detail: String,
    /// A failure that matches the documented analysis instead of a regression.
    expected: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, expected: false }
    }
}

fn criterion_1() -> Result<Outcome> {
    let mut rng = RngState::new(101);
    let spaces = SpaceType::enumerate(4, 2, 6);
    let mut differing = Vec::new();
    let mut unexplained = Vec::new();
    for &space in &spaces {
        let spec = LieAlgebraSpec::for_space(space)?;
        let measured = measure_root_multiplicities(&spec, &mut rng)?;
        let printed = root_data(space)?;
        if table_mismatches(&measured.roots, &printed.roots) > 0 {
            differing.push(space.to_string());
            let known = matches!(space, SpaceType::DI_III { p, q } | SpaceType::AII_III { p, q } if p > q);
            let consistent = dimension_consistent_root_data(space)?;
            if !known || table_mismatches(&measured.roots, &consistent.roots) > 0 {
                unexplained.push(space.to_string());
            }
        }
    }
    let detail = format!(
        "{} of {} tables reproduced; differing: [{}]; unexplained: [{}]",
        spaces.len() - differing.len(),
        spaces.len(),
        differing.join(" "),
        unexplained.join(" ")
    );
    let mut o = Outcome::new(differing.is_empty(), detail);
    // measured (+-)theta multiplicity is beta (p - q), the printed table has beta/2 (p - q)
    o.expected = !differing.is_empty() && unexplained.is_empty();
    Ok(o)
}

fn criterion_2() -> Result<Outcome> {
    let mut rng = RngState::new(102);
    let specs = [LieAlgebraSpec::gl_real(4)?, LieAlgebraSpec::u_csd(2, 2, 2)?, LieAlgebraSpec::o_pq(3, 2)?];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for spec in &specs {
        let h: Vec<f64> = (0..spec.torus_rank()).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let r = verify_exponential_map(spec, &spec.torus_element(&h), 50, &mut rng)?;
        parts.push(format!("{}={r:.2e}", spec.label));
        worst = worst.max(r);
    }
    Ok(Outcome::new(worst <= 1e-9, format!("50 Y each, tol 1e-9: {}", parts.join(" "))))
}

fn criterion_3() -> Result<Outcome> {
    let mut rng = RngState::new(103);
    type Check = fn(&mut RngState) -> Result<(f64, f64)>;
    let cases: [(&str, Check); 4] = [("csd", csd_residuals), ("gsvd", gsvd_residuals), ("odo", odo_residuals), ("qdq", qdq_residuals)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, f) in cases {
        let (mut recon, mut structure) = (0.0f64, 0.0f64);
        for _ in 0..200 {
            let (a, b) = f(&mut rng)?;
            recon = recon.max(a);
            structure = structure.max(b);
        }
        pass &= recon <= 1e-10 && structure <= 1e-10;
        parts.push(format!("{name} recon/n={recon:.1e} structure={structure:.1e}"));
    }
    Ok(Outcome::new(pass, format!("200 inputs each, n <= 12, tol 1e-10: {}", parts.join("; "))))
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = RngState::new(104);
    let mut pass = true;
    let mut parts = Vec::new();
    let mut record = |label: &str, ks: ensemble_forge::stats::KsResult| {
        pass &= ks.pass;
        parts.push(format!("{label} D={:.4} (crit {:.4})", ks.statistic, ks.threshold));
    };

    // Beta(alpha1 + 1, alpha2 + 1) with alpha = beta (d + 1) / 2 - 1
    let jacobi = [("a", (2, 1, 1, 1), (0.5, 1.0)), ("b", (2, 2, 1, 2), (2.0, 2.0)), ("c", (2, 1, 1, 4), (2.0, 4.0))];
    for (tag, (p, q, s, beta), (a, b)) in jacobi {
        let spec = EnsembleSpec::jacobi(p, q, s, beta, SamplerPath::Gsvd)?;
        let batch = sample(&spec, DENSITY_N, &mut rng)?;
        let law = Beta::new(a, b).unwrap();
        record(&format!("({tag}) Beta({a},{b})"), ks_one_sample(&batch.column(0), |x| law.cdf(x), ALPHA)?);
    }

    let spec = EnsembleSpec::laguerre(2, 1, 1)?;
    let cdf = numeric_marginal_cdf(&spec, Coordinate::Min, 1024)?;
    let chi = ChiSquared::new(2.0).unwrap();
    let quad_err = (0..=400).map(|k| k as f64 / 10.0).map(|x| (cdf.eval(x) - chi.cdf(x)).abs()).fold(0.0, f64::max);
    let batch = sample(&spec, DENSITY_N, &mut rng)?;
    record(&format!("(d) quadrature [|F-chi2_2|={quad_err:.1e}]"), ks_one_sample(&batch.column(0), |x| cdf.eval(x), ALPHA)?);

    let normal = Normal::new(0.0, 1.0).unwrap();
    for beta in [1, 2, 4] {
        let batch = sample(&EnsembleSpec::hermite(1, beta)?, DENSITY_N, &mut rng)?;
        record(&format!("(e) N(0,1) beta={beta}"), ks_one_sample(&batch.column(0), |x| normal.cdf(x), ALPHA)?);
    }

    // min arc between two CUE(2) angles: density (1 - cos g) / pi on [0, pi]
    let batch = sample(&EnsembleSpec::circular(2, 2, SamplerPath::Eig)?, DENSITY_N, &mut rng)?;
    record("(f) spacing", ks_one_sample(&batch.arc_spacings()?, |g| (g - g.sin()) / PI, ALPHA)?);

    Ok(Outcome::new(pass && quad_err <= 1e-6, format!("N={DENSITY_N}, alpha={ALPHA}: {}", parts.join("; "))))
}

fn criterion_5() -> Result<Outcome> {
    let mut rng = RngState::new(105);
    let pairs = [
        (EnsembleSpec::circular(3, 1, SamplerPath::Odo)?, SamplerPath::UutEig),
        (EnsembleSpec::circular(2, 4, SamplerPath::Qdq)?, SamplerPath::SkewhamEig),
        (EnsembleSpec::jacobi(3, 2, 1, 1, SamplerPath::Gsvd)?, SamplerPath::CsdHaar),
        (EnsembleSpec::jacobi(3, 2, 1, 2, SamplerPath::Gsvd)?, SamplerPath::CsdHaar),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (spec, other) in pairs {
        let a = sample(&spec, CROSS_N, &mut rng)?;
        let b = sample(&spec.with_path(other)?, CROSS_N, &mut rng)?;
        let mut worst = 0.0f64;
        let mut crit = 0.0;
        for (xa, xb) in [(a.minima(), b.minima()), (a.maxima(), b.maxima())] {
            let ks = ks_two_sample(&xa, &xb, ALPHA)?;
            pass &= ks.pass;
            worst = worst.max(ks.statistic);
            crit = ks.threshold;
        }
        parts.push(format!("{}/{} {} {} D={worst:.4} (crit {crit:.4})", spec.path, other, spec.family.name(), spec.dims));
    }
    Ok(Outcome::new(pass, format!("N={CROSS_N} per side: {}", parts.join("; "))))
}

fn criterion_6() -> Result<Outcome> {
    let rows = parameter_rows(Some(2), 12, &[])?;
    let points = |name: &str| -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> =
            rows.iter().filter(|r| r.space == name).map(|r| (r.alpha1.unwrap(), r.alpha2.unwrap())).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    };
    let grid: Vec<(f64, f64)> = (0..12).flat_map(|a| (0..12).map(move |b| (a as f64, b as f64))).collect();
    let aiii = points("AIII_III");
    let ci = points("CI_II");
    let di = points("DI_III");
    let jacobi_spaces: Vec<&str> = {
        let mut v: Vec<&str> = rows.iter().filter(|r| r.family == "jacobi").map(|r| r.space.as_str()).collect();
        v.sort();
        v.dedup();
        v
    };
    let pass = aiii == grid
        && !ci.is_empty()
        && ci.iter().all(|p| p.1 == 0.5)
        && !di.is_empty()
        && di.iter().all(|p| p.1 == -0.5)
        && jacobi_spaces == ["AIII_III", "CI_II", "DI_III"];
    Ok(Outcome::new(
        pass,
        format!(
            "beta=2 bound 12: AIII_III {} points (grid 0..11 squared: {}), CI_II {} points alpha2=1/2, DI_III {} points alpha2=-1/2, jacobi spaces {:?}",
            aiii.len(),
            aiii == grid,
            ci.len(),
            di.len(),
            jacobi_spaces
        ),
    ))
}

fn criterion_7() -> Result<Outcome> {
    let mut rng = RngState::new(107);
    let mut worst = 0.0f64;
    let mut count = 0;
    for space in SpaceType::enumerate(4, 3, 6) {
        if space.torus_rank() > 3 || classical_params(space).is_err() {
            continue;
        }
        worst = worst.max(change_of_variables_defect(space, 200, &mut rng)?);
        count += 1;
    }
    Ok(Outcome::new(count > 0 && worst <= 1e-9, format!("{count} density-mapped spaces at rank <= 3, worst defect {worst:.2e} (tol 1e-9)")))
}

fn main() {
    type Criterion = fn() -> Result<Outcome>;
    let criteria: [(&str, Criterion); 7] = [
        ("root-table equality", criterion_1),
        ("exponential-map identity", criterion_2),
        ("factorization residuals", criterion_3),
        ("density acceptance", criterion_4),
        ("cross-path equivalence", criterion_5),
        ("parameter-map coverage", criterion_6),
        ("change-of-variables consistency", criterion_7),
    ];
    let mut unexpected = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (verdict, detail) = match f() {
            Ok(o) => {
                if !o.pass && !o.expected {
                    unexpected += 1;
                }
                let note = if !o.pass && o.expected { " [known table discrepancy, see README]" } else { "" };
                (if o.pass { "PASS" } else { "FAIL" }, format!("{}{note}", o.detail))
            }
            Err(e) => {
                unexpected += 1;
                ("FAIL", format!("error: {e}"))
            }
        };
        println!("{verdict} criterion {} ({name}, {:.1}s): {detail}", k + 1, start.elapsed().as_secs_f64());
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
