//! The `ensemble-forge` command line.
//!
//! Exit codes: `0` success, `1` a failed verification or library error,
//! `2` bad flags, `3` an unwritable output path.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ensembles::{sample as sample_batch, Dims, EnsembleSpec, SamplerPath};
use crate::error::{Error, Result};
use crate::pingpong::{measure_root_multiplicities, split_kp_basis, LieAlgebraSpec, PingPongReport};
use crate::rng::RngState;
use crate::roots::{classical_params, root_data, Family, Root, SpaceType, SPACE_NAMES};
use crate::verify::{run_suite, table_mismatches, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNWRITABLE: i32 = 3;

/// Environment variable read when `--seed` is absent.
pub const SEED_ENV: &str = "ENSEMBLE_FORGE_SEED";

#[derive(Debug, Parser)]
#[command(name = "ensemble-forge", version, about = "Sample classical random matrix ensembles and verify their densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw spectra and write them as CSV or JSON.
    Sample(SampleArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Emit the classical parameters of every space up to a bound.
    Params(ParamsArgs),
    /// Export a root table, optionally re-measured from the Lie algebra.
    Roots(RootsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    beta: u32,
    #[arg(short = 'n', long = "n")]
    n: Option<usize>,
    #[arg(short = 'p', long = "p")]
    p: Option<usize>,
    #[arg(short = 'q', long = "q")]
    q: Option<usize>,
    #[arg(short = 's', long = "s")]
    s: Option<usize>,
    /// Sampler path; defaults per family and beta.
    #[arg(long)]
    path: Option<String>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// factorizations, pingpong, densities, crosspath or all.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fast: bool,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParamsArgs {
    /// Keep only spaces with this beta.
    #[arg(long)]
    beta: Option<u32>,
    /// Largest dimension parameter.
    #[arg(long, default_value_t = 12)]
    bound: usize,
    /// Comma-separated space names, e.g. `AIII_III,CI_II`.
    #[arg(long, value_delimiter = ',')]
    types: Vec<String>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct RootsArgs {
    /// Space name, e.g. `AIII_III`.
    #[arg(long)]
    space: String,
    #[arg(short = 'n', long = "n")]
    n: Option<usize>,
    #[arg(short = 'p', long = "p")]
    p: Option<usize>,
    #[arg(short = 'q', long = "q")]
    q: Option<usize>,
    #[arg(short = 's', long = "s")]
    s: Option<usize>,
    /// Also measure the multiplicities from the Lie algebra.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Unwritable(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Path { .. } | Error::Unsupported(_) | Error::Dimension(_) => Failure::Usage(e.to_string()),
            other => Failure::Library(other),
        }
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Params(a) => cmd_params(a),
        Command::Roots(a) => cmd_roots(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun with --help for usage.");
            EXIT_USAGE
        }
        Err(Failure::Unwritable(msg)) => {
            eprintln!("error: {msg}");
            EXIT_UNWRITABLE
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> std::result::Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> std::result::Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Unwritable(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Unwritable(format!("stdout: {e}")))
        }
    }
}

fn dims_from_flags(family: Family, n: Option<usize>, p: Option<usize>, q: Option<usize>, s: Option<usize>) -> std::result::Result<Dims, Failure> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Failure::Usage(format!("the {} family needs --{flag}", family.name())));
    Ok(match family {
        Family::Hermite | Family::Circular => Dims::N { n: need(n, "n")? },
        Family::Laguerre => Dims::Pq { p: need(p, "p")?, q: need(q, "q")? },
        Family::Jacobi => Dims::Pqs { p: need(p, "p")?, q: need(q, "q")?, s: need(s, "s")? },
    })
}

fn cmd_sample(a: SampleArgs) -> std::result::Result<i32, Failure> {
    let family: Family = a.family.parse()?;
    let dims = dims_from_flags(family, a.n, a.p, a.q, a.s)?;
    let path = match &a.path {
        Some(p) => p.parse()?,
        None => SamplerPath::default_for(family, a.beta),
    };
    let spec = EnsembleSpec::new(family, a.beta, dims, path)?;
    let seed = resolve_seed(a.seed)?;
    if let Some(out) = &a.output {
        // fail before sampling rather than after
        std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(out)
            .map_err(|e| Failure::Unwritable(format!("cannot write {}: {e}", out.display())))?;
    }
    let batch = sample_batch(&spec, a.count, &mut RngState::new(seed))?;
    let text = match a.format {
        Format::Csv => batch.to_csv(),
        Format::Json => batch.to_json() + "\n",
    };
    emit(&a.output, &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyReport {
    suite: String,
    seed: u64,
    fast: bool,
    pass: bool,
    results: Vec<crate::verify::CheckRecord>,
}

fn cmd_verify(a: VerifyArgs) -> std::result::Result<i32, Failure> {
    let suite: Suite = a.suite.parse()?;
    let seed = resolve_seed(a.seed)?;
    let results = run_suite(suite, VerifyOptions { seed, fast: a.fast })?;
    let pass = results.iter().all(|r| r.pass);
    let report = VerifyReport { suite: a.suite, seed, fast: a.fast, pass, results };
    emit(&a.output, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}

/// One row of `params` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamRow {
    pub space: String,
    pub params: String,
    pub family: String,
    pub beta: u32,
    /// Jacobi `alpha1`, or the Laguerre exponent.
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub variable_map: String,
}

/// Classical parameters of every space with dimensions up to `bound`.
pub fn parameter_rows(beta: Option<u32>, bound: usize, types: &[String]) -> Result<Vec<ParamRow>> {
    for t in types {
        if !SPACE_NAMES.contains(&t.as_str()) {
            return Err(Error::Unsupported(format!("unknown space type `{t}`")));
        }
    }
    let mut rows = Vec::new();
    for space in SpaceType::enumerate(bound, bound, 2 * bound) {
        if !types.is_empty() && !types.iter().any(|t| t == space.name()) {
            continue;
        }
        if beta.is_some_and(|b| b != space.beta()) {
            continue;
        }
        let Ok(c) = classical_params(space) else { continue };
        let params: Vec<String> = space.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        rows.push(ParamRow {
            space: space.name().to_string(),
            params: params.join(";"),
            family: c.family.name().to_string(),
            beta: c.beta,
            alpha1: c.alpha1.or(c.alpha),
            alpha2: c.alpha2,
            variable_map: c.variable_map.name().to_string(),
        });
    }
    Ok(rows)
}

fn cmd_params(a: ParamsArgs) -> std::result::Result<i32, Failure> {
    let rows = parameter_rows(a.beta, a.bound, &a.types)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| Failure::Library(Error::Contract(e.to_string())))?;
            }
            if rows.is_empty() {
                w.write_record(["space", "params", "family", "beta", "alpha1", "alpha2", "variable_map"])
                    .map_err(|e| Failure::Library(Error::Contract(e.to_string())))?;
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
    };
    emit(&a.output, &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RootsExport {
    space: String,
    params: std::collections::BTreeMap<String, usize>,
    roots: Vec<Root>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measured: Option<Vec<Root>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mismatches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<PingPongReport>,
}

fn cmd_roots(a: RootsArgs) -> std::result::Result<i32, Failure> {
    let dims: Vec<usize> = [a.n, a.p, a.q, a.s].into_iter().flatten().collect();
    let space = SpaceType::from_parts(&a.space, &dims)?;
    let table = root_data(space)?;
    let mut export = RootsExport {
        space: space.name().to_string(),
        params: space.params(),
        roots: table.roots.clone(),
        measured: None,
        mismatches: None,
        report: None,
    };
    let mut code = EXIT_OK;
    if a.verify {
        let mut rng = RngState::new(resolve_seed(a.seed)?);
        let spec = LieAlgebraSpec::for_space(space)?;
        let measured = measure_root_multiplicities(&spec, &mut rng)?;
        let h: Vec<f64> = (0..spec.torus_rank()).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        export.report = Some(split_kp_basis(&spec, &spec.torus_element(&h))?);
        let bad = table_mismatches(&measured.roots, &table.roots);
        if bad > 0 {
            code = EXIT_FAILED;
        }
        export.mismatches = Some(bad);
        export.measured = Some(measured.roots);
    }
    emit(&a.output, &(serde_json::to_string_pretty(&export).expect("export serializes") + "\n"))?;
    Ok(code)
}
