//! Samplers for the four classical families and their joint densities.
//!
//! Every sampler draws matrices from [`crate::matrix`] and reads the spectrum
//! off a factorization. Batches are generated in parallel; draw `i` always
//! uses stream `i` of a key forked from the caller's state, so output does
//! not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorizations::{csd, gsvd, odo_decompose, qdq_decompose, skew_hamiltonian_angles, symmetric_unitary_angles, Partition};
use crate::field::FieldTag;
use crate::matrix::{hermitian_eig, sample_gaussian_matrix, sample_haar, svd, unitary_eigenangles, wrap_angle, DenseMatrix};
use crate::rng::RngState;
use crate::roots::{ClassicalParams, Family, VariableMap};

/// How a spectrum is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerPath {
    /// Hermitian eigenvalues of `(G + G^H) / 2` (Hermite).
    HermitianEig,
    /// Squared singular values of a Gaussian matrix (Laguerre).
    Svd,
    /// Squared GSVD cosines of a Gaussian pair (Jacobi).
    Gsvd,
    /// Squared CSD cosines of a Haar matrix (Jacobi).
    CsdHaar,
    /// Squared singular values of the `p x s` corner of `U U^T`, `U` Haar
    /// unitary (Jacobi, beta 1, `p = s + 1`).
    CoeBlock,
    /// Doubled ODO angles of a Haar unitary (circular, beta 1).
    Odo,
    /// Eigenangles of `U U^T` (circular, beta 1).
    UutEig,
    /// Eigenangles of a Haar unitary (circular, beta 2).
    Eig,
    /// Doubled QDQ angles of a Haar `2n x 2n` unitary (circular, beta 4).
    Qdq,
    /// Paired eigenangles of `U J U^T J^T` (circular, beta 4).
    SkewhamEig,
}

impl SamplerPath {
    pub const ALL: [SamplerPath; 10] = [
        SamplerPath::HermitianEig,
        SamplerPath::Svd,
        SamplerPath::Gsvd,
        SamplerPath::CsdHaar,
        SamplerPath::CoeBlock,
        SamplerPath::Odo,
        SamplerPath::UutEig,
        SamplerPath::Eig,
        SamplerPath::Qdq,
        SamplerPath::SkewhamEig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerPath::HermitianEig => "hermitian_eig",
            SamplerPath::Svd => "svd",
            SamplerPath::Gsvd => "gsvd",
            SamplerPath::CsdHaar => "csd_haar",
            SamplerPath::CoeBlock => "coe_block",
            SamplerPath::Odo => "odo",
            SamplerPath::UutEig => "uut_eig",
            SamplerPath::Eig => "eig",
            SamplerPath::Qdq => "qdq",
            SamplerPath::SkewhamEig => "skewham_eig",
        }
    }

    /// The path used when none is requested.
    pub fn default_for(family: Family, beta: u32) -> Self {
        match (family, beta) {
            (Family::Hermite, _) => SamplerPath::HermitianEig,
            (Family::Laguerre, _) => SamplerPath::Svd,
            (Family::Jacobi, _) => SamplerPath::Gsvd,
            (Family::Circular, 1) => SamplerPath::Odo,
            (Family::Circular, 4) => SamplerPath::Qdq,
            (Family::Circular, _) => SamplerPath::Eig,
        }
    }

    /// Paths that sample `family` at `beta`.
    pub fn available(family: Family, beta: u32) -> Vec<SamplerPath> {
        use SamplerPath::*;
        match (family, beta) {
            (Family::Hermite, _) => vec![HermitianEig],
            (Family::Laguerre, _) => vec![Svd],
            (Family::Jacobi, 1) => vec![Gsvd, CsdHaar, CoeBlock],
            (Family::Jacobi, _) => vec![Gsvd, CsdHaar],
            (Family::Circular, 1) => vec![Odo, UutEig],
            (Family::Circular, 2) => vec![Eig],
            (Family::Circular, _) => vec![Qdq, SkewhamEig],
        }
    }
}

impl fmt::Display for SamplerPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let alias = match s.as_str() {
            "gsvd_gaussian" => Some(SamplerPath::Gsvd),
            "csd" => Some(SamplerPath::CsdHaar),
            _ => None,
        };
        alias
            .or_else(|| SamplerPath::ALL.into_iter().find(|p| p.name() == s))
            .ok_or_else(|| Error::Unsupported(format!("unknown sampler path `{s}`")))
    }
}

/// Dimension parameters of a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dims {
    N { n: usize },
    Pq { p: usize, q: usize },
    Pqs { p: usize, q: usize, s: usize },
}

impl Dims {
    pub fn values(&self) -> Vec<usize> {
        match *self {
            Dims::N { n } => vec![n],
            Dims::Pq { p, q } => vec![p, q],
            Dims::Pqs { p, q, s } => vec![p, q, s],
        }
    }
}

/// `3x2x1` style.
impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values().iter().map(|x| x.to_string()).collect();
        f.write_str(&v.join("x"))
    }
}

impl FromStr for Dims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<usize> = s
            .split('x')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Domain(format!("bad dimension list `{s}`"))))
            .collect::<Result<_>>()?;
        match v[..] {
            [n] => Ok(Dims::N { n }),
            [p, q] => Ok(Dims::Pq { p, q }),
            [p, q, s] => Ok(Dims::Pqs { p, q, s }),
            _ => Err(Error::Domain(format!("bad dimension list `{s}`"))),
        }
    }
}

/// A classical ensemble together with the algorithm that samples it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub family: Family,
    pub beta: u32,
    pub dims: Dims,
    pub path: SamplerPath,
}

impl EnsembleSpec {
    /// Validates the combination of family, beta, dimensions and path.
    pub fn new(family: Family, beta: u32, dims: Dims, path: SamplerPath) -> Result<Self> {
        FieldTag::from_beta(beta)?;
        match (family, dims) {
            (Family::Hermite | Family::Circular, Dims::N { n }) if n >= 1 => {}
            (Family::Laguerre, Dims::Pq { p, q }) if q >= 1 => {
                if p < q {
                    return Err(Error::Domain(format!("laguerre needs p >= q, got p={p}, q={q}")));
                }
            }
            (Family::Jacobi, Dims::Pqs { p, q, s }) if s >= 1 => {
                if p < s || q < s {
                    return Err(Error::Domain(format!("jacobi needs p, q >= s >= 1, got ({p}, {q}, {s})")));
                }
                if path == SamplerPath::CoeBlock && p != s + 1 {
                    return Err(Error::Path {
                        path: path.name().into(),
                        context: format!("jacobi ({p}, {q}, {s}); it needs p = s + 1"),
                    });
                }
            }
            _ => return Err(Error::Domain(format!("dimensions {dims} do not fit the {} family", family.name()))),
        }
        if !SamplerPath::available(family, beta).contains(&path) {
            return Err(Error::Path { path: path.name().into(), context: format!("{} beta={beta}", family.name()) });
        }
        Ok(Self { family, beta, dims, path })
    }

    pub fn hermite(n: usize, beta: u32) -> Result<Self> {
        Self::new(Family::Hermite, beta, Dims::N { n }, SamplerPath::HermitianEig)
    }

    pub fn laguerre(p: usize, q: usize, beta: u32) -> Result<Self> {
        Self::new(Family::Laguerre, beta, Dims::Pq { p, q }, SamplerPath::Svd)
    }

    pub fn jacobi(p: usize, q: usize, s: usize, beta: u32, path: SamplerPath) -> Result<Self> {
        Self::new(Family::Jacobi, beta, Dims::Pqs { p, q, s }, path)
    }

    pub fn circular(n: usize, beta: u32, path: SamplerPath) -> Result<Self> {
        Self::new(Family::Circular, beta, Dims::N { n }, path)
    }

    /// The same ensemble sampled another way.
    pub fn with_path(&self, path: SamplerPath) -> Result<Self> {
        Self::new(self.family, self.beta, self.dims, path)
    }

    pub fn field(&self) -> FieldTag {
        FieldTag::from_beta(self.beta).expect("validated beta")
    }

    /// Number of coordinates per draw.
    pub fn m(&self) -> usize {
        match self.dims {
            Dims::N { n } => n,
            Dims::Pq { q, .. } => q,
            Dims::Pqs { s, .. } => s,
        }
    }

    /// Classical weights of the joint density.
    pub fn classical_params(&self) -> ClassicalParams {
        let b = self.beta as f64;
        match self.dims {
            Dims::N { n } if self.family == Family::Hermite => ClassicalParams::hermite(self.beta, n),
            Dims::N { n } => ClassicalParams::circular(self.beta, n, VariableMap::AngleDouble),
            Dims::Pq { p, q } => ClassicalParams::laguerre(self.beta, q, b * (p - q + 1) as f64 / 2.0 - 1.0),
            Dims::Pqs { p, q, s } => ClassicalParams::jacobi(
                self.beta,
                s,
                b * (q - s + 1) as f64 / 2.0 - 1.0,
                b * (p - s + 1) as f64 / 2.0 - 1.0,
                VariableMap::Cos2,
            ),
        }
    }

    /// Support of a single coordinate.
    pub fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Hermite => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Laguerre => (0.0, f64::INFINITY),
            Family::Jacobi => (0.0, 1.0),
            Family::Circular => (0.0, std::f64::consts::TAU),
        }
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} beta={} dims={} path={}", self.family.name(), self.beta, self.dims, self.path)
    }
}

/// Unnormalized log joint density at sorted coordinates `x`; `-inf` outside
/// the support.
pub fn joint_log_density(spec: &EnsembleSpec, x: &[f64]) -> f64 {
    if x.len() != spec.m() {
        return f64::NEG_INFINITY;
    }
    let (lo, hi) = spec.support();
    let inside = |v: f64| match spec.family {
        Family::Circular => (lo..hi).contains(&v),
        _ => (lo..=hi).contains(&v),
    };
    if !x.iter().all(|&v| inside(v)) {
        return f64::NEG_INFINITY;
    }
    spec.classical_params().log_density(x)
}

/// One draw, sorted ascending.
pub fn draw(spec: &EnsembleSpec, rng: &mut RngState) -> Result<Vec<f64>> {
    let field = spec.field();
    let mut out = match (spec.path, spec.dims) {
        (SamplerPath::HermitianEig, Dims::N { n }) => {
            let g = sample_gaussian_matrix(field, n, n, rng)?;
            let h = (g.complex() + g.complex().adjoint()).unscale(2.0);
            hermitian_eig(&DenseMatrix::new(field, h)?)?.0
        }
        (SamplerPath::Svd, Dims::Pq { p, q }) => {
            let g = sample_gaussian_matrix(field, p, q, rng)?;
            svd(&g).sigma.iter().map(|s| s * s).collect()
        }
        (SamplerPath::Gsvd, Dims::Pqs { p, q, s }) => {
            let gq = sample_gaussian_matrix(field, q, s, rng)?;
            let gp = sample_gaussian_matrix(field, p, s, rng)?;
            gsvd(&gq, &gp)?.c.iter().map(|c| c * c).collect()
        }
        (SamplerPath::CsdHaar, Dims::Pqs { p, q, s }) => {
            let u = sample_haar(field, p + q, rng)?;
            let part = Partition::new(p, q, p + q - s, s)?;
            csd(&u, part)?.theta.iter().map(|t| t.cos().powi(2)).collect()
        }
        (SamplerPath::CoeBlock, Dims::Pqs { q, s, .. }) => {
            let u = sample_haar(FieldTag::Complex, q + s, rng)?;
            let sym = u.complex() * u.complex().transpose();
            let corner = sym.view((0, q), (q, s)).into_owned();
            let block = DenseMatrix::new(FieldTag::Complex, corner)?;
            svd(&block).sigma.iter().map(|v| (v * v).min(1.0)).collect()
        }
        (SamplerPath::Odo, Dims::N { n }) => {
            let u = sample_haar(FieldTag::Complex, n, rng)?;
            odo_decompose(&u, rng)?.doubled_angles()
        }
        (SamplerPath::UutEig, Dims::N { n }) => symmetric_unitary_angles(&sample_haar(FieldTag::Complex, n, rng)?),
        (SamplerPath::Eig, Dims::N { n }) => unitary_eigenangles(&sample_haar(FieldTag::Complex, n, rng)?),
        (SamplerPath::Qdq, Dims::N { n }) => {
            let u = sample_haar(FieldTag::Complex, 2 * n, rng)?;
            qdq_decompose(&u, rng)?.doubled_angles()
        }
        (SamplerPath::SkewhamEig, Dims::N { n }) => skew_hamiltonian_angles(&sample_haar(FieldTag::Complex, 2 * n, rng)?),
        (path, dims) => return Err(Error::Path { path: path.name().into(), context: format!("dims {dims}") }),
    };
    if spec.family == Family::Circular {
        out.iter_mut().for_each(|a| *a = wrap_angle(*a));
    }
    if spec.family == Family::Jacobi {
        out.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Sampled spectra with the spec and seed that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub spec: EnsembleSpec,
    pub seed: u64,
    /// One sorted row per draw.
    pub spectra: Vec<Vec<f64>>,
}

/// `count` independent draws.
pub fn sample(spec: &EnsembleSpec, count: usize, rng: &mut RngState) -> Result<SampleBatch> {
    let seed = rng.seed();
    let key = rng.fork_key();
    let spectra = (0..count as u64)
        .into_par_iter()
        .map(|i| draw(spec, &mut RngState::with_stream(key, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch { spec: *spec, seed, spectra })
}

pub fn sample_hermite(n: usize, beta: u32, count: usize, rng: &mut RngState) -> Result<SampleBatch> {
    sample(&EnsembleSpec::hermite(n, beta)?, count, rng)
}

pub fn sample_laguerre(p: usize, q: usize, beta: u32, count: usize, rng: &mut RngState) -> Result<SampleBatch> {
    sample(&EnsembleSpec::laguerre(p, q, beta)?, count, rng)
}

#[allow(clippy::too_many_arguments)]
pub fn sample_jacobi(p: usize, q: usize, s: usize, beta: u32, count: usize, rng: &mut RngState, path: SamplerPath) -> Result<SampleBatch> {
    sample(&EnsembleSpec::jacobi(p, q, s, beta, path)?, count, rng)
}

pub fn sample_circular(n: usize, beta: u32, count: usize, rng: &mut RngState, path: SamplerPath) -> Result<SampleBatch> {
    sample(&EnsembleSpec::circular(n, beta, path)?, count, rng)
}

impl SampleBatch {
    pub fn draws(&self) -> usize {
        self.spectra.len()
    }

    /// Coordinate `j` of every draw, sorted.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.spectra.iter().map(|r| r[j]).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn minima(&self) -> Vec<f64> {
        self.column(0)
    }

    pub fn maxima(&self) -> Vec<f64> {
        self.column(self.spec.m() - 1)
    }

    /// Shorter arc between the two angles of a circular `n = 2` draw, in
    /// `[0, pi]`, sorted.
    pub fn arc_spacings(&self) -> Result<Vec<f64>> {
        if self.spec.family != Family::Circular || self.spec.m() != 2 {
            return Err(Error::Contract("arc spacing needs a circular batch with n = 2".into()));
        }
        let tau = std::f64::consts::TAU;
        let mut v: Vec<f64> = self
            .spectra
            .iter()
            .map(|r| {
                let d = (r[1] - r[0]).rem_euclid(tau);
                d.min(tau - d)
            })
            .collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// Checks sorting and support on every row.
    pub fn check_invariants(&self) -> Result<()> {
        let (lo, hi) = self.spec.support();
        for (i, row) in self.spectra.iter().enumerate() {
            if row.len() != self.spec.m() {
                return Err(Error::Contract(format!("draw {i} has {} coordinates, expected {}", row.len(), self.spec.m())));
            }
            if row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Contract(format!("draw {i} is not sorted")));
            }
            let bad = row.iter().any(|&v| match self.spec.family {
                Family::Circular => !(lo..hi).contains(&v),
                _ => !(lo..=hi).contains(&v),
            });
            if bad {
                return Err(Error::Contract(format!("draw {i} leaves the support")));
            }
        }
        Ok(())
    }

    /// CSV with a `#` provenance line, a header and one row per draw.
    /// Numbers use the shortest representation that parses back exactly.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let mut header = vec!["family".to_string(), "beta".into(), "dims".into(), "seed".into(), "draw".into()];
        header.extend((1..=self.spec.m()).map(|j| format!("c{j}")));
        w.write_record(&header).expect("in-memory write");
        for (i, row) in self.spectra.iter().enumerate() {
            let mut rec = vec![self.spec.family.name().to_string(), self.spec.beta.to_string(), self.spec.dims.to_string(), self.seed.to_string(), i.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("flush")).expect("ascii");
        format!("# ensemble-forge {} {} seed={}\n{body}", env!("CARGO_PKG_VERSION"), self.spec, self.seed)
    }

    /// Parses [`SampleBatch::to_csv`] output.
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Contract(format!("malformed sample csv: {msg}"));
        let first = text.lines().next().ok_or_else(|| bad("empty file".into()))?;
        let path = first
            .split_whitespace()
            .find_map(|t| t.strip_prefix("path="))
            .ok_or_else(|| bad("provenance line lacks path".into()))?
            .parse::<SamplerPath>()?;
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut spec = None;
        let mut seed = 0;
        let mut spectra = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let field = |k: usize| rec.get(k).ok_or_else(|| bad(format!("row {line} is short")));
            if spec.is_none() {
                let family: Family = field(0)?.parse()?;
                let beta: u32 = field(1)?.parse().map_err(|_| bad("beta".into()))?;
                let dims: Dims = field(2)?.parse()?;
                spec = Some(EnsembleSpec::new(family, beta, dims, path)?);
                seed = field(3)?.parse().map_err(|_| bad("seed".into()))?;
            }
            let row = rec
                .iter()
                .skip(5)
                .map(|t| t.parse::<f64>().map_err(|_| bad(format!("row {line}: `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            spectra.push(row);
        }
        let spec = spec.ok_or_else(|| bad("no rows".into()))?;
        Ok(Self { spec, seed, spectra })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("batch serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_names_round_trip() {
        for p in SamplerPath::ALL {
            assert_eq!(p.name().parse::<SamplerPath>().unwrap(), p);
        }
        assert_eq!("gsvd_gaussian".parse::<SamplerPath>().unwrap(), SamplerPath::Gsvd);
    }

    #[test]
    fn dims_round_trip() {
        for d in [Dims::N { n: 4 }, Dims::Pq { p: 3, q: 2 }, Dims::Pqs { p: 3, q: 2, s: 1 }] {
            assert_eq!(d.to_string().parse::<Dims>().unwrap(), d);
        }
    }
}
