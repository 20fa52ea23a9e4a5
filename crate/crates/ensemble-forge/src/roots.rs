//! Restricted root tables for every supported decomposition, the Jacobian
//! they induce on the torus, and the change of variables to the classical
//! Hermite, Laguerre, Jacobi and circular densities.
//!
//! Root tables are data, not derived. [`crate::pingpong`] measures them
//! independently from the Lie algebra.
//!
//! Chamber conventions: Jacobi-type angles lie in `[0, pi/2]`, mixed
//! Jacobi-type angles in `[0, pi/4]`, log terms use `|f(alpha(H))|`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;

/// A symmetric space or a pair of commuting involutions, with its dimension
/// parameters.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceType {
    AI { n: usize },
    A { n: usize },
    AII { n: usize },
    BDI_I { p: usize, q: usize, s: usize },
    AIII_III { p: usize, q: usize, s: usize },
    CII_II { p: usize, q: usize, s: usize },
    AI_II { n: usize },
    AI_III { p: usize, q: usize },
    CI_II { p: usize, q: usize },
    DI_III { p: usize, q: usize },
    AII_III { p: usize, q: usize },
    AI_noncompact { n: usize },
    A_noncompact { n: usize },
    AII_noncompact { n: usize },
    BDI_noncompact { p: usize, q: usize },
    AIII_noncompact { p: usize, q: usize },
    CII_noncompact { p: usize, q: usize },
}

/// Names accepted by [`SpaceType::from_parts`], in catalog order.
pub const SPACE_NAMES: [&str; 17] = [
    "AI",
    "A",
    "AII",
    "BDI_I",
    "AIII_III",
    "CII_II",
    "AI_II",
    "AI_III",
    "CI_II",
    "DI_III",
    "AII_III",
    "AI_noncompact",
    "A_noncompact",
    "AII_noncompact",
    "BDI_noncompact",
    "AIII_noncompact",
    "CII_noncompact",
];

impl SpaceType {
    pub fn name(&self) -> &'static str {
        use SpaceType::*;
        match self {
            AI { .. } => "AI",
            A { .. } => "A",
            AII { .. } => "AII",
            BDI_I { .. } => "BDI_I",
            AIII_III { .. } => "AIII_III",
            CII_II { .. } => "CII_II",
            AI_II { .. } => "AI_II",
            AI_III { .. } => "AI_III",
            CI_II { .. } => "CI_II",
            DI_III { .. } => "DI_III",
            AII_III { .. } => "AII_III",
            AI_noncompact { .. } => "AI_noncompact",
            A_noncompact { .. } => "A_noncompact",
            AII_noncompact { .. } => "AII_noncompact",
            BDI_noncompact { .. } => "BDI_noncompact",
            AIII_noncompact { .. } => "AIII_noncompact",
            CII_noncompact { .. } => "CII_noncompact",
        }
    }

    /// Builds a space from its name and dimension list (`n`, `p q` or `p q s`).
    pub fn from_parts(name: &str, dims: &[usize]) -> Result<Self> {
        use SpaceType::*;
        let want = match name {
            "AI" | "A" | "AII" | "AI_II" | "AI_noncompact" | "A_noncompact" | "AII_noncompact" => 1,
            "BDI_I" | "AIII_III" | "CII_II" => 3,
            "AI_III" | "CI_II" | "DI_III" | "AII_III" | "BDI_noncompact" | "AIII_noncompact" | "CII_noncompact" => 2,
            _ => return Err(Error::Unsupported(format!("unknown space type `{name}`"))),
        };
        if dims.len() != want {
            return Err(Error::Dimension(format!("{name} takes {want} dimension parameters, got {}", dims.len())));
        }
        let d = dims;
        let space = match name {
            "AI" => AI { n: d[0] },
            "A" => A { n: d[0] },
            "AII" => AII { n: d[0] },
            "AI_II" => AI_II { n: d[0] },
            "AI_noncompact" => AI_noncompact { n: d[0] },
            "A_noncompact" => A_noncompact { n: d[0] },
            "AII_noncompact" => AII_noncompact { n: d[0] },
            "BDI_I" => BDI_I { p: d[0], q: d[1], s: d[2] },
            "AIII_III" => AIII_III { p: d[0], q: d[1], s: d[2] },
            "CII_II" => CII_II { p: d[0], q: d[1], s: d[2] },
            "AI_III" => AI_III { p: d[0], q: d[1] },
            "CI_II" => CI_II { p: d[0], q: d[1] },
            "DI_III" => DI_III { p: d[0], q: d[1] },
            "AII_III" => AII_III { p: d[0], q: d[1] },
            "BDI_noncompact" => BDI_noncompact { p: d[0], q: d[1] },
            "AIII_noncompact" => AIII_noncompact { p: d[0], q: d[1] },
            _ => CII_noncompact { p: d[0], q: d[1] },
        };
        space.validate()?;
        Ok(space)
    }

    pub fn dims(&self) -> Vec<usize> {
        use SpaceType::*;
        match *self {
            AI { n } | A { n } | AII { n } | AI_II { n } | AI_noncompact { n } | A_noncompact { n }
            | AII_noncompact { n } => vec![n],
            BDI_I { p, q, s } | AIII_III { p, q, s } | CII_II { p, q, s } => vec![p, q, s],
            AI_III { p, q }
            | CI_II { p, q }
            | DI_III { p, q }
            | AII_III { p, q }
            | BDI_noncompact { p, q }
            | AIII_noncompact { p, q }
            | CII_noncompact { p, q } => vec![p, q],
        }
    }

    /// Named dimension parameters, as exported in root-table JSON.
    pub fn params(&self) -> BTreeMap<String, usize> {
        let names: &[&str] = match self.dims().len() {
            1 => &["n"],
            2 => &["p", "q"],
            _ => &["p", "q", "s"],
        };
        names.iter().map(|s| s.to_string()).zip(self.dims()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        use SpaceType::*;
        let bad = |msg: String| Err(Error::Domain(format!("{}: {msg}", self)));
        match *self {
            AI { n } | A { n } | AII { n } | AI_II { n } | AI_noncompact { n } | A_noncompact { n }
            | AII_noncompact { n } => {
                if n == 0 {
                    return bad("needs n >= 1".into());
                }
            }
            BDI_I { p, q, s } | AIII_III { p, q, s } | CII_II { p, q, s } => {
                if s == 0 || p < s || q < s {
                    return bad("needs p, q >= s >= 1".into());
                }
            }
            AI_III { p, q }
            | CI_II { p, q }
            | DI_III { p, q }
            | AII_III { p, q }
            | BDI_noncompact { p, q }
            | AIII_noncompact { p, q }
            | CII_noncompact { p, q } => {
                if q == 0 || p < q {
                    return bad("needs p >= q >= 1".into());
                }
            }
        }
        Ok(())
    }

    /// Dimension of the torus.
    pub fn torus_rank(&self) -> usize {
        use SpaceType::*;
        match *self {
            AI { n } | A { n } | AII { n } | AI_II { n } | AI_noncompact { n } | A_noncompact { n }
            | AII_noncompact { n } => n,
            BDI_I { s, .. } | AIII_III { s, .. } | CII_II { s, .. } => s,
            AI_III { q, .. }
            | CI_II { q, .. }
            | DI_III { q, .. }
            | AII_III { q, .. }
            | BDI_noncompact { q, .. }
            | AIII_noncompact { q, .. }
            | CII_noncompact { q, .. } => q,
        }
    }

    /// The beta of the induced classical ensemble.
    pub fn beta(&self) -> u32 {
        use SpaceType::*;
        match self {
            AI { .. } | BDI_I { .. } | AI_III { .. } | AI_noncompact { .. } | BDI_noncompact { .. } => 1,
            A { .. } | AIII_III { .. } | AI_II { .. } | CI_II { .. } | DI_III { .. } | A_noncompact { .. }
            | AIII_noncompact { .. } => 2,
            AII { .. } | CII_II { .. } | AII_III { .. } | AII_noncompact { .. } | CII_noncompact { .. } => 4,
        }
    }

    pub fn is_compact(&self) -> bool {
        !self.name().ends_with("noncompact")
    }

    /// The Jacobian mode matching the classical density: compact types use
    /// the trigonometric form, noncompact types the flat tangent-space form.
    pub fn natural_mode(&self) -> JacobianMode {
        if self.is_compact() {
            JacobianMode::Compact
        } else {
            JacobianMode::Flat
        }
    }

    /// Every valid space with `n, p, q <= max_pq`, `s <= max_s`, `p + q <= max_n`.
    pub fn enumerate(max_pq: usize, max_s: usize, max_n: usize) -> Vec<SpaceType> {
        let mut out = Vec::new();
        for name in SPACE_NAMES {
            for a in 1..=max_pq {
                if ["AI", "A", "AII", "AI_II", "AI_noncompact", "A_noncompact", "AII_noncompact"].contains(&name) {
                    if a <= max_n {
                        out.extend(SpaceType::from_parts(name, &[a]));
                    }
                    continue;
                }
                for b in 1..=max_pq {
                    if a + b > max_n {
                        continue;
                    }
                    if ["BDI_I", "AIII_III", "CII_II"].contains(&name) {
                        for s in 1..=max_s {
                            out.extend(SpaceType::from_parts(name, &[a, b, s]));
                        }
                    } else {
                        out.extend(SpaceType::from_parts(name, &[a, b]));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for SpaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims().iter().map(|d| d.to_string()).collect();
        write!(f, "{}({})", self.name(), dims.join(","))
    }
}

impl FromStr for SpaceType {
    type Err = Error;

    /// Parses `NAME(a,b,c)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Domain(format!("expected NAME(dims), got `{s}`")))?;
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Domain(format!("missing `)` in `{s}`")))?;
        let dims = inner
            .split(',')
            .map(|d| d.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Domain(format!("bad dimension in `{s}`: {e}")))?;
        SpaceType::from_parts(name.trim(), &dims)
    }
}

/// One positive restricted root with its refined multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub coeffs: Vec<i32>,
    pub m_plus: u32,
    pub m_minus: u32,
}

impl Root {
    pub fn eval(&self, h: &[f64]) -> f64 {
        self.coeffs.iter().zip(h).map(|(&c, &x)| c as f64 * x).sum()
    }

    pub fn multiplicity(&self) -> u32 {
        self.m_plus + self.m_minus
    }
}

/// Positive roots of a space. Roots of multiplicity zero are left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub torus_rank: usize,
    pub roots: Vec<Root>,
}

impl RootDatum {
    /// Builds a datum, dropping empty roots and sorting by coefficient vector.
    pub fn new(torus_rank: usize, roots: impl IntoIterator<Item = Root>) -> Self {
        let mut roots: Vec<Root> = roots.into_iter().filter(|r| r.multiplicity() > 0).collect();
        roots.sort();
        Self { torus_rank, roots }
    }

    /// Total real dimension of the positive root spaces.
    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(Root::multiplicity).sum()
    }
}

fn unit(rank: usize, entries: &[(usize, i32)]) -> Vec<i32> {
    let mut v = vec![0; rank];
    for &(i, c) in entries {
        v[i] += c;
    }
    v
}

/// Root families of type BC: `e_j - e_k`, `e_j + e_k` (j < k), `e_j`, `2 e_j`,
/// each with its own `(m+, m-)`.
fn bc_roots(rank: usize, diff: (u32, u32), sum: (u32, u32), single: (u32, u32), double: (u32, u32)) -> Vec<Root> {
    let mut out = Vec::new();
    for j in 0..rank {
        for k in j + 1..rank {
            out.push(Root { coeffs: unit(rank, &[(j, 1), (k, -1)]), m_plus: diff.0, m_minus: diff.1 });
            out.push(Root { coeffs: unit(rank, &[(j, 1), (k, 1)]), m_plus: sum.0, m_minus: sum.1 });
        }
        out.push(Root { coeffs: unit(rank, &[(j, 1)]), m_plus: single.0, m_minus: single.1 });
        out.push(Root { coeffs: unit(rank, &[(j, 2)]), m_plus: double.0, m_minus: double.1 });
    }
    out
}

fn a_roots(rank: usize, m: (u32, u32)) -> Vec<Root> {
    bc_roots(rank, m, (0, 0), (0, 0), (0, 0))
}

/// The printed root table of `space`.
pub fn root_data(space: SpaceType) -> Result<RootDatum> {
    use SpaceType::*;
    space.validate()?;
    let b = space.beta();
    let rank = space.torus_rank();
    let roots = match space {
        AI { .. } | A { .. } | AII { .. } | AI_noncompact { .. } | A_noncompact { .. } | AII_noncompact { .. } => {
            a_roots(rank, (b, 0))
        }
        BDI_I { p, q, s } | AIII_III { p, q, s } | CII_II { p, q, s } => {
            let (p, q, s) = (p as u32, q as u32, s as u32);
            bc_roots(rank, (b, 0), (b, 0), (b * (p - s), b * (q - s)), (b - 1, 0))
        }
        AI_II { .. } => a_roots(rank, (2, 2)),
        AI_III { p, q } | CI_II { p, q } => {
            let d = (p - q) as u32;
            bc_roots(rank, (b, b), (b, b), (b * d, b * d), (b - 1, b))
        }
        DI_III { p, q } | AII_III { p, q } => {
            let d = (p - q) as u32;
            bc_roots(rank, (b, b), (b, b), (b / 2 * d, b / 2 * d), (b - 1, b / 2 - 1))
        }
        BDI_noncompact { p, q } | AIII_noncompact { p, q } | CII_noncompact { p, q } => {
            let d = (p - q) as u32;
            bc_roots(rank, (b, 0), (b, 0), (b * d, 0), (b - 1, 0))
        }
    };
    Ok(RootDatum::new(rank, roots))
}

/// The printed table with the `+-theta_j` entry of the D I-III / A II-III
/// family replaced by `(beta (p - q), beta (p - q))`. The printed value
/// `beta (p - q) / 2` is not compatible with the torus these types use: for
/// `p > q`, twice the total root multiplicity plus the centralizer dimension
/// would fall short of the dimension of the algebra. This version is what
/// [`crate::pingpong::measure_root_multiplicities`] finds.
pub fn dimension_consistent_root_data(space: SpaceType) -> Result<RootDatum> {
    let mut datum = root_data(space)?;
    if let SpaceType::DI_III { p, q } | SpaceType::AII_III { p, q } = space {
        let m = space.beta() * (p - q) as u32;
        let rank = datum.torus_rank;
        datum.roots.retain(|r| !(r.coeffs.iter().filter(|&&c| c != 0).count() == 1 && r.coeffs.contains(&1)));
        datum = RootDatum::new(
            rank,
            datum.roots.into_iter().chain((0..rank).map(|j| Root { coeffs: unit(rank, &[(j, 1)]), m_plus: m, m_minus: m })),
        );
    }
    Ok(datum)
}

/// Which pair of functions weights `m+` and `m-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianMode {
    /// `|sin alpha|^{m+} |cos alpha|^{m-}`
    Compact,
    /// `|sinh alpha|^{m+} |cosh alpha|^{m-}`
    Noncompact,
    /// `|alpha|^{m}`; only defined when every `m-` is zero.
    Flat,
}

/// Log of the Jacobian of the decomposition at torus coordinates `h`.
/// Returns `-inf` on chamber walls.
pub fn log_jacobian(space: SpaceType, h: &[f64], mode: JacobianMode) -> Result<f64> {
    let datum = root_data(space)?;
    if h.len() != datum.torus_rank {
        return Err(Error::Dimension(format!(
            "{space} has torus rank {}, got {} coordinates",
            datum.torus_rank,
            h.len()
        )));
    }
    if mode == JacobianMode::Flat && datum.roots.iter().any(|r| r.m_minus > 0) {
        return Err(Error::Mode(format!("{space} has roots with m- > 0; the flat Jacobian is undefined")));
    }
    let term = |m: u32, v: f64| if m == 0 { 0.0 } else { m as f64 * v.abs().ln() };
    let mut total = 0.0;
    for root in &datum.roots {
        let a = root.eval(h);
        total += match mode {
            JacobianMode::Compact => term(root.m_plus, a.sin()) + term(root.m_minus, a.cos()),
            JacobianMode::Noncompact => term(root.m_plus, a.sinh()) + term(root.m_minus, a.cosh()),
            JacobianMode::Flat => term(root.m_plus, a),
        };
    }
    Ok(total)
}

/// Classical ensemble family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Hermite,
    Laguerre,
    Jacobi,
    Circular,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Hermite => "hermite",
            Family::Laguerre => "laguerre",
            Family::Jacobi => "jacobi",
            Family::Circular => "circular",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hermite" => Ok(Family::Hermite),
            "laguerre" => Ok(Family::Laguerre),
            "jacobi" => Ok(Family::Jacobi),
            "circular" => Ok(Family::Circular),
            _ => Err(Error::Unsupported(format!("unknown family `{s}`"))),
        }
    }
}

/// Map from a torus coordinate `h` to the classical variable `x`.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableMap {
    /// `x = h`
    Identity,
    /// `x = cos^2 h`
    Cos2,
    /// `x = sin^2 2h`
    Sin2_2theta,
    /// `x = h^2`
    Square,
    /// `x = 2h mod 2 pi`
    AngleDouble,
    /// `x = 4h mod 2 pi`
    AngleQuadruple,
}

impl VariableMap {
    pub fn apply(self, h: f64) -> f64 {
        match self {
            VariableMap::Identity => h,
            VariableMap::Cos2 => h.cos().powi(2),
            VariableMap::Sin2_2theta => (2.0 * h).sin().powi(2),
            VariableMap::Square => h * h,
            VariableMap::AngleDouble => (2.0 * h).rem_euclid(std::f64::consts::TAU),
            VariableMap::AngleQuadruple => (4.0 * h).rem_euclid(std::f64::consts::TAU),
        }
    }

    /// `log |dx/dh|`
    pub fn log_derivative(self, h: f64) -> f64 {
        match self {
            VariableMap::Identity => 0.0,
            VariableMap::Cos2 => (2.0 * h).sin().abs().ln(),
            VariableMap::Sin2_2theta => (2.0 * (4.0 * h).sin()).abs().ln(),
            VariableMap::Square => (2.0 * h).abs().ln(),
            VariableMap::AngleDouble => 2f64.ln(),
            VariableMap::AngleQuadruple => 4f64.ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VariableMap::Identity => "identity",
            VariableMap::Cos2 => "cos2",
            VariableMap::Sin2_2theta => "sin2_2theta",
            VariableMap::Square => "square",
            VariableMap::AngleDouble => "angle_double",
            VariableMap::AngleQuadruple => "angle_quadruple",
        }
    }
}

/// Parameters of the classical ensemble a space induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalParams {
    pub family: Family,
    pub beta: u32,
    /// Jacobi exponent of `x`.
    pub alpha1: Option<f64>,
    /// Jacobi exponent of `1 - x`.
    pub alpha2: Option<f64>,
    /// Laguerre exponent of `x`.
    pub alpha: Option<f64>,
    pub m: usize,
    pub variable_map: VariableMap,
}

impl ClassicalParams {
    pub fn hermite(beta: u32, m: usize) -> Self {
        Self { family: Family::Hermite, beta, alpha1: None, alpha2: None, alpha: None, m, variable_map: VariableMap::Identity }
    }

    pub fn laguerre(beta: u32, m: usize, alpha: f64) -> Self {
        Self {
            family: Family::Laguerre,
            beta,
            alpha1: None,
            alpha2: None,
            alpha: Some(alpha),
            m,
            variable_map: VariableMap::Square,
        }
    }

    pub fn jacobi(beta: u32, m: usize, alpha1: f64, alpha2: f64, variable_map: VariableMap) -> Self {
        Self { family: Family::Jacobi, beta, alpha1: Some(alpha1), alpha2: Some(alpha2), alpha: None, m, variable_map }
    }

    pub fn circular(beta: u32, m: usize, variable_map: VariableMap) -> Self {
        Self { family: Family::Circular, beta, alpha1: None, alpha2: None, alpha: None, m, variable_map }
    }

    /// Log density without the Gaussian or exponential weight: the
    /// Vandermonde factor times the power weights.
    pub fn log_kernel(&self, x: &[f64]) -> f64 {
        let beta = self.beta as f64;
        let mut total = 0.0;
        for j in 0..x.len() {
            for k in j + 1..x.len() {
                let d = match self.family {
                    Family::Circular => 2.0 * ((x[j] - x[k]) / 2.0).sin().abs(),
                    _ => (x[j] - x[k]).abs(),
                };
                total += beta * d.ln();
            }
        }
        let pow = |a: f64, v: f64| if a == 0.0 { 0.0 } else { a * v.ln() };
        match self.family {
            Family::Jacobi => {
                let (a1, a2) = (self.alpha1.unwrap_or(0.0), self.alpha2.unwrap_or(0.0));
                for &v in x {
                    if !(0.0..=1.0).contains(&v) {
                        return f64::NEG_INFINITY;
                    }
                    total += pow(a1, v) + pow(a2, 1.0 - v);
                }
            }
            Family::Laguerre => {
                let a = self.alpha.unwrap_or(0.0);
                for &v in x {
                    if v < 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    total += pow(a, v);
                }
            }
            Family::Hermite | Family::Circular => {}
        }
        total
    }

    /// Full unnormalized log density.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let weight: f64 = match self.family {
            Family::Hermite => x.iter().map(|v| -v * v / 2.0).sum(),
            Family::Laguerre => x.iter().map(|v| -v / 2.0).sum(),
            Family::Jacobi | Family::Circular => 0.0,
        };
        let k = self.log_kernel(x);
        if k == f64::NEG_INFINITY {
            k
        } else {
            k + weight
        }
    }
}

/// The classical ensemble induced by `space` under its torus change of
/// variables.
pub fn classical_params(space: SpaceType) -> Result<ClassicalParams> {
    use SpaceType::*;
    space.validate()?;
    let b = space.beta();
    let bf = b as f64;
    let m = space.torus_rank();
    Ok(match space {
        AI { .. } | A { .. } | AII { .. } => ClassicalParams::circular(b, m, VariableMap::AngleDouble),
        AI_II { .. } => ClassicalParams::circular(b, m, VariableMap::AngleQuadruple),
        BDI_I { p, q, s } | AIII_III { p, q, s } | CII_II { p, q, s } => {
            let a1 = bf * (q - s + 1) as f64 / 2.0 - 1.0;
            let a2 = bf * (p - s + 1) as f64 / 2.0 - 1.0;
            ClassicalParams::jacobi(b, m, a1, a2, VariableMap::Cos2)
        }
        AI_III { p, q } | CI_II { p, q } => {
            let a1 = bf * (p - q + 1) as f64 / 2.0 - 1.0;
            let a2 = (bf - 1.0) / 2.0;
            ClassicalParams::jacobi(b, m, a1, a2, VariableMap::Sin2_2theta)
        }
        DI_III { p, q } | AII_III { p, q } => {
            let a1 = bf * (p - q + 2) as f64 / 4.0 - 1.0;
            let a2 = (bf - 4.0) / 4.0;
            ClassicalParams::jacobi(b, m, a1, a2, VariableMap::Sin2_2theta)
        }
        AI_noncompact { .. } | A_noncompact { .. } | AII_noncompact { .. } => ClassicalParams::hermite(b, m),
        BDI_noncompact { p, q } | AIII_noncompact { p, q } | CII_noncompact { p, q } => {
            ClassicalParams::laguerre(b, m, bf * (p - q + 1) as f64 / 2.0 - 1.0)
        }
    })
}

/// Upper end of the open chamber for each torus coordinate, or `None` when
/// coordinates are unbounded.
fn chamber_bound(map: VariableMap) -> Option<f64> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    match map {
        VariableMap::Cos2 => Some(FRAC_PI_2),
        VariableMap::Sin2_2theta => Some(FRAC_PI_4),
        VariableMap::AngleDouble => Some(PI),
        VariableMap::AngleQuadruple => Some(FRAC_PI_2),
        VariableMap::Identity | VariableMap::Square => None,
    }
}

/// Compares `log_jacobian(h) - sum log|dx/dh|` with the classical log kernel
/// at `points` random chamber points. Returns the largest deviation of the
/// difference from its value at the first point.
pub fn change_of_variables_defect(space: SpaceType, points: usize, rng: &mut RngState) -> Result<f64> {
    let params = classical_params(space)?;
    let mode = space.natural_mode();
    let rank = space.torus_rank();
    let map = params.variable_map;
    let mut reference = None;
    let mut worst = 0.0f64;
    for _ in 0..points {
        let h: Vec<f64> = (0..rank)
            .map(|_| match chamber_bound(map) {
                Some(top) => top * (0.05 + 0.9 * rng.uniform()),
                None => 0.2 + 2.0 * rng.uniform(),
            })
            .collect();
        let x: Vec<f64> = h.iter().map(|&v| map.apply(v)).collect();
        let lhs = log_jacobian(space, &h, mode)? - h.iter().map(|&v| map.log_derivative(v)).sum::<f64>();
        let diff = lhs - params.log_kernel(&x);
        match reference {
            None => reference = Some(diff),
            Some(r) => worst = worst.max((diff - r).abs()),
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let s: SpaceType = "AIII_III(3,2,1)".parse().unwrap();
        assert_eq!(s, SpaceType::AIII_III { p: 3, q: 2, s: 1 });
        assert_eq!(s.to_string(), "AIII_III(3,2,1)");
        assert!("AIII_III(1,2,3)".parse::<SpaceType>().is_err());
        assert!("XYZ(1)".parse::<SpaceType>().is_err());
    }

    #[test]
    fn enumerate_is_valid() {
        let all = SpaceType::enumerate(4, 2, 6);
        assert!(all.iter().all(|s| s.validate().is_ok()));
        for name in SPACE_NAMES {
            assert!(all.iter().any(|s| s.name() == name), "{name}");
        }
    }
}
