//! Lie algebras as explicit real vector spaces of complex matrices, the
//! operator `ad_H` in an orthonormal basis, its ping-pong vectors, and a
//! numerical measurement of restricted roots and their refined
//! multiplicities.
//!
//! A compact torus element `H` is skew-Hermitian and `ad_H` is antisymmetric;
//! a noncompact one is Hermitian and `ad_H` is symmetric. Roots are reported
//! so that `ad_H` has eigenvalues `alpha(H)` (noncompact) or `i alpha(H)`
//! (compact) on the complexified root space.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{clusters, CMat, C64, ONE, ZERO};
use crate::rng::RngState;
use crate::roots::{Root, RootDatum, SpaceType};

type RMat = DMatrix<f64>;
type RVec = DVector<f64>;

const CLUSTER_TOL: f64 = 1e-8;
const FIT_TOL: f64 = 1e-6;
const CHECK_TOL: f64 = 1e-8;
const MAX_ATTEMPTS: usize = 8;

/// Linear conditions cutting the ambient algebra out of `M_N(C)`. Each is an
/// involution and they commute, so their joint fixed space is a projection.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `X = -X^H`
    SkewHermitian,
    /// `X = conj(X)`
    Real,
    /// `X = J conj(X) J^T` with `J = I (x) [[0, 1], [-1, 0]]` (interleaved
    /// quaternion embedding).
    Quaternionic,
    /// Zero off-diagonal blocks for the split `k | N - k`.
    BlockDiagonal(usize),
    /// `X = -D X^H D` with `D = diag(d)`, `d_i = +-1`.
    PseudoSkew(Vec<f64>),
}

impl Constraint {
    fn apply(&self, x: &CMat) -> CMat {
        match self {
            Constraint::SkewHermitian => -x.adjoint(),
            Constraint::Real => x.map(|z| z.conj()),
            Constraint::Quaternionic => {
                let j = quaternion_j(x.nrows() / 2);
                &j * x.map(|z| z.conj()) * j.transpose()
            }
            Constraint::BlockDiagonal(k) => {
                let mut y = x.clone();
                for i in 0..x.nrows() {
                    for l in 0..x.ncols() {
                        if (i < *k) != (l < *k) {
                            y[(i, l)] = -y[(i, l)];
                        }
                    }
                }
                y
            }
            Constraint::PseudoSkew(d) => {
                let dm = real_diag(d);
                -(&dm * x.adjoint() * &dm)
            }
        }
    }
}

/// An involution of the algebra, acting on matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Involution {
    /// `X -> -X^H`
    NegAdjoint,
    /// `X -> conj(X)`, which is `X -> -X^T` on skew-Hermitian matrices.
    Conj,
    /// `X -> P X P^H`
    Inner(CMat),
    /// `X -> P conj(X) P^H`
    InnerConj(CMat),
}

impl Involution {
    pub fn apply(&self, x: &CMat) -> CMat {
        match self {
            Involution::NegAdjoint => -x.adjoint(),
            Involution::Conj => x.map(|z| z.conj()),
            Involution::Inner(p) => p * x * p.adjoint(),
            Involution::InnerConj(p) => p * x.map(|z| z.conj()) * p.adjoint(),
        }
    }
}

/// Named ambient algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    GlReal(usize),
    GlComplex(usize),
    GlQuaternion(usize),
    U(usize),
    O(usize),
    Sp(usize),
    /// `u(n) + u(n)` as block diagonal matrices in `u(2n)`.
    UPlusU(usize),
    Opq(usize, usize),
    Upq(usize, usize),
    Sppq(usize, usize),
}

impl Ambient {
    /// Size `N` of the complex matrices.
    pub fn size(&self) -> usize {
        match *self {
            Ambient::GlReal(n) | Ambient::GlComplex(n) | Ambient::U(n) | Ambient::O(n) => n,
            Ambient::GlQuaternion(n) | Ambient::Sp(n) | Ambient::UPlusU(n) => 2 * n,
            Ambient::Opq(p, q) | Ambient::Upq(p, q) => p + q,
            Ambient::Sppq(p, q) => 2 * (p + q),
        }
    }

    fn constraints(&self) -> Vec<Constraint> {
        use Constraint::*;
        match *self {
            Ambient::GlReal(_) => vec![Real],
            Ambient::GlComplex(_) => vec![],
            Ambient::GlQuaternion(_) => vec![Quaternionic],
            Ambient::U(_) => vec![SkewHermitian],
            Ambient::O(_) => vec![SkewHermitian, Real],
            Ambient::Sp(_) => vec![SkewHermitian, Quaternionic],
            Ambient::UPlusU(n) => vec![SkewHermitian, BlockDiagonal(n)],
            Ambient::Opq(p, q) => vec![PseudoSkew(signs(p, q, 1)), Real],
            Ambient::Upq(p, q) => vec![PseudoSkew(signs(p, q, 1))],
            Ambient::Sppq(p, q) => vec![PseudoSkew(signs(p, q, 2)), Quaternionic],
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Ambient::GlReal(n) => format!("gl({n},R)"),
            Ambient::GlComplex(n) => format!("gl({n},C)"),
            Ambient::GlQuaternion(n) => format!("gl({n},H)"),
            Ambient::U(n) => format!("u({n})"),
            Ambient::O(n) => format!("o({n})"),
            Ambient::Sp(n) => format!("sp({n})"),
            Ambient::UPlusU(n) => format!("u({n})+u({n})"),
            Ambient::Opq(p, q) => format!("o({p},{q})"),
            Ambient::Upq(p, q) => format!("u({p},{q})"),
            Ambient::Sppq(p, q) => format!("sp({p},{q})"),
        }
    }
}

fn signs(p: usize, q: usize, e: usize) -> Vec<f64> {
    (0..(p + q) * e).map(|i| if i < p * e { 1.0 } else { -1.0 }).collect()
}

fn real_diag(d: &[f64]) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
}

fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn j1() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO])
}

fn quaternion_j(n: usize) -> CMat {
    kron(&CMat::identity(n, n), &j1())
}

/// `[[0, I_n], [-I_n, 0]]`
fn block_j(n: usize) -> CMat {
    let mut j = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = ONE;
        j[(n + i, i)] = -ONE;
    }
    j
}

fn vectorize(x: &CMat) -> RVec {
    let n = x.len();
    RVec::from_fn(2 * n, |k, _| if k < n { x[k].re } else { x[k - n].im })
}

/// Real inner product `Re tr(A^H B)`.
fn inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn fro(a: &CMat) -> f64 {
    inner(a, a).sqrt()
}

/// A real Lie algebra given by an orthonormal basis of matrices, two
/// commuting involutions and a basis of a torus in `p_sigma` and `p_tau`.
#[derive(Debug, Clone)]
pub struct LieAlgebraSpec {
    pub label: String,
    pub ambient: Ambient,
    pub sigma: Involution,
    pub tau: Involution,
    /// Orthonormal in `Re tr(A^H B)`.
    pub basis: Vec<CMat>,
    pub torus: Vec<CMat>,
    pub compact: bool,
    coords: RMat,
    sigma_mat: RMat,
    tau_mat: RMat,
}

impl LieAlgebraSpec {
    /// Builds the basis and validates involutions, bracket closure and torus.
    pub fn new(label: impl Into<String>, ambient: Ambient, sigma: Involution, tau: Involution, torus: Vec<CMat>) -> Result<Self> {
        let n = ambient.size();
        let constraints = ambient.constraints();
        let project = |x: &CMat| {
            constraints.iter().fold(x.clone(), |acc, c| (&acc + c.apply(&acc)) * C64::new(0.5, 0.0))
        };
        let mut basis: Vec<CMat> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for u in [ONE, C64::new(0.0, 1.0)] {
                    let mut x = project(&(unit(n, i, j) * u));
                    for _ in 0..2 {
                        for b in &basis {
                            let c = inner(b, &x);
                            x -= b * C64::new(c, 0.0);
                        }
                    }
                    let norm = fro(&x);
                    if norm > 1e-8 {
                        basis.push(x / C64::new(norm, 0.0));
                    }
                }
            }
        }
        let d = basis.len();
        let mut coords = RMat::zeros(2 * n * n, d);
        for (l, b) in basis.iter().enumerate() {
            coords.set_column(l, &vectorize(b));
        }
        let compact = match torus.first() {
            Some(h) => fro(&(h + h.adjoint())) < 1e-12,
            None => return Err(Error::Chamber("the torus basis is empty".into())),
        };
        let mut spec = Self {
            label: label.into(),
            ambient,
            sigma,
            tau,
            basis,
            torus,
            compact,
            coords,
            sigma_mat: RMat::zeros(0, 0),
            tau_mat: RMat::zeros(0, 0),
        };
        spec.sigma_mat = spec.involution_matrix(&spec.sigma)?;
        spec.tau_mat = spec.involution_matrix(&spec.tau)?;
        let comm = (&spec.sigma_mat * &spec.tau_mat - &spec.tau_mat * &spec.sigma_mat).amax();
        if comm > 1e-12 {
            return Err(Error::Involution(comm));
        }
        spec.check_closure()?;
        spec.check_torus()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn torus_rank(&self) -> usize {
        self.torus.len()
    }

    /// Coordinates of `x` in the basis.
    pub fn coordinates(&self, x: &CMat) -> RVec {
        self.coords.tr_mul(&vectorize(x))
    }

    pub fn from_coordinates(&self, c: &RVec) -> CMat {
        self.basis.iter().zip(c.iter()).fold(CMat::zeros(self.ambient.size(), self.ambient.size()), |acc, (b, &x)| {
            acc + b * C64::new(x, 0.0)
        })
    }

    /// Distance from `x` to the algebra.
    pub fn membership_residual(&self, x: &CMat) -> f64 {
        fro(&(x - self.from_coordinates(&self.coordinates(x))))
    }

    /// `sum h_j A_j` over the torus basis.
    pub fn torus_element(&self, h: &[f64]) -> CMat {
        let n = self.ambient.size();
        self.torus.iter().zip(h).fold(CMat::zeros(n, n), |acc, (a, &x)| acc + a * C64::new(x, 0.0))
    }

    fn involution_matrix(&self, inv: &Involution) -> Result<RMat> {
        let d = self.dim();
        let mut m = RMat::zeros(d, d);
        for (l, b) in self.basis.iter().enumerate() {
            let image = inv.apply(b);
            if self.membership_residual(&image) > 1e-10 {
                return Err(Error::Contract(format!("{}: involution does not preserve the algebra", self.label)));
            }
            m.set_column(l, &self.coordinates(&image));
        }
        let sq = (&m * &m - RMat::identity(d, d)).amax();
        if sq > 1e-12 {
            return Err(Error::Contract(format!("{}: involution squares to identity only up to {sq:.3e}", self.label)));
        }
        Ok(m)
    }

    fn check_closure(&self) -> Result<()> {
        let d = self.dim();
        let step = (d / 12).max(1);
        for i in (0..d).step_by(step) {
            for j in (0..d).step_by(step) {
                let (a, b) = (&self.basis[i], &self.basis[j]);
                let br = a * b - b * a;
                let res = self.membership_residual(&br);
                if res > 1e-10 {
                    return Err(Error::Contract(format!("{}: bracket leaves the algebra by {res:.3e}", self.label)));
                }
            }
        }
        Ok(())
    }

    fn check_torus(&self) -> Result<()> {
        for (j, a) in self.torus.iter().enumerate() {
            if self.membership_residual(a) > 1e-10 {
                return Err(Error::Chamber(format!("{}: torus generator {j} is not in the algebra", self.label)));
            }
            let herm = if self.compact { fro(&(a + a.adjoint())) } else { fro(&(a - a.adjoint())) };
            if herm > 1e-12 {
                return Err(Error::Chamber(format!("{}: torus mixes compact and noncompact generators", self.label)));
            }
            for inv in [&self.sigma, &self.tau] {
                let r = fro(&(inv.apply(a) + a));
                if r > 1e-10 {
                    return Err(Error::Chamber(format!("{}: torus generator {j} is not in p_sigma and p_tau", self.label)));
                }
            }
            for b in &self.torus {
                if fro(&(a * b - b * a)) > 1e-10 {
                    return Err(Error::Chamber(format!("{}: torus generators do not commute", self.label)));
                }
            }
        }
        Ok(())
    }

    /// Checks that `h` lies in the span of the torus basis.
    fn check_in_torus(&self, h: &CMat) -> Result<()> {
        if h.shape() != (self.ambient.size(), self.ambient.size()) {
            return Err(Error::Dimension(format!("{}: H has shape {:?}", self.label, h.shape())));
        }
        let mut rest = h.clone();
        let gram = RMat::from_fn(self.torus_rank(), self.torus_rank(), |i, j| inner(&self.torus[i], &self.torus[j]));
        let rhs = RVec::from_fn(self.torus_rank(), |i, _| inner(&self.torus[i], h));
        let c = gram.lu().solve(&rhs).ok_or_else(|| Error::Chamber("torus basis is degenerate".into()))?;
        for (a, &x) in self.torus.iter().zip(c.iter()) {
            rest -= a * C64::new(x, 0.0);
        }
        let res = fro(&rest);
        if res > 1e-10 * fro(h).max(1.0) {
            return Err(Error::Chamber(format!("{}: H is {res:.3e} away from the torus", self.label)));
        }
        Ok(())
    }

    fn ad_unchecked(&self, h: &CMat) -> RMat {
        let d = self.dim();
        let mut m = RMat::zeros(d, d);
        for (l, b) in self.basis.iter().enumerate() {
            m.set_column(l, &self.coordinates(&(h * b - b * h)));
        }
        m
    }

    /// The standard realization of a space type.
    pub fn for_space(space: SpaceType) -> Result<Self> {
        realize(space)
    }

    /// `gl(n, R)` with `sigma = tau = X -> -X^T` and diagonal torus.
    pub fn gl_real(n: usize) -> Result<Self> {
        realize(SpaceType::AI_noncompact { n })
    }

    /// `u(p + q)` with the CS torus for row split `p | q` and `s` angles.
    pub fn u_csd(p: usize, q: usize, s: usize) -> Result<Self> {
        realize(SpaceType::AIII_III { p, q, s })
    }

    /// `o(p, q)` with the Cartan involution and the hyperbolic torus.
    pub fn o_pq(p: usize, q: usize) -> Result<Self> {
        realize(SpaceType::BDI_noncompact { p, q })
    }
}

fn realize(space: SpaceType) -> Result<LieAlgebraSpec> {
    use SpaceType::*;
    space.validate()?;
    let label = space.to_string();
    let i = C64::new(0.0, 1.0);
    let i2 = CMat::identity(2, 2);
    let csd_gen = |n: usize, s: usize, j: usize| unit(n, j, n - s + j) - unit(n, n - s + j, j);
    let hyp_gen = |n: usize, p: usize, j: usize| unit(n, j, p + j) + unit(n, p + j, j);
    let ipq = |p: usize, q: usize, e: usize| real_diag(&signs(p, q, e));
    let spec = match space {
        AI { n } => LieAlgebraSpec::new(
            label,
            Ambient::U(n),
            Involution::Conj,
            Involution::Conj,
            (0..n).map(|j| unit(n, j, j) * i).collect(),
        ),
        A { n } => {
            let mut swap = CMat::zeros(2 * n, 2 * n);
            for j in 0..n {
                swap[(j, n + j)] = ONE;
                swap[(n + j, j)] = ONE;
            }
            LieAlgebraSpec::new(
                label,
                Ambient::UPlusU(n),
                Involution::Inner(swap.clone()),
                Involution::Inner(swap),
                (0..n).map(|j| (unit(2 * n, j, j) - unit(2 * n, n + j, n + j)) * i).collect(),
            )
        }
        AII { n } => LieAlgebraSpec::new(
            label,
            Ambient::U(2 * n),
            Involution::InnerConj(block_j(n)),
            Involution::InnerConj(block_j(n)),
            (0..n).map(|j| (unit(2 * n, j, j) + unit(2 * n, n + j, n + j)) * i).collect(),
        ),
        AI_noncompact { n } => LieAlgebraSpec::new(
            label,
            Ambient::GlReal(n),
            Involution::NegAdjoint,
            Involution::NegAdjoint,
            (0..n).map(|j| unit(n, j, j)).collect(),
        ),
        A_noncompact { n } => LieAlgebraSpec::new(
            label,
            Ambient::GlComplex(n),
            Involution::NegAdjoint,
            Involution::NegAdjoint,
            (0..n).map(|j| unit(n, j, j)).collect(),
        ),
        AII_noncompact { n } => LieAlgebraSpec::new(
            label,
            Ambient::GlQuaternion(n),
            Involution::NegAdjoint,
            Involution::NegAdjoint,
            (0..n).map(|j| kron(&unit(n, j, j), &i2)).collect(),
        ),
        BDI_I { p, q, s } | AIII_III { p, q, s } => {
            let n = p + q;
            let ambient = if matches!(space, BDI_I { .. }) { Ambient::O(n) } else { Ambient::U(n) };
            LieAlgebraSpec::new(
                label,
                ambient,
                Involution::Inner(ipq(n - s, s, 1)),
                Involution::Inner(ipq(p, q, 1)),
                (0..s).map(|j| csd_gen(n, s, j)).collect(),
            )
        }
        CII_II { p, q, s } => {
            let n = p + q;
            LieAlgebraSpec::new(
                label,
                Ambient::Sp(n),
                Involution::Inner(ipq(n - s, s, 2)),
                Involution::Inner(ipq(p, q, 2)),
                (0..s).map(|j| kron(&csd_gen(n, s, j), &i2)).collect(),
            )
        }
        AI_II { n } => LieAlgebraSpec::new(
            label,
            Ambient::U(2 * n),
            Involution::Conj,
            Involution::InnerConj(block_j(n)),
            (0..n).map(|j| (unit(2 * n, j, j) + unit(2 * n, n + j, n + j)) * i).collect(),
        ),
        AI_III { p, q } => {
            let n = p + q;
            LieAlgebraSpec::new(
                label,
                Ambient::U(n),
                Involution::Inner(ipq(p, q, 1)),
                Involution::Conj,
                (0..q).map(|j| hyp_gen(n, p, j) * i).collect(),
            )
        }
        CI_II { p, q } => {
            let n = p + q;
            let k = kron(&CMat::identity(n, n), &CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]));
            LieAlgebraSpec::new(
                label,
                Ambient::Sp(n),
                Involution::Inner(ipq(p, q, 2)),
                Involution::Inner(k),
                (0..q).map(|j| kron(&hyp_gen(n, p, j), &j1())).collect(),
            )
        }
        DI_III { p, q } | AII_III { p, q } => {
            let n = p + q;
            let (d, m) = (p - q, 2 * q);
            // block offsets of (p - q, 2q, p - q, 2q)
            let (o1, o2, o3) = (d, d + m, 2 * d + m);
            let mut jt = CMat::zeros(2 * n, 2 * n);
            for k in 0..d {
                jt[(k, o2 + k)] = ONE;
                jt[(o2 + k, k)] = -ONE;
            }
            for k in 0..q {
                for (a, b, v) in [(0, 1, ONE), (1, 0, -ONE)] {
                    jt[(o1 + 2 * k + a, o1 + 2 * k + b)] = v;
                    jt[(o3 + 2 * k + a, o3 + 2 * k + b)] = -v;
                }
            }
            let torus = (0..q)
                .map(|j| {
                    let mut g = CMat::zeros(2 * n, 2 * n);
                    let e = kron(&unit(q, j, j), &j1());
                    g.view_mut((o1, o3), (m, m)).copy_from(&e);
                    g.view_mut((o3, o1), (m, m)).copy_from(&e);
                    g
                })
                .collect();
            let (ambient, tau) = if matches!(space, DI_III { .. }) {
                (Ambient::O(2 * n), Involution::Inner(jt))
            } else {
                (Ambient::U(2 * n), Involution::InnerConj(jt))
            };
            LieAlgebraSpec::new(label, ambient, Involution::Inner(ipq(2 * p, 2 * q, 1)), tau, torus)
        }
        BDI_noncompact { p, q } | AIII_noncompact { p, q } => {
            let n = p + q;
            let ambient = if matches!(space, BDI_noncompact { .. }) { Ambient::Opq(p, q) } else { Ambient::Upq(p, q) };
            LieAlgebraSpec::new(
                label,
                ambient,
                Involution::NegAdjoint,
                Involution::NegAdjoint,
                (0..q).map(|j| hyp_gen(n, p, j)).collect(),
            )
        }
        CII_noncompact { p, q } => {
            let n = p + q;
            LieAlgebraSpec::new(
                label,
                Ambient::Sppq(p, q),
                Involution::NegAdjoint,
                Involution::NegAdjoint,
                (0..q).map(|j| kron(&hyp_gen(n, p, j), &i2)).collect(),
            )
        }
    }?;
    Ok(spec)
}

/// Matrix of `Y -> [H, Y]` in the basis of `spec`.
pub fn build_ad(spec: &LieAlgebraSpec, h: &CMat) -> Result<RMat> {
    spec.check_in_torus(h)?;
    Ok(spec.ad_unchecked(h))
}

/// A ping-pong pair: `ad_H p = alpha k`, `ad_H k = +-alpha p`, with `k` fixed
/// by `tau` and `p` negated by it (coordinates in the basis).
#[derive(Debug, Clone)]
pub struct PingPongPair {
    pub alpha: f64,
    pub k: RVec,
    pub p: RVec,
}

/// A root value at a particular `H` with refined multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootValue {
    pub value: f64,
    pub m_plus: u32,
    pub m_minus: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct PingPongReport {
    pub label: String,
    pub dim: usize,
    /// Positive root values `alpha(H)`, one per eigenvalue cluster.
    pub roots: Vec<RootValue>,
    /// Dimension of the centralizer of `H`.
    pub zero_dim: usize,
    /// `k_tau cap k_sigma`, `k_tau cap p_sigma`, `p_tau cap k_sigma`, `p_tau cap p_sigma`.
    pub kp_dims: [usize; 4],
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip)]
    pub pairs: Vec<PingPongPair>,
}

/// Orthonormal eigen-clusters of the symmetric matrix `ad_H^2`: the zero
/// cluster and one real root space per nonzero cluster.
fn root_spaces(ad: &RMat) -> (usize, Vec<(f64, RMat)>) {
    let sq = ad * ad;
    let sq = (&sq + sq.transpose()) * 0.5;
    let e = sq.symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].abs().total_cmp(&e.eigenvalues[b].abs()));
    let vals: Vec<f64> = order.iter().map(|&k| e.eigenvalues[k].abs()).collect();
    let scale = vals.last().copied().unwrap_or(0.0).max(1.0);
    let mut zero = 0;
    let mut out = Vec::new();
    for range in clusters(&vals, CLUSTER_TOL * scale) {
        let mean = vals[range.clone()].iter().sum::<f64>() / range.len() as f64;
        if mean <= CLUSTER_TOL * scale {
            zero += range.len();
            continue;
        }
        let r = RMat::from_fn(ad.nrows(), range.len(), |i, j| e.eigenvectors[(i, order[range.start + j])]);
        out.push((mean.sqrt(), r));
    }
    (zero, out)
}

/// Orthonormal basis of the column space of `m` (rank decided by `tol`).
/// Orthonormal basis of the column space by pivoted Gram-Schmidt.
fn range_basis(m: &RMat, tol: f64) -> RMat {
    let mut rest: Vec<RVec> = m.column_iter().map(|c| c.into_owned()).collect();
    let mut basis: Vec<RVec> = Vec::new();
    while let Some((best, norm)) = rest.iter().enumerate().map(|(i, c)| (i, c.norm())).max_by(|a, b| a.1.total_cmp(&b.1)) {
        if norm <= tol {
            break;
        }
        let mut q = rest.swap_remove(best);
        for b in &basis {
            let c = b.dot(&q);
            q.axpy(-c, b, 1.0);
        }
        let q = q.normalize();
        for c in rest.iter_mut() {
            let d = q.dot(c);
            c.axpy(-d, &q, 1.0);
        }
        basis.push(q);
    }
    RMat::from_columns(&basis).resize_horizontally(basis.len(), 0.0)
}

fn refined(r: &RMat, st: &RMat) -> Result<(u32, u32)> {
    let t = (r.transpose() * st * r).trace();
    let dim = r.ncols() as f64;
    let plus = (dim + t) / 4.0;
    let minus = (dim - t) / 4.0;
    if (plus - plus.round()).abs() > FIT_TOL || (minus - minus.round()).abs() > FIT_TOL {
        return Err(Error::Identification(format!("sigma tau trace {t} is not integral on a root space")));
    }
    Ok((plus.round() as u32, minus.round() as u32))
}

/// Splits the algebra at `H` into root spaces and ping-pong pairs relative
/// to `tau`, checking the ping-pong relations.
pub fn split_kp_basis(spec: &LieAlgebraSpec, h: &CMat) -> Result<PingPongReport> {
    let ad = build_ad(spec, h)?;
    let d = spec.dim();
    let st = &spec.sigma_mat * &spec.tau_mat;
    let (s, t) = (&spec.sigma_mat, &spec.tau_mat);
    let id = RMat::identity(d, d);
    let dim_of = |a: &RMat, b: &RMat| ((a * b).trace() / 4.0).round() as usize;
    let kp_dims = [
        dim_of(&(&id + t), &(&id + s)),
        dim_of(&(&id + t), &(&id - s)),
        dim_of(&(&id - t), &(&id + s)),
        dim_of(&(&id - t), &(&id - s)),
    ];
    let sign = if spec.compact { -1.0 } else { 1.0 };
    let (zero_dim, spaces) = root_spaces(&ad);
    let mut roots = Vec::new();
    let mut pairs = Vec::new();
    let mut worst = BTreeMap::from([
        ("ping_pong".to_string(), 0.0f64),
        ("tau_k".to_string(), 0.0),
        ("tau_p".to_string(), 0.0),
        ("dimension".to_string(), 0.0),
    ]);
    let mut total = zero_dim;
    for (alpha, r) in spaces {
        total += r.ncols();
        let (m_plus, m_minus) = refined(&r, &st)?;
        roots.push(RootValue { value: alpha, m_plus, m_minus });
        let p_part = (&id - t) * &r * 0.5;
        let p_basis = range_basis(&p_part, 1e-6);
        for col in p_basis.column_iter() {
            let p = col.into_owned();
            let k = &ad * &p / alpha;
            let bump = |map: &mut BTreeMap<String, f64>, key: &str, v: f64| {
                let e = map.get_mut(key).expect("known key");
                *e = e.max(v);
            };
            bump(&mut worst, "ping_pong", (&ad * &k - &p * (sign * alpha)).amax());
            bump(&mut worst, "tau_k", (t * &k - &k).amax());
            bump(&mut worst, "tau_p", (t * &p + &p).amax());
            pairs.push(PingPongPair { alpha, k, p });
        }
    }
    worst.insert("dimension".into(), (total as f64 - d as f64).abs());
    Ok(PingPongReport { label: spec.label.clone(), dim: d, roots, zero_dim, kp_dims, residuals: worst, pairs })
}

/// Worst residual of `exp(ad_H) Y = e^H Y e^{-H}` over `trials` random `Y`
/// (relative to `|Y|`) and of the cosh/sinh (or cos/sin) action on every
/// ping-pong pair.
pub fn verify_exponential_map(spec: &LieAlgebraSpec, h: &CMat, trials: usize, rng: &mut RngState) -> Result<f64> {
    let ad = build_ad(spec, h)?;
    let e_ad = ad.exp();
    let e_h = h.exp();
    let e_mh = (-h).exp();
    let d = spec.dim();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let y = RVec::from_fn(d, |_, _| rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng));
        let ym = spec.from_coordinates(&y);
        let lhs = spec.from_coordinates(&(&e_ad * &y));
        let rhs = &e_h * &ym * &e_mh;
        worst = worst.max(fro(&(lhs - rhs)) / fro(&ym).max(f64::MIN_POSITIVE));
    }
    let report = split_kp_basis(spec, h)?;
    for pair in &report.pairs {
        let a = pair.alpha;
        let (ek, ep) = (&e_ad * &pair.k, &e_ad * &pair.p);
        let (wk, wp) = if spec.compact {
            (&pair.k * a.cos() - &pair.p * a.sin(), &pair.p * a.cos() + &pair.k * a.sin())
        } else {
            (&pair.k * a.cosh() + &pair.p * a.sinh(), &pair.p * a.cosh() + &pair.k * a.sinh())
        };
        worst = worst.max((ek - wk).norm()).max((ep - wp).norm());
    }
    Ok(worst)
}

fn random_rational(rng: &mut RngState) -> f64 {
    let den = 1 + (rng.uniform() * 17.0) as u32;
    let num = 1 + (rng.uniform() * 40.0) as u32;
    let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
    sign * num as f64 / den.min(17) as f64
}

/// Hermitian form of `ad_H` restricted to a root space, with eigenvalues
/// `+-alpha(H)`.
fn restricted(spec: &LieAlgebraSpec, r: &RMat, h: &[f64]) -> DMatrix<C64> {
    let ad = spec.ad_unchecked(&spec.torus_element(h));
    let a = (r.transpose() * ad * r).map(|x| C64::new(x, 0.0));
    if spec.compact {
        a * C64::new(0.0, -1.0)
    } else {
        a
    }
}

/// Measures the positive roots and their refined multiplicities: joint
/// eigenspaces of `ad_H` at a random rational `H`, root functionals fitted
/// over `rank + 2` random samples and checked at a fresh one.
pub fn measure_root_multiplicities(spec: &LieAlgebraSpec, rng: &mut RngState) -> Result<RootDatum> {
    let rank = spec.torus_rank();
    let st = &spec.sigma_mat * &spec.tau_mat;
    let mut last_err = Error::Identification("no attempt made".into());
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let hstar: Vec<f64> = (0..rank).map(|_| random_rational(rng)).collect();
        let ad = spec.ad_unchecked(&spec.torus_element(&hstar));
        let (zero_dim, spaces) = root_spaces(&ad);
        let mut roots = Vec::new();
        let mut total = zero_dim;
        for (_, r) in spaces {
            total += r.ncols();
            if r.ncols() % 2 != 0 {
                last_err = Error::Identification("odd-dimensional root space".into());
                continue 'attempt;
            }
            let m = r.ncols() / 2;
            let a = restricted(spec, &r, &hstar);
            let a = (&a + a.adjoint()) * C64::new(0.5, 0.0);
            let e = a.symmetric_eigen();
            let pos: Vec<usize> = (0..2 * m).filter(|&k| e.eigenvalues[k] > 0.0).collect();
            if pos.len() != m {
                last_err = Error::Identification("root space does not split into +-alpha".into());
                continue 'attempt;
            }
            let v = DMatrix::from_fn(2 * m, m, |i, j| e.eigenvectors[(i, pos[j])]);
            let value_at = |h: &[f64]| -> (f64, f64) {
                let b = v.adjoint() * restricted(spec, &r, h) * &v;
                let lam = b.trace().re / m as f64;
                let off = (b - DMatrix::<C64>::identity(m, m) * C64::new(lam, 0.0)).camax();
                (lam, off)
            };
            let samples = rank + 2;
            let mut cmat = RMat::zeros(samples, rank);
            let mut rhs = RVec::zeros(samples);
            for k in 0..samples {
                let h: Vec<f64> = (0..rank).map(|_| 2.0 * rng.uniform() - 1.0).collect();
                let (lam, off) = value_at(&h);
                if off > CHECK_TOL {
                    last_err = Error::Identification(format!("cluster is not a joint eigenspace (off-diagonal {off:.3e})"));
                    continue 'attempt;
                }
                cmat.set_row(k, &RVec::from_column_slice(&h).transpose());
                rhs[k] = lam;
            }
            let fit = (cmat.transpose() * &cmat)
                .cholesky()
                .map(|ch| ch.solve(&(cmat.transpose() * &rhs)))
                .ok_or_else(|| Error::Identification("degenerate sample of torus points".into()))?;
            let resid = (&cmat * &fit - &rhs).amax();
            let rounded: Vec<i32> = fit.iter().map(|x| x.round() as i32).collect();
            let drift = fit.iter().zip(&rounded).map(|(x, &r)| (x - r as f64).abs()).fold(0.0, f64::max);
            if resid > FIT_TOL || drift > FIT_TOL {
                return Err(Error::Identification(format!(
                    "{}: coefficient fit residual {resid:.3e}, distance to integers {drift:.3e}",
                    spec.label
                )));
            }
            let fresh: Vec<f64> = (0..rank).map(|_| 2.0 * rng.uniform() - 1.0).collect();
            let (lam, _) = value_at(&fresh);
            let predicted: f64 = rounded.iter().zip(&fresh).map(|(&c, &x)| c as f64 * x).sum();
            if (lam - predicted).abs() > CHECK_TOL {
                return Err(Error::Identification(format!("{}: fitted root misses a fresh H by {:.3e}", spec.label, lam - predicted)));
            }
            let mut coeffs = rounded;
            if coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
                coeffs.iter_mut().for_each(|c| *c = -*c);
            }
            let (m_plus, m_minus) = refined(&r, &st)?;
            roots.push(Root { coeffs, m_plus, m_minus });
        }
        if total != spec.dim() {
            return Err(Error::Contract(format!("{}: root spaces cover {total} of {} dimensions", spec.label, spec.dim())));
        }
        return Ok(RootDatum::new(rank, roots));
    }
    Err(last_err)
}
