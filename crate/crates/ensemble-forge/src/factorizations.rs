//! CS decomposition, GSVD, and the ODO / QDQ factorizations of unitary
//! matrices. Each returns torus coordinates sorted ascending.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::matrix::{
    clusters, complete_columns, eigh, extend_orthonormal, max_abs_diff, normal_eigenvalues, orthonormalize_in_order,
    ql_positive, svd_full, to_complex, to_real, unitarity_residual, wrap_angle, CMat, CVec, DenseMatrix, C64,
    ONE, ZERO,
};
use crate::rng::RngState;

const UNITARY_TOL: f64 = 1e-10;

/// Row blocks `p | q` and column blocks `r | s` of an `n x n` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
}

impl Partition {
    /// Requires `n = p + q = r + s` and `p, q >= s >= 1`, which makes
    /// `r >= max(p, q)`.
    pub fn new(p: usize, q: usize, r: usize, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::Domain("partition needs s >= 1".into()));
        }
        if p + q != r + s {
            return Err(Error::Dimension(format!("p + q = {} but r + s = {}", p + q, r + s)));
        }
        if p < s || q < s {
            return Err(Error::Domain(format!("partition ({p}, {q}, {r}, {s}) needs p, q >= s")));
        }
        Ok(Self { p, q, r, s })
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }
}

/// `U = diag(U_p, U_q) M(theta) diag(V_r, V_s)`.
#[derive(Debug, Clone)]
pub struct CsdResult {
    pub u_p: DenseMatrix,
    pub u_q: DenseMatrix,
    pub v_r: DenseMatrix,
    pub v_s: DenseMatrix,
    /// `s` angles in `[0, pi/2]`, ascending.
    pub theta: Vec<f64>,
    pub partition: Partition,
}

/// The torus element `[[C, 0, S], [0, I, 0], [-S, 0, C]]` with rows split
/// `p | q` and columns split `r | s`.
pub fn torus_matrix(field: FieldTag, part: Partition, theta: &[f64]) -> DenseMatrix {
    let e = field.embed();
    DenseMatrix::from_parts(field, torus_storage(part.n() * e, part.s * e, &expand(theta, e)))
}

fn expand(theta: &[f64], e: usize) -> Vec<f64> {
    theta.iter().flat_map(|&t| std::iter::repeat_n(t, e)).collect()
}

fn torus_storage(n: usize, s: usize, theta: &[f64]) -> CMat {
    let mut m = CMat::identity(n, n);
    for (j, &t) in theta.iter().enumerate() {
        let (sn, cs) = t.sin_cos();
        let k = n - s + j;
        m[(j, j)] = C64::new(cs, 0.0);
        m[(k, k)] = C64::new(cs, 0.0);
        m[(j, k)] = C64::new(sn, 0.0);
        m[(k, j)] = C64::new(-sn, 0.0);
    }
    m
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows() + b.nrows();
    let m = a.ncols() + b.ncols();
    let mut out = CMat::zeros(n, m);
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

impl CsdResult {
    pub fn middle(&self) -> DenseMatrix {
        torus_matrix(self.u_p.field(), self.partition, &self.theta)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let left = block_diag(self.u_p.complex(), self.u_q.complex());
        let right = block_diag(self.v_r.complex(), self.v_s.complex());
        DenseMatrix::from_parts(self.u_p.field(), left * self.middle().complex() * right)
    }

    /// Worst unitarity (and quaternion structure) defect among the four factors.
    pub fn factor_residual(&self) -> f64 {
        [&self.u_p, &self.u_q, &self.v_r, &self.v_s]
            .iter()
            .map(|f| structure_check(f))
            .fold(0.0, f64::max)
    }
}

pub fn structure_check(f: &DenseMatrix) -> f64 {
    let mut r = f.unitarity_residual();
    match f.field() {
        FieldTag::Real => {
            r = r.max(f.complex().iter().fold(0.0f64, |a, z| a.max(z.im.abs())));
        }
        FieldTag::Quaternion => r = r.max(f.quaternion_defect()),
        FieldTag::Complex => {}
    }
    r
}

fn check_unitary(u: &CMat) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", u.nrows(), u.ncols())));
    }
    let res = unitarity_residual(u);
    if res > UNITARY_TOL {
        return Err(Error::NotUnitary { residual: res });
    }
    Ok(())
}

/// CS decomposition. For quaternion input the partition counts quaternion
/// rows and columns.
pub fn csd(u: &DenseMatrix, part: Partition) -> Result<CsdResult> {
    let field = u.field();
    let e = field.embed();
    let data = u.complex();
    if data.nrows() != part.n() * e {
        return Err(Error::Dimension(format!(
            "partition of size {} does not match a {}x{} matrix",
            part.n(),
            u.rows(),
            u.cols()
        )));
    }
    check_unitary(data)?;
    let (p, q, r, s) = (part.p * e, part.q * e, part.r * e, part.s * e);
    let n = p + q;

    let u22 = data.view((p, r), (q, s)).into_owned();
    let (w, cosines, z) = svd_full(field, &u22);
    let v_s = z.adjoint();
    let mut u_q = CMat::zeros(q, q);
    u_q.columns_mut(0, q - s).copy_from(&w.columns(s, q - s));
    u_q.columns_mut(q - s, s).copy_from(&w.columns(0, s));

    let y = data.view((0, r), (p, s)) * &z;
    let sines: Vec<f64> = y.column_iter().map(|c| c.norm()).collect();
    let theta_full: Vec<f64> = (0..s).map(|j| sines[j].atan2(cosines[j].min(1.0))).collect();
    let first = orthonormalize_in_order(field, &y, 1e-13);
    let u_p = complete_columns(field, &first, p);

    let left = block_diag(&u_p, &u_q);
    let t = left.adjoint() * data;
    let m = torus_storage(n, s, &theta_full);
    let v = m.adjoint() * t;
    let v_r = orthonormalize_in_order(field, &v.view((0, 0), (r, r)).into_owned(), 1e-8);

    let theta: Vec<f64> = theta_full.chunks(e).map(|c| c.iter().sum::<f64>() / e as f64).collect();
    Ok(CsdResult {
        u_p: DenseMatrix::from_parts(field, u_p),
        u_q: DenseMatrix::from_parts(field, u_q),
        v_r: DenseMatrix::from_parts(field, v_r),
        v_s: DenseMatrix::from_parts(field, v_s),
        theta,
        partition: part,
    })
}

/// Generalized singular value decomposition of a pair sharing `s` columns:
/// `[A; B] = [U C; V S] R`.
#[derive(Debug, Clone)]
pub struct GsvdResult {
    /// `p x s`, orthonormal columns.
    pub u: DenseMatrix,
    /// `q x s`, orthonormal columns.
    pub v: DenseMatrix,
    /// Diagonal of `C`, descending.
    pub c: Vec<f64>,
    /// Diagonal of `S`, ascending.
    pub s: Vec<f64>,
    /// Angles with `c = cos(theta)`, `s = sin(theta)`, ascending.
    pub theta: Vec<f64>,
    /// `s x s` common right factor.
    pub right: DenseMatrix,
}

impl GsvdResult {
    /// Generalized singular values `c_j / s_j`.
    pub fn ratios(&self) -> Vec<f64> {
        self.c.iter().zip(&self.s).map(|(c, s)| c / s).collect()
    }

    pub fn reconstruct(&self) -> (DenseMatrix, DenseMatrix) {
        let field = self.u.field();
        let e = field.embed();
        let c = diag(&expand(&self.c, e));
        let s = diag(&expand(&self.s, e));
        let a = self.u.complex() * c * self.right.complex();
        let b = self.v.complex() * s * self.right.complex();
        (DenseMatrix::from_parts(field, a), DenseMatrix::from_parts(field, b))
    }
}

fn diag(v: &[f64]) -> CMat {
    CMat::from_fn(v.len(), v.len(), |i, j| if i == j { C64::new(v[i], 0.0) } else { ZERO })
}

/// GSVD computed as the QL decomposition of the stacked pair followed by the
/// cosine-sine split of the orthonormal factor.
pub fn gsvd(a: &DenseMatrix, b: &DenseMatrix) -> Result<GsvdResult> {
    let field = a.field();
    if b.field() != field {
        return Err(Error::Domain("gsvd needs both matrices over the same field".into()));
    }
    let e = field.embed();
    let (p, s) = a.complex().shape();
    let (q, s2) = b.complex().shape();
    if s != s2 {
        return Err(Error::Dimension(format!("column counts differ: {} vs {}", s / e, s2 / e)));
    }
    if p < s || q < s {
        return Err(Error::Dimension(format!("gsvd needs p, q >= s, got p={}, q={}, s={}", p / e, q / e, s / e)));
    }
    let mut x = CMat::zeros(p + q, s);
    x.rows_mut(0, p).copy_from(a.complex());
    x.rows_mut(p, q).copy_from(b.complex());
    let (qm, l) = ql_positive(field, &x)?;
    let q1 = qm.rows(0, p).into_owned();
    let q2 = qm.rows(p, q).into_owned();
    let (u_full, cosines, z) = svd_full(field, &q1);
    let u = u_full.columns(0, s).into_owned();
    let y = &q2 * &z;
    let sines: Vec<f64> = y.column_iter().map(|c| c.norm()).collect();
    let v = orthonormalize_in_order(field, &y, 1e-13);
    let theta_full: Vec<f64> = (0..s).map(|j| sines[j].atan2(cosines[j].min(1.0))).collect();
    let right = z.adjoint() * l;
    let theta: Vec<f64> = theta_full.chunks(e).map(|c| c.iter().sum::<f64>() / e as f64).collect();
    Ok(GsvdResult {
        u: DenseMatrix::from_parts(field, u),
        v: DenseMatrix::from_parts(field, v),
        c: theta.iter().map(|t| t.cos()).collect(),
        s: theta.iter().map(|t| t.sin()).collect(),
        theta,
        right: DenseMatrix::from_parts(field, right),
    })
}

/// `U = O1 diag(d) O2` with real orthogonal `O1`, `O2`.
#[derive(Debug, Clone)]
pub struct OdoResult {
    pub o1: DenseMatrix,
    pub o2: DenseMatrix,
    /// Unit complex numbers sorted by angle; `arg(d_j)` lies in `[0, pi)`.
    pub d: Vec<C64>,
}

impl OdoResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let d = CMat::from_fn(self.d.len(), self.d.len(), |i, j| if i == j { self.d[i] } else { ZERO });
        DenseMatrix::from_parts(FieldTag::Complex, self.o1.complex() * d * self.o2.complex())
    }

    /// The doubled angles `2 arg(d_j)` in `[0, 2pi)`, ascending.
    pub fn doubled_angles(&self) -> Vec<f64> {
        self.d.iter().map(|z| wrap_angle(2.0 * z.arg())).collect()
    }
}

const MAX_ATTEMPTS: usize = 16;

/// ODO decomposition of a unitary matrix.
pub fn odo_decompose(u: &DenseMatrix, rng: &mut RngState) -> Result<OdoResult> {
    let data = u.complex();
    check_unitary(data)?;
    let n = data.nrows();
    let sym = data * data.transpose();
    let x = sym.map(|z| z.re);
    let y = sym.map(|z| z.im);
    for _ in 0..MAX_ATTEMPTS {
        let mu = 2.0 * rng.uniform() - 1.0;
        let k: DMatrix<f64> = &x + &y * mu;
        let (_, o1) = eigh(FieldTag::Real, &to_complex(&k));
        let o1 = to_real(&o1);
        let o1c = to_complex(&o1);
        let dd = o1c.transpose() * &sym * &o1c;
        let off = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(0.0f64, |a, (i, j)| a.max(dd[(i, j)].norm()));
        if off > 1e-8 {
            continue;
        }
        let psi: Vec<f64> = (0..n).map(|j| wrap_angle(dd[(j, j)].arg())).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| psi[a].total_cmp(&psi[b]));
        let o1 = DMatrix::from_fn(n, n, |i, j| o1[(i, order[j])]);
        let d: Vec<C64> = order.iter().map(|&j| C64::from_polar(1.0, 0.5 * psi[j])).collect();
        let dinv = CMat::from_fn(n, n, |i, j| if i == j { d[i].conj() } else { ZERO });
        let o2c = dinv * to_complex(&o1).transpose() * data;
        let imag = o2c.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
        if imag > 1e-7 {
            continue;
        }
        let o2 = o2c.map(|z| C64::new(z.re, 0.0));
        return Ok(OdoResult {
            o1: DenseMatrix::from_parts(FieldTag::Real, to_complex(&o1)),
            o2: DenseMatrix::from_parts(FieldTag::Real, o2),
            d,
        });
    }
    Err(Error::Degeneracy { attempts: MAX_ATTEMPTS })
}

/// `J_n = [[0, I], [-I, 0]]`.
pub fn symplectic_j(n: usize) -> CMat {
    let mut j = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = ONE;
        j[(n + i, i)] = -ONE;
    }
    j
}

/// `max |Q^T J Q - J|`.
pub fn symplectic_residual(q: &CMat) -> f64 {
    let n = q.nrows() / 2;
    let j = symplectic_j(n);
    max_abs_diff(&(q.transpose() * &j * q), &j)
}

/// `U = Q1 diag(d, d) Q2` with unitary symplectic `Q1`, `Q2`.
#[derive(Debug, Clone)]
pub struct QdqResult {
    pub q1: DenseMatrix,
    pub q2: DenseMatrix,
    /// Unit complex numbers sorted by angle; `arg(d_j)` lies in `[0, pi)`.
    pub d: Vec<C64>,
}

impl QdqResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.d.len();
        let mid = CMat::from_fn(2 * n, 2 * n, |i, j| if i == j { self.d[i % n] } else { ZERO });
        DenseMatrix::from_parts(FieldTag::Complex, self.q1.complex() * mid * self.q2.complex())
    }

    pub fn doubled_angles(&self) -> Vec<f64> {
        self.d.iter().map(|z| wrap_angle(2.0 * z.arg())).collect()
    }
}

/// `W = U J U^T J^T`, the unitary skew-Hamiltonian matrix behind QDQ.
pub fn skew_hamiltonian_of(u: &CMat) -> CMat {
    let j = symplectic_j(u.nrows() / 2);
    u * &j * u.transpose() * j.transpose()
}

fn sym_partner(v: &CVec) -> CVec {
    // J^T conj(v) for J = [[0, I], [-I, 0]]
    let n = v.len() / 2;
    let mut w = CVec::zeros(v.len());
    for i in 0..n {
        w[i] = -v[n + i].conj();
        w[n + i] = v[i].conj();
    }
    w
}

/// QDQ decomposition of a `2n x 2n` unitary matrix.
pub fn qdq_decompose(u: &DenseMatrix, rng: &mut RngState) -> Result<QdqResult> {
    let data = u.complex();
    check_unitary(data)?;
    if !data.nrows().is_multiple_of(2) {
        return Err(Error::Dimension("qdq needs an even-sized matrix".into()));
    }
    let n = data.nrows() / 2;
    let w = skew_hamiltonian_of(data);
    let half = C64::new(0.5, 0.0);
    let h1 = (&w + w.adjoint()) * half;
    let h2 = (&w - w.adjoint()) * C64::new(0.0, -0.5);
    for _ in 0..MAX_ATTEMPTS {
        let mu = 2.0 * rng.uniform() - 1.0;
        let k = &h1 + &h2 * C64::new(mu, 0.0);
        let (_, vecs) = eigh(FieldTag::Complex, &k);
        let lambda: Vec<C64> = vecs.column_iter().map(|v| v.dotc(&(&w * v))).collect();
        let resid = (&w * &vecs - &vecs * CMat::from_diagonal(&CVec::from_vec(lambda.clone()))).norm();
        if resid > 1e-8 {
            continue;
        }
        let psi: Vec<f64> = lambda.iter().map(|z| wrap_angle(z.arg())).collect();
        let mut order: Vec<usize> = (0..2 * n).collect();
        order.sort_by(|&a, &b| circ_key(psi[a]).total_cmp(&circ_key(psi[b])));
        let sorted: Vec<f64> = order.iter().map(|&i| circ_key(psi[i])).collect();
        let mut first: Vec<(f64, CVec)> = Vec::new();
        let mut ok = true;
        for range in clusters(&sorted, 1e-7) {
            if range.len() % 2 != 0 {
                ok = false;
                break;
            }
            let cols: Vec<CVec> = range.clone().map(|i| vecs.column(order[i]).into_owned()).collect();
            let mut basis: Vec<CVec> = Vec::new();
            let target = cols.len();
            while basis.len() < target {
                let before = basis.len();
                extend_orthonormal(FieldTag::Complex, &mut basis, &cols, before + 1, 1e-6);
                if basis.len() == before {
                    break;
                }
                let v = basis[before].clone();
                let pv = sym_partner(&v);
                basis.push(pv);
                let ang = wrap_angle(v.dotc(&(&w * &v)).arg());
                first.push((ang, v));
            }
            if basis.len() != target {
                ok = false;
                break;
            }
        }
        if !ok || first.len() != n {
            continue;
        }
        first.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut q1 = CMat::zeros(2 * n, 2 * n);
        for (j, (_, v)) in first.iter().enumerate() {
            q1.set_column(j, v);
            q1.set_column(n + j, &sym_partner(v));
        }
        let q1 = orthonormalize_symplectic(&q1);
        let d: Vec<C64> = first.iter().map(|(a, _)| C64::from_polar(1.0, 0.5 * a)).collect();
        let dinv = CMat::from_fn(2 * n, 2 * n, |i, j| if i == j { d[i % n].conj() } else { ZERO });
        let q2 = dinv * q1.adjoint() * data;
        return Ok(QdqResult {
            q1: DenseMatrix::from_parts(FieldTag::Complex, q1),
            q2: DenseMatrix::from_parts(FieldTag::Complex, q2),
            d,
        });
    }
    Err(Error::Degeneracy { attempts: MAX_ATTEMPTS })
}

// Angles within 1e-7 of 2pi are grouped with those near 0.
fn circ_key(a: f64) -> f64 {
    if std::f64::consts::TAU - a < 1e-7 {
        a - std::f64::consts::TAU
    } else {
        a
    }
}

/// Modified Gram-Schmidt that keeps the `[V, J^T conj(V)]` column structure.
fn orthonormalize_symplectic(q: &CMat) -> CMat {
    let n = q.nrows() / 2;
    let mut out = q.clone();
    for j in 0..n {
        let mut v = q.column(j).into_owned();
        for _ in 0..2 {
            for k in 0..j {
                for col in [k, n + k] {
                    let b = out.column(col).into_owned();
                    let c = b.dotc(&v);
                    v.axpy(-c, &b, ONE);
                }
            }
        }
        let v = v.unscale(v.norm());
        out.set_column(n + j, &sym_partner(&v));
        out.set_column(j, &v);
    }
    out
}

/// Matches doubled eigenangles into pairs on the circle and returns one
/// representative per pair, ascending in `[0, 2pi)`.
pub fn pair_angles(angles: &[f64]) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut left: Vec<f64> = angles.to_vec();
    let mut out = Vec::with_capacity(angles.len() / 2);
    while left.len() >= 2 {
        let a = left.swap_remove(0);
        let (idx, _) = left
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let d = (a - b).rem_euclid(tau);
                (i, d.min(tau - d))
            })
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        let b = left.swap_remove(idx);
        let mut diff = (b - a).rem_euclid(tau);
        if diff > tau / 2.0 {
            diff -= tau;
        }
        out.push(wrap_angle(a + 0.5 * diff));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenangles of `W = U J U^T J^T`, one per doubled pair.
pub fn skew_hamiltonian_angles(u: &DenseMatrix) -> Vec<f64> {
    let w = skew_hamiltonian_of(u.complex());
    let ang: Vec<f64> = normal_eigenvalues(&w).into_iter().map(|z| wrap_angle(z.arg())).collect();
    pair_angles(&ang)
}

/// Eigenangles of `U U^T`.
pub fn symmetric_unitary_angles(u: &DenseMatrix) -> Vec<f64> {
    let s = u.complex() * u.complex().transpose();
    let mut a: Vec<f64> = normal_eigenvalues(&s).into_iter().map(|z| wrap_angle(z.arg())).collect();
    a.sort_by(f64::total_cmp);
    a
}
