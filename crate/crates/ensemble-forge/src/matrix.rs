//! Dense matrices over the reals, complexes and quaternions, seeded Gaussian
//! and Haar sampling, and the base kernels (QL, Hermitian eigendecomposition,
//! SVD) the rest of the crate builds on.
//!
//! Every matrix is stored as a complex `nalgebra` matrix. Quaternion matrices
//! use the `2n x 2n` complex embedding in which each quaternion `z1 + z2 j`
//! becomes the block `[[z1, z2], [-conj(z2), conj(z1)]]`. Kernels that act on
//! quaternion input return factors that keep this block structure.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::rng::RngState;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A dense matrix tagged with the field it lives over.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    field: FieldTag,
    data: CMat,
}

impl DenseMatrix {
    /// Wraps a complex storage matrix, checking that it is consistent with `field`.
    pub fn new(field: FieldTag, data: CMat) -> Result<Self> {
        let scale = 1.0f64.max(max_abs(&data));
        match field {
            FieldTag::Real => {
                let imag = data.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
                if imag > 1e-12 * scale {
                    return Err(Error::Domain(format!("real matrix has imaginary part {imag:.3e}")));
                }
            }
            FieldTag::Complex => {}
            FieldTag::Quaternion => {
                if !data.nrows().is_multiple_of(2) || !data.ncols().is_multiple_of(2) {
                    return Err(Error::Dimension(format!(
                        "quaternion embedding must have even shape, got {}x{}",
                        data.nrows(),
                        data.ncols()
                    )));
                }
                let defect = quaternion_defect(&data);
                if defect > 1e-10 * scale {
                    return Err(Error::Domain(format!("quaternion block symmetry violated by {defect:.3e}")));
                }
            }
        }
        Ok(Self { field, data })
    }

    pub(crate) fn from_parts(field: FieldTag, data: CMat) -> Self {
        Self { field, data }
    }

    pub fn identity(field: FieldTag, n: usize) -> Self {
        let m = n * field.embed();
        Self { field, data: CMat::identity(m, m) }
    }

    /// Real matrix from row-major entries.
    pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        check_len(rows, cols, entries.len())?;
        let data = CMat::from_fn(rows, cols, |i, j| C64::new(entries[i * cols + j], 0.0));
        Ok(Self { field: FieldTag::Real, data })
    }

    /// Complex matrix from row-major entries.
    pub fn from_complex_rows(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        check_len(rows, cols, entries.len())?;
        let data = CMat::from_fn(rows, cols, |i, j| entries[i * cols + j]);
        Ok(Self { field: FieldTag::Complex, data })
    }

    /// Quaternion matrix from row-major entries `[a, b, c, d]` meaning `a + bi + cj + dk`.
    pub fn from_quaternion_rows(rows: usize, cols: usize, entries: &[[f64; 4]]) -> Result<Self> {
        check_len(rows, cols, entries.len())?;
        let mut data = CMat::zeros(2 * rows, 2 * cols);
        for i in 0..rows {
            for j in 0..cols {
                let [a, b, c, d] = entries[i * cols + j];
                set_quaternion(&mut data, i, j, C64::new(a, b), C64::new(c, d));
            }
        }
        Ok(Self { field: FieldTag::Quaternion, data })
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    /// Rows over the matrix's own field.
    pub fn rows(&self) -> usize {
        self.data.nrows() / self.field.embed()
    }

    /// Columns over the matrix's own field.
    pub fn cols(&self) -> usize {
        self.data.ncols() / self.field.embed()
    }

    /// The complex storage matrix.
    pub fn complex(&self) -> &CMat {
        &self.data
    }

    pub fn into_complex(self) -> CMat {
        self.data
    }

    /// Storage entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let (r, c) = self.data.shape();
        (0..r * c).map(|k| self.data[(k / c, k % c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self { field: self.field, data: self.data.adjoint() }
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.data.ncols() != other.data.nrows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.data.nrows(),
                self.data.ncols(),
                other.data.nrows(),
                other.data.ncols()
            )));
        }
        if self.field != other.field {
            return Err(Error::Domain("cannot multiply matrices over different fields".into()));
        }
        Ok(Self { field: self.field, data: &self.data * &other.data })
    }

    /// Frobenius norm of the storage matrix.
    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// Largest entrywise difference of the storage matrices.
    pub fn distance(&self, other: &DenseMatrix) -> f64 {
        if self.data.shape() != other.data.shape() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }

    /// `max |U^H U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.data)
    }

    /// `max |X - J conj(X) J^T|` over the 2x2 blocks; zero for exact embeddings.
    pub fn quaternion_defect(&self) -> f64 {
        quaternion_defect(&self.data)
    }
}

fn check_len(rows: usize, cols: usize, len: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension("matrix dimensions must be positive".into()));
    }
    if rows * cols != len {
        return Err(Error::Dimension(format!("expected {} entries, got {len}", rows * cols)));
    }
    Ok(())
}

pub(crate) fn set_quaternion(m: &mut CMat, i: usize, j: usize, z1: C64, z2: C64) {
    m[(2 * i, 2 * j)] = z1;
    m[(2 * i, 2 * j + 1)] = z2;
    m[(2 * i + 1, 2 * j)] = -z2.conj();
    m[(2 * i + 1, 2 * j + 1)] = z1.conj();
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub(crate) fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub(crate) fn unitarity_residual(m: &CMat) -> f64 {
    let g = m.adjoint() * m;
    max_abs_diff(&g, &CMat::identity(g.nrows(), g.ncols()))
}

pub(crate) fn quaternion_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in (0..m.nrows()).step_by(2) {
        for j in (0..m.ncols()).step_by(2) {
            let d1 = (m[(i, j)] - m[(i + 1, j + 1)].conj()).norm();
            let d2 = (m[(i, j + 1)] + m[(i + 1, j)].conj()).norm();
            worst = worst.max(d1).max(d2);
        }
    }
    worst
}

/// The antiunitary map `v -> J^T conj(v)` that pairs the two complex columns
/// of a quaternion column.
pub(crate) fn partner(v: &CVec) -> CVec {
    let mut w = CVec::zeros(v.len());
    for k in (0..v.len()).step_by(2) {
        w[k] = -v[k + 1].conj();
        w[k + 1] = v[k].conj();
    }
    w
}

pub(crate) fn to_real(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub(crate) fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub(crate) fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ONE
    } else {
        z / r
    }
}

/// Greedy Gram-Schmidt: orthonormal basis of the span of `cols` that extends
/// `basis`. For quaternion fields each accepted vector brings its partner.
/// Stops once `limit` vectors are in the basis.
pub(crate) fn extend_orthonormal(field: FieldTag, basis: &mut Vec<CVec>, cols: &[CVec], limit: usize, tol: f64) {
    let mut pool: Vec<CVec> = cols.to_vec();
    while basis.len() < limit && !pool.is_empty() {
        for v in pool.iter_mut() {
            for _ in 0..2 {
                for b in basis.iter() {
                    let c = b.dotc(v);
                    v.axpy(-c, b, ONE);
                }
            }
        }
        let (best, norm) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm <= tol {
            break;
        }
        let v = pool.swap_remove(best).unscale(norm);
        if field == FieldTag::Quaternion {
            let w = partner(&v);
            basis.push(v);
            basis.push(w);
        } else {
            basis.push(v);
        }
    }
}

/// Orthonormalizes columns in order, keeping each column's position. Null
/// columns are filled from the orthogonal complement.
pub(crate) fn orthonormalize_in_order(field: FieldTag, m: &CMat, tol: f64) -> CMat {
    let n = m.nrows();
    let k = m.ncols();
    let step = field.embed();
    let mut out: Vec<Option<CVec>> = vec![None; k];
    let mut basis: Vec<CVec> = Vec::new();
    for j in (0..k).step_by(step) {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dotc(&v);
                v.axpy(-c, b, ONE);
            }
        }
        let nv = v.norm();
        if nv <= tol {
            continue;
        }
        let v = v.unscale(nv);
        if field == FieldTag::Quaternion {
            let w = partner(&v);
            basis.push(v.clone());
            basis.push(w.clone());
            out[j] = Some(v);
            out[j + 1] = Some(w);
        } else {
            basis.push(v.clone());
            out[j] = Some(v);
        }
    }
    let units = unit_vectors(n);
    for j in (0..k).step_by(step) {
        if out[j].is_none() {
            let before = basis.len();
            extend_orthonormal(field, &mut basis, &units, before + step, 1e-8);
            out[j] = Some(basis[before].clone());
            if field == FieldTag::Quaternion {
                out[j + 1] = Some(basis[before + 1].clone());
            }
        }
    }
    let cols: Vec<CVec> = out.into_iter().map(|c| c.expect("filled")).collect();
    CMat::from_columns(&cols)
}

fn unit_vectors(n: usize) -> Vec<CVec> {
    (0..n)
        .map(|i| {
            let mut e = CVec::zeros(n);
            e[i] = ONE;
            e
        })
        .collect()
}

/// Extends the orthonormal columns of `q` to an `n x n` unitary matrix.
pub(crate) fn complete_columns(field: FieldTag, q: &CMat, n: usize) -> CMat {
    let mut basis: Vec<CVec> = q.column_iter().map(|c| c.into_owned()).collect();
    let units = unit_vectors(n);
    extend_orthonormal(field, &mut basis, &units, n, 1e-8);
    CMat::from_columns(&basis)
}

fn gaussian_scalar(rng: &mut RngState) -> f64 {
    StandardNormal.sample(rng)
}

/// Gaussian matrix whose entries have each real component i.i.d. N(0, 1).
pub fn sample_gaussian_matrix(field: FieldTag, rows: usize, cols: usize, rng: &mut RngState) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension("matrix dimensions must be positive".into()));
    }
    let data = match field {
        FieldTag::Real => {
            let mut m = CMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m[(i, j)] = C64::new(gaussian_scalar(rng), 0.0);
                }
            }
            m
        }
        FieldTag::Complex => {
            let mut m = CMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    let re = gaussian_scalar(rng);
                    let im = gaussian_scalar(rng);
                    m[(i, j)] = C64::new(re, im);
                }
            }
            m
        }
        FieldTag::Quaternion => {
            let mut m = CMat::zeros(2 * rows, 2 * cols);
            for i in 0..rows {
                for j in 0..cols {
                    let a = gaussian_scalar(rng);
                    let b = gaussian_scalar(rng);
                    let c = gaussian_scalar(rng);
                    let d = gaussian_scalar(rng);
                    set_quaternion(&mut m, i, j, C64::new(a, b), C64::new(c, d));
                }
            }
            m
        }
    };
    Ok(DenseMatrix { field, data })
}

/// QR with positive real diagonal in `R`.
pub(crate) fn qr_positive(field: FieldTag, m: &CMat) -> (CMat, CMat) {
    let (mut q, mut r) = if field == FieldTag::Real {
        let qr = to_real(m).qr();
        (to_complex(&qr.q()), to_complex(&qr.r()))
    } else {
        let qr = m.clone().qr();
        (qr.q(), qr.r())
    };
    for j in 0..r.nrows() {
        let ph = phase(r[(j, j)]);
        if ph != ONE {
            let mut col = q.column_mut(j);
            col *= ph;
            let mut row = r.row_mut(j);
            row *= ph.conj();
        }
    }
    if field == FieldTag::Quaternion {
        for k in (0..q.ncols()).step_by(2) {
            let w = partner(&q.column(k).into_owned());
            q.set_column(k + 1, &w);
        }
        r = q.adjoint() * m;
    }
    (q, r)
}

/// Haar-distributed orthogonal, unitary or unitary symplectic matrix.
pub fn sample_haar(field: FieldTag, n: usize, rng: &mut RngState) -> Result<DenseMatrix> {
    let g = sample_gaussian_matrix(field, n, n, rng)?;
    let (q, _) = qr_positive(field, &g.data);
    Ok(DenseMatrix { field, data: q })
}

pub(crate) fn ql_positive(field: FieldTag, m: &CMat) -> Result<(CMat, CMat)> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::Dimension(format!("QL needs rows >= cols, got {rows}x{cols}")));
    }
    let rev = CMat::from_fn(rows, cols, |i, j| m[(i, cols - 1 - j)]);
    let (q, r) = if field == FieldTag::Real {
        let qr = to_real(&rev).qr();
        (to_complex(&qr.q()), to_complex(&qr.r()))
    } else {
        let qr = rev.qr();
        (qr.q(), qr.r())
    };
    let mut q = CMat::from_fn(rows, cols, |i, j| q[(i, cols - 1 - j)]);
    let mut l = CMat::from_fn(cols, cols, |i, j| r[(cols - 1 - i, cols - 1 - j)]);
    let scale = m.norm();
    for j in 0..cols {
        if l[(j, j)].norm() <= 1e-10 * scale {
            return Err(Error::Singular { column: j / field.embed() });
        }
        let ph = phase(l[(j, j)]);
        let mut col = q.column_mut(j);
        col *= ph;
        let mut row = l.row_mut(j);
        row *= ph.conj();
    }
    if field == FieldTag::Quaternion {
        for k in (0..cols).step_by(2) {
            let w = -partner(&q.column(k + 1).into_owned());
            q.set_column(k, &w);
        }
        l = q.adjoint() * m;
    }
    Ok((q, l))
}

/// `M = QL` with `Q` having orthonormal columns and `L` lower triangular with
/// positive real diagonal.
pub fn ql_decompose(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (q, l) = ql_positive(m.field, &m.data)?;
    Ok((DenseMatrix::from_parts(m.field, q), DenseMatrix::from_parts(m.field, l)))
}

/// Groups ascending values into clusters closer than `tol`.
pub(crate) fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i] - values[i - 1]).abs() > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn structure_cluster(v: &CMat) -> CMat {
    let cols: Vec<CVec> = v.column_iter().map(|c| c.into_owned()).collect();
    let mut basis = Vec::new();
    extend_orthonormal(FieldTag::Quaternion, &mut basis, &cols, cols.len(), 1e-6);
    if basis.len() != cols.len() {
        return v.clone();
    }
    CMat::from_columns(&basis)
}

/// Eigendecomposition of a Hermitian storage matrix: ascending eigenvalues
/// (every one, including quaternion doubles) and unitary eigenvectors.
pub(crate) fn eigh(field: FieldTag, m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let (vals, vecs) = if field == FieldTag::Real {
        let sym = to_real(m);
        let sym = (&sym + sym.transpose()) * 0.5;
        let e = sym.symmetric_eigen();
        (e.eigenvalues.iter().copied().collect::<Vec<_>>(), to_complex(&e.eigenvectors))
    } else {
        let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let e = h.symmetric_eigen();
        (e.eigenvalues.iter().copied().collect::<Vec<_>>(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut vecs = CMat::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    if field == FieldTag::Quaternion {
        let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for range in clusters(&vals, 1e-8 * scale) {
            if range.len() % 2 == 0 {
                let block = vecs.columns(range.start, range.len()).into_owned();
                let fixed = structure_cluster(&block);
                vecs.columns_mut(range.start, range.len()).copy_from(&fixed);
            }
        }
    }
    (vals, vecs)
}

/// Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix. For
/// quaternion input each eigenvalue is reported once (the embedding doubles it)
/// and the eigenvector matrix keeps the quaternion block structure.
pub fn hermitian_eig(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let (r, c) = m.data.shape();
    if r != c {
        return Err(Error::Dimension(format!("eigendecomposition needs a square matrix, got {r}x{c}")));
    }
    let asym = max_abs_diff(&m.data, &m.data.adjoint());
    if asym > 1e-10 * 1.0f64.max(max_abs(&m.data)) {
        return Err(Error::NotHermitian { max_asymmetry: asym });
    }
    let (vals, vecs) = eigh(m.field, &m.data);
    let vals = match m.field {
        FieldTag::Quaternion => vals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect(),
        _ => vals,
    };
    Ok((vals, DenseMatrix::from_parts(m.field, vecs)))
}

/// One-sided Jacobi SVD of a matrix with `rows >= cols`: `A = U diag(s) V^H`
/// with `U` thin. Columns of `U` for zero singular values are left zero.
fn jacobi_svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (m, n) = a.shape();
    let mut u = a.clone();
    let mut v = CMat::identity(n, n);
    let tol = f64::EPSILON * m.max(1) as f64;
    for _ in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = u.column(i).norm_squared();
                let beta = u.column(j).norm_squared();
                let gamma = u.column(i).dotc(&u.column(j));
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                let ph = gamma / g;
                let (a_ij, a_ji) = (ph.conj() * sn, ph * sn);
                for mat in [&mut u, &mut v] {
                    for r in 0..mat.nrows() {
                        let (x, y) = (mat[(r, i)], mat[(r, j)]);
                        mat[(r, i)] = x * c - y * a_ij;
                        mat[(r, j)] = x * a_ji + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = u.column_iter().map(|c| c.norm()).collect();
    for (j, &sj) in s.iter().enumerate() {
        if sj > 0.0 {
            u.column_mut(j).unscale_mut(sj);
        }
    }
    (u, s, v)
}

/// Full SVD of a storage matrix: `M = U diag(sigma) V^H`, sigma descending,
/// `U` and `V` square unitary (quaternion-structured for quaternion input).
pub(crate) fn svd_full(field: FieldTag, m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let (u, s, v) = if rows >= cols {
        jacobi_svd(m)
    } else {
        let (u, s, v) = jacobi_svd(&m.adjoint());
        (v, s, u)
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let mut u = CMat::from_fn(rows, k, |i, j| u[(i, order[j])]);
    let mut v = CMat::from_fn(cols, k, |i, j| v[(i, order[j])]);
    let floor = f64::EPSILON * sigma.first().copied().unwrap_or(0.0) * rows.max(cols) as f64;
    let thin = if rows >= cols { &mut u } else { &mut v };
    for (j, &sj) in sigma.iter().enumerate().take(k) {
        if sj <= floor {
            thin.column_mut(j).fill(ZERO);
        }
    }
    *thin = orthonormalize_in_order(FieldTag::Complex, thin, 0.5);
    if field == FieldTag::Quaternion {
        let scale = sigma.first().copied().unwrap_or(0.0).max(1.0);
        let neg: Vec<f64> = sigma.iter().map(|x| -x).collect();
        for range in clusters(&neg, 1e-9 * scale) {
            if range.len() % 2 != 0 {
                continue;
            }
            let vc = v.columns(range.start, range.len()).into_owned();
            let vs = structure_cluster(&vc);
            let g = vc.adjoint() * &vs;
            let us = u.columns(range.start, range.len()) * g;
            v.columns_mut(range.start, range.len()).copy_from(&vs);
            u.columns_mut(range.start, range.len()).copy_from(&us);
        }
        u = orthonormalize_in_order(field, &u, 1e-8);
        v = orthonormalize_in_order(field, &v, 1e-8);
    }
    (complete_columns(field, &u, rows), sigma, complete_columns(field, &v, cols))
}

/// Singular value decomposition.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Square unitary left factor.
    pub u: DenseMatrix,
    /// Singular values, descending; one per quaternion pair for quaternion input.
    pub sigma: Vec<f64>,
    /// Square unitary right factor.
    pub v: DenseMatrix,
}

impl Svd {
    /// The rectangular diagonal middle factor in storage form.
    pub fn sigma_matrix(&self) -> DenseMatrix {
        let (r, c) = (self.u.data.nrows(), self.v.data.nrows());
        let e = self.u.field.embed();
        let mut s = CMat::zeros(r, c);
        for (i, &x) in self.sigma.iter().enumerate() {
            for t in 0..e {
                s[(e * i + t, e * i + t)] = C64::new(x, 0.0);
            }
        }
        DenseMatrix::from_parts(self.u.field, s)
    }
}

/// `M = U Sigma V^H`.
pub fn svd(m: &DenseMatrix) -> Svd {
    let (u, sigma, v) = svd_full(m.field, &m.data);
    let sigma = match m.field {
        FieldTag::Quaternion => sigma.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect(),
        _ => sigma,
    };
    Svd { u: DenseMatrix::from_parts(m.field, u), sigma, v: DenseMatrix::from_parts(m.field, v) }
}

/// Eigenvalues of a normal matrix via the Schur form.
pub(crate) fn normal_eigenvalues(m: &CMat) -> Vec<C64> {
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigenangles in `[0, 2pi)`, ascending, of a unitary matrix.
pub fn unitary_eigenangles(u: &DenseMatrix) -> Vec<f64> {
    let mut a: Vec<f64> = normal_eigenvalues(&u.data).into_iter().map(|z| wrap_angle(z.arg())).collect();
    a.sort_by(f64::total_cmp);
    a
}

/// Reduces an angle into `[0, 2pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = x.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eig_sorted() {
        let m = DenseMatrix::from_real_rows(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        let (vals, vecs) = hermitian_eig(&m).unwrap();
        assert_eq!(vals.len(), 3);
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        let p = vecs.complex();
        assert!((p[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((p[(2, 1)].norm() - 1.0).abs() < 1e-14);
        assert!((p[(0, 2)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        let m = DenseMatrix::from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let (vals, _) = hermitian_eig(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DenseMatrix::from_real_rows(2, 2, &[0.0, 1.0, 0.5, 0.0]).unwrap();
        match hermitian_eig(&m) {
            Err(Error::NotHermitian { max_asymmetry }) => assert!((max_asymmetry - 0.5).abs() < 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn svd_sign_and_sort() {
        let m = DenseMatrix::from_real_rows(2, 2, &[2.0, 0.0, 0.0, -3.0]).unwrap();
        let s = svd(&m);
        assert!((s.sigma[0] - 3.0).abs() < 1e-14 && (s.sigma[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn svd_rank_one() {
        let x = [1.0, -2.0, 0.5];
        let y = [0.3, 1.0, 2.0, -1.0];
        let entries: Vec<f64> = (0..12).map(|k| x[k / 4] * y[k % 4]).collect();
        let m = DenseMatrix::from_real_rows(3, 4, &entries).unwrap();
        let s = svd(&m);
        assert_eq!(s.sigma.iter().filter(|&&v| v > 1e-12).count(), 1);
    }

    #[test]
    fn svd_with_tiny_entries() {
        // columns with entries near the bottom of the exponent range
        let mut e = vec![0.0; 30];
        for (r, a, b) in [(3, 0.7065, -0.0292), (7, -0.7065, 0.0292), (11, 1e-46, -4e-48), (12, 3e-62, 1e-63)] {
            e[2 * r] = a;
            e[2 * r + 1] = b;
        }
        let m = DenseMatrix::from_real_rows(15, 2, &e).unwrap();
        let s = svd(&m);
        let back = s.u.complex() * s.sigma_matrix().complex() * s.v.complex().adjoint();
        assert!(max_abs_diff(&back, m.complex()) < 1e-15);
        assert!(unitarity_residual(s.u.complex()) < 1e-14);
    }

    #[test]
    fn ql_of_identity() {
        let (q, l) = ql_decompose(&DenseMatrix::identity(FieldTag::Real, 3)).unwrap();
        assert!(max_abs_diff(q.complex(), &CMat::identity(3, 3)) < 1e-15);
        assert!(max_abs_diff(l.complex(), &CMat::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn ql_rejects_duplicate_columns() {
        let m = DenseMatrix::from_real_rows(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]).unwrap();
        assert!(matches!(ql_decompose(&m), Err(Error::Singular { .. })));
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = RngState::new(1);
        assert!(matches!(sample_gaussian_matrix(FieldTag::Real, 0, 2, &mut rng), Err(Error::Dimension(_))));
    }

    #[test]
    fn quaternion_gaussian_is_embedded() {
        let mut rng = RngState::new(3);
        let g = sample_gaussian_matrix(FieldTag::Quaternion, 1, 1, &mut rng).unwrap();
        assert_eq!(g.quaternion_defect(), 0.0);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert!((wrap_angle(-0.5) - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
    }
}
