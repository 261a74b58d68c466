//! Dense row-major matrices and a symmetric eigensolver.
//!
//! The solver is the classical two-phase scheme: Householder reduction to
//! tridiagonal form followed by the implicit-shift QL iteration. Besides the
//! full decomposition it offers a projection-only path that returns the
//! spectral coefficients `Vᵀx` of a single vector without ever forming the
//! eigenvector matrix, which is what the large sampling experiments need.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// QL iterations allowed per eigenvalue before giving up.
pub const QL_ITERATION_CAP: usize = 80;

/// Relative asymmetry accepted by the eigensolver.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Relative spread under which neighbouring eigenvalues are treated as one eigenspace.
const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Relative closeness under which two components count as tied for the sign convention.
const SIGN_TIE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest `|a_ij - a_ji|`; infinite for non-square matrices.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Flips `v` so that its component of largest magnitude is positive.
/// Components within a relative `1e-10` of the maximum are tied; the lowest index wins.
pub fn canonicalize_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let threshold = max * (1.0 - SIGN_TIE_TOLERANCE);
    if let Some(lead) = v.iter().find(|x| x.abs() >= threshold) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

struct Reflector {
    start: usize,
    beta: f64,
    v: Vec<f64>,
}

impl Reflector {
    /// `x <- (I - beta v vᵀ) x` restricted to `x[start..]`.
    fn apply(&self, x: &mut [f64]) {
        let tail = &mut x[self.start..];
        let t = self.beta * dot(&self.v, tail);
        axpy(-t, &self.v, tail);
    }
}

/// Symmetric tridiagonal form `A = Q T Qᵀ` with `Q` kept as Householder reflectors.
struct Tridiagonal {
    diag: Vec<f64>,
    /// `sub[i] = T[i+1][i]`; the last entry is zero.
    sub: Vec<f64>,
    reflectors: Vec<Reflector>,
}

fn tridiagonalize(mut a: Matrix) -> Tridiagonal {
    let n = a.rows;
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let m = n - start;
        diag[k] = a[(k, k)];
        let x = &a.row(k)[start..];
        let x0 = x[0];
        let tail_sq: f64 = x[1..].iter().map(|t| t * t).sum();
        if tail_sq == 0.0 {
            sub[k] = x0;
            continue;
        }
        let norm = (x0 * x0 + tail_sq).sqrt();
        let alpha = if x0 > 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] = x0 - alpha;
        let beta = 2.0 / (v[0] * v[0] + tail_sq);
        sub[k] = alpha;

        // p = beta * B v over the trailing block B = a[start.., start..]
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = beta * dot(&a.row(start + i)[start..], &v);
        }
        let kappa = 0.5 * beta * dot(p, &v);
        // w = p - kappa v, stored in p
        axpy(-kappa, &v, p);
        // B -= v wᵀ + w vᵀ; the two products commute so B stays exactly symmetric.
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.row_mut(start + i)[start..];
            for ((bij, vj), wj) in row.iter_mut().zip(&v).zip(p.iter()) {
                *bij -= vi * wj + wi * vj;
            }
        }
        reflectors.push(Reflector { start, beta, v });
    }

    match n {
        0 => {}
        1 => diag[0] = a[(0, 0)],
        _ => {
            diag[n - 2] = a[(n - 2, n - 2)];
            diag[n - 1] = a[(n - 1, n - 1)];
            sub[n - 2] = a[(n - 1, n - 2)];
        }
    }

    Tridiagonal {
        diag,
        sub,
        reflectors,
    }
}

impl Tridiagonal {
    /// Rows of the returned matrix are the columns of `Q`.
    fn q_transpose(&self, n: usize) -> Matrix {
        // Backward accumulation Q = H_0 (H_1 (... H_r)) touches only the trailing block.
        let mut q = Matrix::identity(n);
        let mut t = vec![0.0; n];
        for h in self.reflectors.iter().rev() {
            let s = h.start;
            let t = &mut t[s..];
            t.iter_mut().for_each(|x| *x = 0.0);
            for (i, &vi) in h.v.iter().enumerate() {
                axpy(vi, &q.row(s + i)[s..], t);
            }
            for (i, &vi) in h.v.iter().enumerate() {
                axpy(-h.beta * vi, t, &mut q.row_mut(s + i)[s..]);
            }
        }
        q.transpose()
    }

    fn apply_q_transpose(&self, x: &mut [f64]) {
        for h in &self.reflectors {
            h.apply(x);
        }
    }
}

/// Receives the Givens rotations of the QL sweep so they can be applied
/// to whatever representation of the eigenbasis the caller keeps.
trait RotationSink {
    fn rotate(&mut self, i: usize, c: f64, s: f64);
}

impl RotationSink for () {
    fn rotate(&mut self, _: usize, _: f64, _: f64) {}
}

impl RotationSink for Vec<f64> {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let h = self[i + 1];
        self[i + 1] = s * self[i] + c * h;
        self[i] = c * self[i] - s * h;
    }
}

impl RotationSink for Matrix {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let cols = self.cols;
        let (head, tail) = self.data.split_at_mut((i + 1) * cols);
        let ri = &mut head[i * cols..];
        let rj = &mut tail[..cols];
        for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
            let h = *b;
            *b = s * *a + c * h;
            *a = c * *a - s * h;
        }
    }
}

/// Implicit-shift QL on the tridiagonal `(d, e)`; eigenvalues are left in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], sink: &mut impl RotationSink) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_ITERATION_CAP {
                    return Err(Error::NoConvergence {
                        n,
                        cap: QL_ITERATION_CAP,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    sink.rotate(i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn checked_symmetric(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            actual: m.cols,
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let asymmetry = m.asymmetry();
    if asymmetry > SYMMETRY_TOLERANCE * m.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { asymmetry });
    }
    if asymmetry == 0.0 {
        return Ok(m.clone());
    }
    Ok(Matrix::from_fn(m.rows, m.cols, |i, j| {
        0.5 * (m[(i, j)] + m[(j, i)])
    }))
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are ascending; row `i` of `vectors` is the unit eigenvector of
/// `values[i]`, sign-normalized by [`canonicalize_sign`]. Bases of repeated
/// eigenvalues are re-orthonormalized with modified Gram–Schmidt.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    pub fn new(m: &Matrix) -> Result<Self> {
        let a = checked_symmetric(m)?;
        let n = a.rows;
        let tri = tridiagonalize(a);
        let mut basis = tri.q_transpose(n);
        let Tridiagonal {
            mut diag, mut sub, ..
        } = tri;
        tridiagonal_ql(&mut diag, &mut sub, &mut basis)?;

        let order = ascending_order(&diag);
        let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.row_mut(dst).copy_from_slice(basis.row(src));
        }

        let scale = values.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && values[end] - values[end - 1] <= DEGENERACY_TOLERANCE * scale {
                end += 1;
            }
            if end - start > 1 {
                gram_schmidt_rows(&mut vectors, start, end);
            }
            start = end;
        }
        for i in 0..n {
            canonicalize_sign(vectors.row_mut(i));
        }
        Ok(Self { values, vectors })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }
}

fn gram_schmidt_rows(m: &mut Matrix, start: usize, end: usize) {
    for i in start..end {
        for j in start..i {
            let (head, tail) = m.data.split_at_mut(i * m.cols);
            let prev = &head[j * m.cols..(j + 1) * m.cols];
            let cur = &mut tail[..m.cols];
            let r = dot(prev, cur);
            axpy(-r, prev, cur);
        }
        let row = m.row_mut(i);
        let nrm = norm2(row);
        if nrm > 0.0 {
            row.iter_mut().for_each(|x| *x /= nrm);
        }
    }
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    let a = checked_symmetric(m)?;
    let Tridiagonal {
        mut diag, mut sub, ..
    } = tridiagonalize(a);
    tridiagonal_ql(&mut diag, &mut sub, &mut ())?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Eigenvalues (ascending) together with the coordinates of `x` in the
/// eigenbasis, `Vᵀx`, computed without forming `V`.
///
/// The eigenvalues are bitwise identical to those of [`SymmetricEigen::new`];
/// coefficient signs follow the solver's internal basis, not the canonical one.
pub fn eigen_projection(m: &Matrix, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != m.cols {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            actual: x.len(),
        });
    }
    let a = checked_symmetric(m)?;
    let tri = tridiagonalize(a);
    let mut y = x.to_vec();
    tri.apply_q_transpose(&mut y);
    let Tridiagonal {
        mut diag, mut sub, ..
    } = tri;
    tridiagonal_ql(&mut diag, &mut sub, &mut y)?;
    let order = ascending_order(&diag);
    Ok((
        order.iter().map(|&i| diag[i]).collect(),
        order.iter().map(|&i| y[i]).collect(),
    ))
}
