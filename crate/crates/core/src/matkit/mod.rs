//! Small dense matrices.
//!
//! Everything in this crate lives in dimension at most a dozen or so, so a
//! row-major `Vec<f64>` with naive products is all that is needed. The
//! newtypes [`SymMatrix`], [`AntisymMatrix`] and [`Rotation`] carry the
//! structural invariants; [`ComplexHermitian`] stores a hermitian matrix as a
//! (symmetric, antisymmetric) pair of real parts.

mod eigen;
mod haar;

pub use eigen::{antisym_moduli, eigen_hermitian, eigen_sym, rank, EigenSym, MAX_SWEEPS};
pub use haar::{haar_rotation, haar_rotation_with};

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance of the eigensolvers.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Orthogonality tolerance of a [`Rotation`], per entry.
pub const ORTHO_TOL: f64 = 1e-12;

/// Determinant tolerance of a [`Rotation`].
pub const DET_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            data.extend_from_slice(row.as_ref());
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "incompatible product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Commutator `self * other - other * self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap();
            if a[piv * n + k] == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[k * n + k];
            det *= d;
            for i in k + 1..n {
                let f = a[i * n + k] / d;
                if f != 0.0 {
                    for j in k..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        det
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot falls below `pivot_tol`.
    pub fn solve(&self, b: &[f64], pivot_tol: f64) -> Option<Vec<f64>> {
        assert!(self.is_square());
        let n = self.rows;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&p, &q| a[p * n + k].abs().total_cmp(&a[q * n + k].abs()))
                .unwrap();
            if a[piv * n + k].abs() <= pivot_tol {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                x.swap(k, piv);
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k * n + j] * x[j]).sum();
            x[k] = (x[k] - s) / a[k * n + k];
        }
        Some(x)
    }

    /// Block-diagonal matrix.
    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
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

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// The standard complex structure `[[0, -Id], [Id, 0]]` on `R^{2p}`.
pub fn j0(p: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        j[(i, p + i)] = -1.0;
        j[(p + i, i)] = 1.0;
    }
    j
}

/// Symmetric matrix. Construction symmetrizes, so `m[i][j] == m[j][i]` holds
/// exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidMatrix("square"));
        }
        if !m.is_finite() {
            return Err(Error::InvalidMatrix("finite"));
        }
        let n = m.rows();
        let sym = Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        Ok(SymMatrix(sym))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        SymMatrix(Matrix::from_diag(diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// Antisymmetric matrix; `m[i][j] == -m[j][i]` holds exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AntisymMatrix(Matrix);

impl AntisymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidMatrix("square"));
        }
        if !m.is_finite() {
            return Err(Error::InvalidMatrix("finite"));
        }
        let n = m.rows();
        Ok(AntisymMatrix(Matrix::from_fn(n, n, |i, j| {
            0.5 * (m[(i, j)] - m[(j, i)])
        })))
    }

    /// Like [`AntisymMatrix::new`] but rejects input that is not
    /// antisymmetric within `tol` per entry.
    pub fn checked(m: Matrix, tol: f64) -> Result<Self> {
        if m.is_square() && m.max_abs_diff(&m.transpose().scale(-1.0)) > tol {
            return Err(Error::InvalidMatrix("antisymmetric"));
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// `exp(t * self)`, computed on the eigenspaces of `self^2`.
    ///
    /// On an eigenspace where `self^2 = -w^2`, the exponential is
    /// `cos(wt) Id + sin(wt)/w * self`; on the kernel it is the identity.
    pub fn exp(&self, t: f64) -> Result<Rotation> {
        let n = self.dim();
        let omega = &self.0;
        let scale = omega.max_abs();
        if scale == 0.0 || t == 0.0 {
            return Ok(Rotation(Matrix::identity(n)));
        }
        let neg_sq = SymMatrix::new(omega.transpose().mul(omega))?;
        let eig = eigen_sym(&neg_sq, DEFAULT_TOL)?;
        // Cluster numerically equal frequencies so each eigenspace gets one w.
        let freqs: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0).sqrt()).collect();
        let mut cluster_freq = freqs.clone();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (freqs[start] - freqs[end]).abs() <= 1e-9 * scale {
                end += 1;
            }
            let mean = freqs[start..end].iter().sum::<f64>() / (end - start) as f64;
            cluster_freq[start..end].iter_mut().for_each(|f| *f = mean);
            start = end;
        }
        let mut out = Matrix::zeros(n, n);
        for (k, &w) in cluster_freq.iter().enumerate() {
            let v = eig.vectors.column(k);
            let ov = omega.mul_vec(&v);
            let (c, s) = if w <= 1e-12 * scale {
                (1.0, t)
            } else {
                ((w * t).cos(), (w * t).sin() / w)
            };
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += c * v[i] * v[j] + s * ov[i] * v[j];
                }
            }
        }
        Ok(Rotation(out))
    }
}

/// Special orthogonal matrix: `R^t R = Id` within [`ORTHO_TOL`] per entry and
/// `det R = +1` within [`DET_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Rotation(Matrix);

impl Rotation {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidMatrix("square"));
        }
        let n = m.rows();
        if m.transpose().mul(&m).max_abs_diff(&Matrix::identity(n)) > ORTHO_TOL {
            return Err(Error::InvalidMatrix("orthogonal"));
        }
        if (m.det() - 1.0).abs() > DET_TOL {
            return Err(Error::InvalidMatrix("of determinant +1"));
        }
        Ok(Rotation(m))
    }

    pub fn identity(n: usize) -> Self {
        Rotation(Matrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn inverse(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0.mul(&other.0))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix) -> Self {
        Rotation(m)
    }
}

/// Hermitian `p x p` matrix `re + i im` with `re` symmetric and `im`
/// antisymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexHermitian {
    re: Matrix,
    im: Matrix,
}

impl ComplexHermitian {
    pub fn new(re: Matrix, im: Matrix) -> Result<Self> {
        if re.rows() != im.rows() || re.cols() != im.cols() {
            return Err(Error::DimensionMismatch {
                expected: re.rows(),
                found: im.rows(),
            });
        }
        let re = SymMatrix::new(re)?.into_matrix();
        let im = AntisymMatrix::new(im)?.into_matrix();
        Ok(ComplexHermitian { re, im })
    }

    pub fn dim(&self) -> usize {
        self.re.rows()
    }

    pub fn re(&self) -> &Matrix {
        &self.re
    }

    pub fn im(&self) -> &Matrix {
        &self.im
    }

    /// The `2p x 2p` real symmetric matrix `[[re, -im], [im, re]]`.
    pub fn real_realization(&self) -> SymMatrix {
        let p = self.dim();
        let m = Matrix::from_fn(2 * p, 2 * p, |i, j| match (i < p, j < p) {
            (true, true) => self.re[(i, j)],
            (true, false) => -self.im[(i, j - p)],
            (false, true) => self.im[(i - p, j)],
            (false, false) => self.re[(i - p, j - p)],
        });
        SymMatrix(m)
    }

    /// Determinant, real for a hermitian matrix. Closed form up to `p = 2`,
    /// product of the eigenvalues above that.
    pub fn det(&self) -> Result<f64> {
        match self.dim() {
            1 => Ok(self.re[(0, 0)]),
            2 => {
                let (a, d) = (self.re[(0, 0)], self.re[(1, 1)]);
                let (x, y) = (self.re[(0, 1)], self.im[(0, 1)]);
                Ok(a * d - x * x - y * y)
            }
            _ => Ok(eigen_hermitian(self, DEFAULT_TOL)?.iter().product()),
        }
    }

    pub fn max_abs_diff(&self, other: &ComplexHermitian) -> f64 {
        self.re
            .max_abs_diff(&other.re)
            .max(self.im.max_abs_diff(&other.im))
    }
}

/// True iff `J^2 = -Id` and `J^t J = Id`, both within `tol` per entry.
pub fn is_complex_structure(j: &AntisymMatrix, tol: f64) -> bool {
    let n = j.dim();
    if !n.is_multiple_of(2) {
        return false;
    }
    let m = j.matrix();
    let id = Matrix::identity(n);
    m.mul(m).max_abs_diff(&id.scale(-1.0)) <= tol && m.transpose().mul(m).max_abs_diff(&id) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_is_a_complex_structure() {
        for p in 1..5 {
            let j = AntisymMatrix::new(j0(p)).unwrap();
            assert!(is_complex_structure(&j, 1e-14));
        }
    }

    #[test]
    fn scaled_block_structure_is_not_complex() {
        let j1 = j0(1);
        let omega = Matrix::block_diag(&[&j1.scale(2.0), &j1.scale(1.0)]);
        assert!(!is_complex_structure(
            &AntisymMatrix::new(omega).unwrap(),
            1e-10
        ));
    }

    #[test]
    fn sym_construction_symmetrizes_exactly() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.0 + 1e-13, 5.0]]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.matrix()[(0, 1)], s.matrix()[(1, 0)]);
    }

    #[test]
    fn rotation_rejects_reflection() {
        let m = Matrix::from_diag(&[1.0, -1.0]);
        assert!(Rotation::new(m).is_err());
        assert!(Rotation::new(Matrix::identity(3)).is_ok());
    }

    #[test]
    fn det_and_solve() {
        let m = Matrix::from_rows(&[[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]);
        assert!((m.det() - 18.0).abs() < 1e-12);
        let x = m.solve(&[3.0, 5.0, 5.0], 1e-14).unwrap();
        for (a, b) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let singular = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(singular.solve(&[1.0, 1.0], 1e-12).is_none());
    }

    #[test]
    fn exp_of_planar_generator_is_rotation_by_angle() {
        let omega = AntisymMatrix::new(j0(1).scale(0.7)).unwrap();
        let r = omega.exp(1.3).unwrap();
        let (c, s) = ((0.7f64 * 1.3).cos(), (0.7f64 * 1.3).sin());
        let expect = Matrix::from_rows(&[[c, -s], [s, c]]);
        assert!(r.matrix().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn exp_is_periodic_for_complex_structure() {
        let w = 2.5;
        let omega = AntisymMatrix::new(j0(2).scale(w)).unwrap();
        let r = omega.exp(2.0 * std::f64::consts::PI / w).unwrap();
        assert!(r.matrix().max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn exp_matches_taylor_series() {
        let m = Matrix::from_rows(&[
            [0.0, 0.3, -0.2, 0.1],
            [-0.3, 0.0, 0.5, -0.4],
            [0.2, -0.5, 0.0, 0.25],
            [-0.1, 0.4, -0.25, 0.0],
        ]);
        let omega = AntisymMatrix::new(m.clone()).unwrap();
        let t = 0.9;
        let mut term = Matrix::identity(4);
        let mut sum = Matrix::identity(4);
        for k in 1..40 {
            term = term.mul(&m).scale(t / k as f64);
            sum = sum.add(&term);
        }
        let r = omega.exp(t).unwrap();
        assert!(r.matrix().max_abs_diff(&sum) < 1e-13);
        assert!(Rotation::new(r.into_matrix()).is_ok());
    }

    #[test]
    fn hermitian_det_closed_form() {
        let h = ComplexHermitian::new(
            Matrix::from_rows(&[[3.0, 1.0], [1.0, 2.0]]),
            Matrix::from_rows(&[[0.0, 0.5], [-0.5, 0.0]]),
        )
        .unwrap();
        assert!((h.det().unwrap() - (6.0 - 1.0 - 0.25)).abs() < 1e-14);
    }
}
