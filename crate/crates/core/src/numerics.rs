//! Small dense linear algebra: the spectral quantities the convergence
//! analysis consumes, plus the linear solves used by the inner solvers.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative threshold below which `λ_min(GGᵀ)` is treated as rank deficiency.
pub const RANK_TOLERANCE: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Dense column vector.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Matrix<T> {
    /// Builds a matrix from row-major entries. Rejects empty shapes and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix shape {rows}x{cols} is empty"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `A v`
    pub fn mul_vec(&self, v: &[T]) -> Vector<T> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `Aᵀ v`
    pub fn tr_mul_vec(&self, v: &[T]) -> Vector<T> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Vector(out)
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `A Aᵀ`
    pub fn gram(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let v = dot(self.row(i), self.row(j));
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    /// Rows selected by `idx`, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix<T> {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn scaled(&self, s: T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self
            .data
            .iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
            .max(T::one());
        let tol = T::of(1e3) * T::epsilon() * scale;
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Vector<T> {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![T::zero(); n])
    }

    pub fn from_f64(values: &[f64]) -> Self {
        values.iter().map(|&v| T::of(v)).collect()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    pub fn dot(&self, other: &[T]) -> T {
        dot(&self.0, other)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: T) -> Vector<T> {
        self.0.iter().map(|&v| v * s).collect()
    }

    /// `self + a * x`
    pub fn axpy(&self, a: T, x: &[T]) -> Vector<T> {
        debug_assert_eq!(self.len(), x.len());
        self.0.iter().zip(x).map(|(&s, &xi)| s + a * xi).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.as_f64()).collect()
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Vector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for Vector<T> {
    fn from(v: Vec<T>) -> Self {
        Vector(v)
    }
}

impl<T> FromIterator<T> for Vector<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

impl<T: Scalar> std::ops::Sub<&[T]> for &Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: &[T]) -> Vector<T> {
        sub(&self.0, rhs)
    }
}

impl<T: Scalar> std::ops::Add<&[T]> for &Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: &[T]) -> Vector<T> {
        debug_assert_eq!(self.len(), rhs.len());
        self.0.iter().zip(rhs).map(|(&a, &b)| a + b).collect()
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vector<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Euclidean distance.
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Componentwise `max(v, 0)`.
pub fn project_nonneg<T: Scalar>(v: &[T]) -> Vector<T> {
    v.iter().map(|&x| x.max(T::zero())).collect()
}

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// 1×1 and 2×2 use the closed form; larger matrices use cyclic Jacobi
/// rotations until the off-diagonal mass is at round-off level.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_finite() {
        return Err(Error::invalid("non-finite matrix entries"));
    }
    if !a.is_symmetric() {
        return Err(Error::invalid("matrix is not symmetric"));
    }
    let n = a.rows();
    let mut eig = match n {
        1 => vec![a[(0, 0)]],
        2 => {
            let half = T::of(0.5);
            let mean = (a[(0, 0)] + a[(1, 1)]) * half;
            let radius = ((a[(0, 0)] - a[(1, 1)]) * half).hypot(a[(0, 1)]);
            vec![mean - radius, mean + radius]
        }
        _ => jacobi_eigenvalues(a),
    };
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

fn jacobi_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    let n = a.rows();
    let mut m = a.clone();
    let total = m.frobenius_norm();
    let threshold = T::epsilon() * total;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

/// Gram matrix on the smaller side: both `GGᵀ` and `GᵀG` share the nonzero
/// spectrum.
fn small_gram<T: Scalar>(g: &Matrix<T>) -> Matrix<T> {
    if g.rows() <= g.cols() {
        g.gram()
    } else {
        g.transpose().gram()
    }
}

/// Largest singular value `‖G‖₂`.
pub fn spectral_norm<T: Scalar>(g: &Matrix<T>) -> Result<T> {
    if !g.is_finite() {
        return Err(Error::invalid("spectral_norm: non-finite entries"));
    }
    let eig = symmetric_eigenvalues(&small_gram(g))?;
    let top = *eig.last().expect("nonempty matrix");
    Ok(top.max(T::zero()).sqrt())
}

/// `λ_min(GGᵀ)` for a wide, full-row-rank `G`.
pub fn min_eig_gram<T: Scalar>(g: &Matrix<T>) -> Result<T> {
    if !g.is_finite() {
        return Err(Error::invalid("min_eig_gram: non-finite entries"));
    }
    if g.rows() > g.cols() {
        return Err(Error::AssumptionViolation {
            assumption: "matrix G has full row rank",
            detail: format!("G is {}x{}; more rows than columns", g.rows(), g.cols()),
        });
    }
    let eig = symmetric_eigenvalues(&g.gram())?;
    let lo = eig[0];
    let hi = *eig.last().expect("nonempty");
    if !(hi > T::zero()) || lo <= T::of(RANK_TOLERANCE) * hi {
        return Err(Error::AssumptionViolation {
            assumption: "matrix G has full row rank",
            detail: format!(
                "λ_min(GGᵀ) = {:e} against λ_max = {:e}",
                lo.as_f64(),
                hi.as_f64()
            ),
        });
    }
    Ok(lo)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vector<T>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::invalid("solve_linear: shape mismatch"));
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m
        .as_slice()
        .iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tiny = scale * T::epsilon() * T::of(n as f64);
    for k in 0..n {
        let (piv, pval) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold(
                (k, T::zero()),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pval <= tiny {
            return Err(Error::invalid("solve_linear: singular system"));
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            rhs.swap(k, piv);
        }
        for i in (k + 1)..n {
            let factor = m[(i, k)] / m[(k, k)];
            if factor.is_zero() {
                continue;
            }
            for j in k..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= factor * mkj;
            }
            let rk = rhs[k];
            rhs[i] -= factor * rk;
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let tail: T = ((k + 1)..n).map(|j| m[(k, j)] * x[j]).sum();
        x[k] = (rhs[k] - tail) / m[(k, k)];
    }
    Ok(Vector(x))
}
