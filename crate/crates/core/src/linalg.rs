//! Small dense linear algebra over [`Real`].
//!
//! Matrices here are at most `(n+2) × (n+2)` for the dimensions we care
//! about, so everything is a plain row-major `Vec` and the algorithms are the
//! textbook ones (partial pivoting LU, reduced row echelon form).

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<T>>", try_from = "Vec<Vec<T>>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows; returns `None` for ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| cols[j][i])
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[T]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn sup_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.sub(rhs).sup_norm()
    }

    /// Determinant by partial-pivoting elimination.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[(x, col)].abs().partial_cmp(&a[(y, col)].abs()).unwrap())
                .unwrap_or(col);
            if a[(piv, col)] == T::zero() {
                return T::zero();
            }
            if piv != col {
                a.swap_rows(piv, col);
                det = -det;
            }
            let p = a[(col, col)];
            det = det * p;
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                if f != T::zero() {
                    for c in col..n {
                        let v = a[(col, c)];
                        a[(r, c)] = a[(r, c)] - f * v;
                    }
                }
            }
        }
        det
    }

    /// Solves `self · x = b`. Returns `None` when a pivot falls below the
    /// relative pivot tolerance.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let sol = self.solve_many(&Matrix::from_columns(&[b.to_vec()]))?;
        Some(sol.column(0))
    }

    /// Solves `self · X = B` for a matrix right-hand side.
    pub fn solve_many(&self, b: &Self) -> Option<Self> {
        assert!(self.is_square() && b.rows == self.rows);
        let n = self.rows;
        let scale = self.sup_norm().max(T::min_positive_value());
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&p, &q| a[(p, col)].abs().partial_cmp(&a[(q, col)].abs()).unwrap())
                .unwrap_or(col);
            if a[(piv, col)].abs() <= T::pivot_tol() * scale {
                return None;
            }
            a.swap_rows(piv, col);
            x.swap_rows(piv, col);
            let p = a[(col, col)];
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)] / p;
                if f == T::zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[(col, c)];
                    a[(r, c)] = a[(r, c)] - f * v;
                }
                for c in 0..x.cols {
                    let v = x[(col, c)];
                    x[(r, c)] = x[(r, c)] - f * v;
                }
            }
        }
        for r in 0..n {
            let p = a[(r, r)];
            for c in 0..x.cols {
                x[(r, c)] = x[(r, c)] / p;
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.solve_many(&Self::identity(self.rows))
    }

    /// Orthonormal basis (Euclidean) of the null space, computed from the
    /// reduced row echelon form. Also returns the numerical rank.
    pub fn null_space(&self, tol: T) -> (usize, Vec<Vec<T>>) {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let scale = self.sup_norm().max(T::min_positive_value());
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let piv =
                (row..m).max_by(|&p, &q| a[(p, col)].abs().partial_cmp(&a[(q, col)].abs()).unwrap()).unwrap();
            if a[(piv, col)].abs() <= tol * scale {
                continue;
            }
            a.swap_rows(piv, row);
            let p = a[(row, col)];
            for c in 0..n {
                a[(row, c)] = a[(row, c)] / p;
            }
            for r in 0..m {
                if r != row {
                    let f = a[(r, col)];
                    if f != T::zero() {
                        for c in 0..n {
                            let v = a[(row, c)];
                            a[(r, c)] = a[(r, c)] - f * v;
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rank = pivots.len();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut basis: Vec<Vec<T>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![T::zero(); n];
                v[f] = T::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[(r, f)];
                }
                v
            })
            .collect();
        gram_schmidt(&mut basis);
        (rank, basis)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> From<Matrix<T>> for Vec<Vec<T>> {
    fn from(m: Matrix<T>) -> Self {
        m.to_rows()
    }
}

impl<T: Real> TryFrom<Vec<Vec<T>>> for Matrix<T> {
    type Error = String;
    fn try_from(rows: Vec<Vec<T>>) -> Result<Self, String> {
        Matrix::from_rows(&rows).ok_or_else(|| "ragged matrix rows".to_string())
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scaled<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += s · x`
pub fn axpy<T: Real>(y: &mut [T], s: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

pub fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    norm(&sub(a, b))
}

/// Modified Gram–Schmidt in place; vectors that collapse are dropped.
pub fn gram_schmidt<T: Real>(vs: &mut Vec<Vec<T>>) {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(vs.len());
    for v in vs.drain(..) {
        let mut w = v;
        for u in &out {
            let c = dot(&w, u);
            axpy(&mut w, -c, u);
        }
        let nw = norm(&w);
        if nw > T::pivot_tol() {
            out.push(scaled(&w, T::one() / nw));
        }
    }
    *vs = out;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_inverse_agree() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]).unwrap();
        assert!((m.determinant() - 18.0_f64).abs() < 1e-12);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).max_abs_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn singular_solve_is_none() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(m.solve(&[1.0, 1.0]).is_none());
        assert_eq!(m.determinant(), 0.0);
    }

    #[test]
    fn null_space_is_orthogonal_to_rows() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0, 0.0, -1.0], vec![-1.0, 0.0, 0.0, -1.0]]).unwrap();
        let (rank, ns) = m.null_space(1e-12);
        assert_eq!(rank, 2);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x: &f64| x.abs() < 1e-14));
        }
    }

    #[test]
    fn json_is_row_major() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        let back: Matrix<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix<f64>>("[[1.0],[2.0,3.0]]").is_err());
    }
}
