//! Dense matrices over a [`Scalar`] field.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref<S> {
    pub matrix: Matrix<S>,
    pub pivots: Vec<usize>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_col(col: Vec<S>) -> Self {
        Self { rows: col.len(), cols: 1, data: col }
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
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

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * s.clone()).collect(),
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(S, S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a.clone(), b.clone())).collect(),
        }
    }

    /// `[A B]`
    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Self::zeros(self.rows, self.cols + rhs.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..rhs.cols {
                out[(r, self.cols + c)] = rhs[(r, c)].clone();
            }
        }
        out
    }

    /// `[A; B]`
    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Self { rows: self.rows + rhs.rows, cols: self.cols, data }
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_rows(rows.iter().map(|&r| self.row(r).to_vec()).collect())
            .with_cols_if_empty(self.cols)
    }

    /// Keeps the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    fn with_cols_if_empty(mut self, cols: usize) -> Self {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_negligible)
    }

    /// Largest entry in absolute value (as `f64`).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn rank(&self) -> usize {
        S::rank(self)
    }

    pub fn nullspace(&self) -> Vec<Vec<S>> {
        S::nullspace(self)
    }

    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        S::solve(self, b)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(S::to_f64)
    }

    pub fn to_dmatrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)].to_f64())
    }

    /// Matrix commutator `AB - BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    ///
    /// Pivots are the first non-negligible entry in each column; meant for
    /// exact fields.
    pub fn rref(&self) -> Rref<S> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_negligible()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = S::one() / m[(row, col)].clone();
            for c in col..m.cols {
                m[(row, c)] = m[(row, c)].clone() * inv.clone();
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_negligible() {
                    continue;
                }
                let f = m[(r, col)].clone();
                for c in col..m.cols {
                    let v = m[(row, c)].clone();
                    if !v.is_zero() {
                        m[(r, c)] = m[(r, c)].clone() - f.clone() * v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
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

impl<S: Scalar> Rref<S> {
    /// Null space basis read off the echelon form; one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let n = self.matrix.cols();
        let free: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); n];
                v[f] = S::one();
                for (row, &pc) in self.pivots.iter().enumerate() {
                    v[pc] = -self.matrix[(row, f)].clone();
                }
                v
            })
            .collect()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

/// Dimension of a subspace spanned by the given vectors.
pub fn span_dim<S: Scalar>(dim: usize, vectors: &[Vec<S>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_cols(dim, vectors).rank()
}

/// A basis of the span of the given vectors (a maximal independent subset).
pub fn independent_subset<S: Scalar>(dim: usize, vectors: &[Vec<S>]) -> Vec<Vec<S>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let r = Matrix::from_cols(dim, vectors).rref();
    r.pivots.iter().map(|&c| vectors[c].clone()).collect()
}
