//! Dense rational matrices with exact elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{common_denominator, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds from row vectors; all rows must share the given column count.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Rational] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Rational]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = x.clone();
        }
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| super::rational::dot(self.row(i), v)).collect()
    }

    /// Left product `vᵀ M`.
    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.rows, v.len(), "vector-matrix shape mismatch");
        let mut out = vec![Rational::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = &self[(i, j)];
                if !m.is_zero() {
                    *o += x * m;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_rows(self.cols, idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    /// Keeps the listed columns, in order.
    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let rows = (0..self.rows).map(|i| idx.iter().map(|&j| self[(i, j)].clone()).collect()).collect();
        Matrix::from_rows(idx.len(), rows)
    }

    /// Zeroes every row not in `keep` (the product `D_S M` for a diagonal selector).
    pub fn mask_rows(&self, keep: &[bool]) -> Matrix {
        let mut out = self.clone();
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                for x in out.row_mut(i) {
                    *x = Rational::zero();
                }
            }
        }
        out
    }

    /// Zeroes every column not in `keep` (the product `M D_S`).
    pub fn mask_cols(&self, keep: &[bool]) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, &k) in keep.iter().enumerate() {
                if !k {
                    out[(i, j)] = Rational::zero();
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Exact rank by fraction-free (Bareiss) elimination on the integer-scaled rows.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let den = Rational::from_integer(common_denominator(row));
                row.iter().map(|x| (x * &den).to_integer()).collect()
            })
            .collect();
        bareiss_rank(&mut m, self.cols)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for x in m.row_mut(r) {
                *x *= &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let delta = &f * &m[(r, j)];
                        if !delta.is_zero() {
                            m[(i, j)] -= delta;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `M x = rhs`, or `None` when inconsistent.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = rhs[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }

    /// Stacks rows of `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(super::rational::to_f64).collect()).collect()
    }
}

/// Bareiss elimination; `m` is consumed as scratch space.
fn bareiss_rank(m: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, rank);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = &m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            self.rows_vec().iter().map(|r| r.iter().map(super::rational::format_rational).collect()).collect();
        write!(f, "{rows:?}")
    }
}
