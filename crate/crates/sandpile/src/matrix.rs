//! Dense exact integer matrices.
//!
//! Everything here is generic over the scalar via [`Scalar`], which any
//! signed num-traits integer (i64, i128, BigInt, ...) satisfies.  The
//! crate root fixes `Int = BigInt` aliases for the common case.
//! Algorithms are fraction-free: Bareiss elimination for determinants
//! and ranks, integer column reduction for Hermite form, and full
//! row/column reduction with unimodular transforms for Smith form.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_integer::Integer;
use num_traits::Signed;

use crate::error::{Error, Result};

/// Scalar bound for exact matrix arithmetic.
pub trait Scalar: Integer + Signed + Clone + fmt::Debug + fmt::Display {}
impl<T> Scalar for T where T: Integer + Signed + Clone + fmt::Debug + fmt::Display {}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let data = (0..rows * cols).map(|_| T::zero()).collect();
        Matrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut m = self.clone();
        let mut prev = T::one();
        let mut negate = false;
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        negate = !negate;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[(k, k)].clone() * m[(i, j)].clone()
                        - m[(i, k)].clone() * m[(k, j)].clone();
                    m[(i, j)] = num / prev.clone();
                }
                m[(i, k)] = T::zero();
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    /// Rank over the rationals, computed fraction-free.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut prev = T::one();
        let mut r = 0usize;
        let mut pivot_col = 0usize;
        while r < m.rows && pivot_col < m.cols {
            let pivot = (r..m.rows).find(|&i| !m[(i, pivot_col)].is_zero());
            let Some(i) = pivot else {
                pivot_col += 1;
                continue;
            };
            m.swap_rows(r, i);
            for i2 in r + 1..m.rows {
                for j in pivot_col + 1..m.cols {
                    let num = m[(r, pivot_col)].clone() * m[(i2, j)].clone()
                        - m[(i2, pivot_col)].clone() * m[(r, j)].clone();
                    m[(i2, j)] = num / prev.clone();
                }
                m[(i2, pivot_col)] = T::zero();
            }
            prev = m[(r, pivot_col)].clone();
            r += 1;
            pivot_col += 1;
        }
        r
    }

    /// Column-style Hermite normal form.
    ///
    /// Returns the canonical form together with the pivot rows, one per
    /// nonzero column.  Column j has its first nonzero entry (positive)
    /// in row `pivots[j]`, zero columns are dropped, and entries of a
    /// pivot row in earlier columns are reduced into `[0, pivot)`.  Two
    /// integer matrices span the same column lattice iff their Hermite
    /// forms are identical.
    pub fn hermite(&self) -> (Matrix<T>, Vec<usize>) {
        let mut h = self.clone();
        let mut pivots = Vec::new();
        let mut pc = 0usize; // next pivot column
        for r in 0..h.rows {
            // Repeatedly knock entries in row r (columns >= pc) against
            // each other until at most one survives.
            loop {
                let nz: Vec<usize> = (pc..h.cols).filter(|&j| !h[(r, j)].is_zero()).collect();
                if nz.is_empty() {
                    break;
                }
                let &best = nz
                    .iter()
                    .min_by_key(|&&j| h[(r, j)].abs())
                    .expect("nonempty");
                h.swap_cols(pc, best);
                if nz.len() == 1 {
                    break;
                }
                for j in pc + 1..h.cols {
                    if h[(r, j)].is_zero() {
                        continue;
                    }
                    let q = h[(r, j)].clone() / h[(r, pc)].clone();
                    if !q.is_zero() {
                        for i in 0..h.rows {
                            let sub = q.clone() * h[(i, pc)].clone();
                            h[(i, j)] = h[(i, j)].clone() - sub;
                        }
                    } else {
                        // |h[r][j]| < |h[r][pc]| can't happen since pc
                        // holds the minimum, but remainders of equal
                        // magnitude and opposite sign can: fold them.
                        for i in 0..h.rows {
                            let add = h[(i, pc)].clone();
                            h[(i, j)] = h[(i, j)].clone() + add;
                        }
                    }
                }
                if (pc + 1..h.cols).all(|j| h[(r, j)].is_zero()) {
                    break;
                }
            }
            if !h[(r, pc)].is_zero() {
                if h[(r, pc)].is_negative() {
                    for i in 0..h.rows {
                        h[(i, pc)] = -h[(i, pc)].clone();
                    }
                }
                // Normalize this row in the earlier pivot columns.
                for j in 0..pc {
                    let q = h[(r, j)].div_floor(&h[(r, pc)]);
                    if !q.is_zero() {
                        for i in 0..h.rows {
                            let sub = q.clone() * h[(i, pc)].clone();
                            h[(i, j)] = h[(i, j)].clone() - sub;
                        }
                    }
                }
                pivots.push(r);
                pc += 1;
                if pc == h.cols {
                    break;
                }
            }
        }
        // Drop trailing zero columns.
        let trimmed = Matrix::from_fn(h.rows, pc, |i, j| h[(i, j)].clone());
        (trimmed, pivots)
    }

    /// Smith normal form with transforms: returns (u, d, v) with
    /// `u * self * v = d`, u and v unimodular, d diagonal with
    /// nonnegative entries each dividing the next.
    pub fn smith(&self) -> (Matrix<T>, Matrix<T>, Matrix<T>) {
        let mut a = self.clone();
        let mut u: Matrix<T> = Matrix::identity(self.rows);
        let mut v: Matrix<T> = Matrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        for t in 0..n {
            'pivot: loop {
                // Minimal nonzero entry of the trailing submatrix.
                let mut best: Option<(usize, usize)> = None;
                for i in t..a.rows {
                    for j in t..a.cols {
                        if a[(i, j)].is_zero() {
                            continue;
                        }
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => a[(i, j)].abs() < a[(bi, bj)].abs(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = best else {
                    break 'pivot;
                };
                a.swap_rows(t, pi);
                u.swap_rows(t, pi);
                a.swap_cols(t, pj);
                v.swap_cols(t, pj);

                let mut dirty = false;
                for i in t + 1..a.rows {
                    if a[(i, t)].is_zero() {
                        continue;
                    }
                    let q = a[(i, t)].clone() / a[(t, t)].clone();
                    for j in 0..a.cols {
                        let sub = q.clone() * a[(t, j)].clone();
                        a[(i, j)] = a[(i, j)].clone() - sub;
                    }
                    for j in 0..u.cols {
                        let sub = q.clone() * u[(t, j)].clone();
                        u[(i, j)] = u[(i, j)].clone() - sub;
                    }
                    if !a[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..a.cols {
                    if a[(t, j)].is_zero() {
                        continue;
                    }
                    let q = a[(t, j)].clone() / a[(t, t)].clone();
                    for i in 0..a.rows {
                        let sub = q.clone() * a[(i, t)].clone();
                        a[(i, j)] = a[(i, j)].clone() - sub;
                    }
                    for i in 0..v.rows {
                        let sub = q.clone() * v[(i, t)].clone();
                        v[(i, j)] = v[(i, j)].clone() - sub;
                    }
                    if !a[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    continue 'pivot;
                }
                // Row and column are clear; enforce divisibility.
                let mut fixed = true;
                'div: for i in t + 1..a.rows {
                    for j in t + 1..a.cols {
                        if !a[(i, j)].clone().mod_floor(&a[(t, t)]).is_zero() {
                            // Fold row i into row t and restart.
                            for jj in 0..a.cols {
                                let add = a[(i, jj)].clone();
                                a[(t, jj)] = a[(t, jj)].clone() + add;
                            }
                            for jj in 0..u.cols {
                                let add = u[(i, jj)].clone();
                                u[(t, jj)] = u[(t, jj)].clone() + add;
                            }
                            fixed = false;
                            break 'div;
                        }
                    }
                }
                if fixed {
                    if a[(t, t)].is_negative() {
                        for j in 0..a.cols {
                            a[(t, j)] = -a[(t, j)].clone();
                        }
                        for j in 0..u.cols {
                            u[(t, j)] = -u[(t, j)].clone();
                        }
                    }
                    break 'pivot;
                }
            }
        }
        (u, a, v)
    }
}

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(
                f,
                "[{}]",
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        Ok(())
    }
}

impl Matrix<crate::Int> {
    /// Convenience constructor from machine integers.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::Int::from(x)).collect())
                .collect(),
        )
    }
}

/// An integer lattice given by generators (columns of a matrix), in a
/// form supporting fast membership tests.
pub struct Lattice<T> {
    hermite: Matrix<T>,
    pivots: Vec<usize>,
    ambient_dim: usize,
}

impl<T: Scalar> Lattice<T> {
    /// Lattice spanned by the columns of `generators`.
    pub fn from_columns(generators: &Matrix<T>) -> Self {
        let (hermite, pivots) = generators.hermite();
        Lattice {
            ambient_dim: generators.rows(),
            hermite,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Does `v` lie in the lattice?
    pub fn contains(&self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.ambient_dim, "dimension mismatch");
        let mut w: Vec<T> = v.to_vec();
        for (j, &r) in self.pivots.iter().enumerate() {
            let p = &self.hermite[(r, j)];
            let (q, rem) = w[r].div_rem(p);
            if !rem.is_zero() {
                return false;
            }
            if !q.is_zero() {
                for i in 0..self.ambient_dim {
                    let sub = q.clone() * self.hermite[(i, j)].clone();
                    w[i] = w[i].clone() - sub;
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn hermite_matrix(&self) -> &Matrix<T> {
        &self.hermite
    }
}

/// Parse a whitespace separated integer matrix, one row per line.
pub fn parse_matrix(text: &str) -> Result<Matrix<crate::Int>> {
    let mut rows: Vec<Vec<crate::Int>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<crate::Int> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<crate::Int>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("not an integer: {tok:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "rows have differing lengths".into(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid("empty matrix"));
    }
    Ok(Matrix::from_rows(rows))
}
