//! Dense exact linear algebra over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Output of [`QMatrix::rref`].
#[derive(Clone, Debug, PartialEq)]
pub struct Echelon {
    pub reduced: QMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integers; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| scalar::int(x)).collect()).collect())
            .expect("rectangular integer matrix")
    }

    pub fn from_columns(cols: &[Vec<Scalar>], rows: usize) -> Self {
        let mut m = QMatrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("{} columns, vector of {}", self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::DimensionMismatch("vstack column counts".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(QMatrix {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let x = &m[(r, j)] * &inv;
                m[(r, j)] = x;
            }
            let pivot_row: Vec<(usize, Scalar)> = (c..m.cols)
                .filter(|&j| !m[(r, j)].is_zero())
                .map(|j| (j, m[(r, j)].clone()))
                .collect();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for (j, x) in &pivot_row {
                    let y = &m[(i, *j)] - &factor * x;
                    m[(i, *j)] = y;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            reduced: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let Echelon { reduced, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -reduced[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some `x` with `A x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("{} rows, right side of {}", self.rows, b.len())));
        }
        let mut augmented = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                augmented[(i, j)] = self[(i, j)].clone();
            }
            augmented[(i, self.cols)] = b[i].clone();
        }
        let Echelon { reduced, pivots, .. } = augmented.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = reduced[(row, self.cols)].clone();
        }
        Ok(Some(x))
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..m.rows {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] / &pivot;
                for j in c..m.cols {
                    let y = &m[(i, j)] - &factor * &m[(c, j)];
                    m[(i, j)] = y;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut augmented = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                augmented[(i, j)] = self[(i, j)].clone();
            }
            augmented[(i, n + i)] = Scalar::one();
        }
        let Echelon { reduced, pivots, .. } = augmented.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = reduced[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Coefficients `[c_0, ..., c_n]` of `det(x I - A)`, lowest degree first
    /// (Faddeev-LeVerrier; exact in characteristic zero).
    pub fn charpoly(&self) -> Result<Vec<Scalar>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("characteristic polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut m = QMatrix::zeros(n, n);
        for k in 1..=n {
            let mut next = self.try_mul(&m)?;
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self.try_mul(&m)?;
            let trace = (0..n).fold(Scalar::zero(), |acc, i| acc + &am[(i, i)]);
            coeffs[n - k] = -trace / scalar::int(k as i64);
        }
        Ok(coeffs)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimensions");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimensions");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(scalar::format_scalar).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Matrices serialize as nested arrays of rational strings.
impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(scalar::format_scalar).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| scalar::parse_scalar(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        QMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn identity_is_reduced() {
        let e = QMatrix::identity(3).rref();
        assert_eq!(e.reduced, QMatrix::identity(3));
        assert_eq!(e.rank, 3);
    }

    #[test]
    fn rank_one() {
        let e = QMatrix::from_ints(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(e.reduced, QMatrix::from_ints(&[&[1, 2], &[0, 0]]));
        assert_eq!(e.rank, 1);
        assert_eq!(e.pivots, vec![0]);
    }

    #[test]
    fn kernel_of_zero_map() {
        assert_eq!(QMatrix::zeros(2, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn solve_identity() {
        let b = vec![int(1), int(-2), int(5)];
        assert_eq!(QMatrix::identity(3).solve(&b).unwrap(), Some(b));
    }

    #[test]
    fn solve_inconsistent() {
        let a = QMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert_eq!(a.solve(&[int(1), int(2)]).unwrap(), None);
        assert!(a.solve(&[int(1)]).is_err());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = QMatrix::from_ints(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.determinant().unwrap(), int(1));
        assert_eq!(&a * &a.inverse().unwrap(), QMatrix::identity(2));
        assert!(QMatrix::from_ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn charpoly_of_companion() {
        // x^2 - 3x + 2
        let a = QMatrix::from_ints(&[&[1, 0], &[5, 2]]);
        assert_eq!(a.charpoly().unwrap(), vec![int(2), int(-3), int(1)]);
    }
}
