//! Matrices with entries in the Weyl algebra.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::parse::parse_weyl;
use crate::weyl::WeylElement;

#[derive(Clone, PartialEq, Eq)]
pub struct WeylMatrix {
    rows: usize,
    cols: usize,
    data: Vec<WeylElement>,
}

impl WeylMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        WeylMatrix {
            rows,
            cols,
            data: vec![WeylElement::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = WeylMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = WeylElement::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<WeylElement>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(WeylMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn parse_rows(rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_weyl(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        WeylMatrix::from_rows(parsed)
    }

    pub fn scalar(element: WeylElement) -> Self {
        WeylMatrix {
            rows: 1,
            cols: 1,
            data: vec![element],
        }
    }

    pub fn from_qmatrix(m: &QMatrix) -> Self {
        WeylMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.entries().iter().map(|x| WeylElement::constant(x.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(WeylElement::is_zero)
    }

    pub fn entries(&self) -> &[WeylElement] {
        &self.data
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect()
    }

    /// Largest Bernstein degree of an entry; `None` for the zero matrix.
    pub fn degree(&self) -> Option<u32> {
        self.data.iter().filter_map(WeylElement::bernstein_degree).max()
    }

    pub fn block_diagonal(blocks: &[WeylMatrix]) -> WeylMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = WeylMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> WeylMatrix {
        let mut out = WeylMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for WeylMatrix {
    type Output = WeylElement;
    fn index(&self, (i, j): (usize, usize)) -> &WeylElement {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for WeylMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut WeylElement {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &WeylMatrix {
    type Output = WeylMatrix;
    fn mul(self, rhs: &WeylMatrix) -> WeylMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimensions");
        let mut out = WeylMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl Add for &WeylMatrix {
    type Output = WeylMatrix;
    fn add(self, rhs: &WeylMatrix) -> WeylMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimensions");
        WeylMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &WeylMatrix {
    type Output = WeylMatrix;
    fn sub(self, rhs: &WeylMatrix) -> WeylMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimensions");
        WeylMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for WeylMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

impl Serialize for WeylMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        WeylMatrix::parse_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Weyl elements serialize as their canonical text.
pub mod element_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &WeylElement, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<WeylElement, D::Error> {
        let text = String::deserialize(d)?;
        parse_weyl(&text).map_err(serde::de::Error::custom)
    }
}
