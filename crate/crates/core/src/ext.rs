//! Ext groups between cyclic modules from their length-one free resolutions.
//!
//! For `0 <- D/Dp <- D <-(.p) D <- 0` the Yoneda complex into `D/Dq` is
//! `D/Dq -> D/Dq`, `r |-> p r` (the sign of the differential is taken as +1;
//! dimensions do not depend on it). Hence `Ext^0` is the hom space and
//! `Ext^1(D/Dp, D/Dq) = D/(pD + Dq)`, with cochains represented by normal
//! forms modulo `Dq`.

use serde::Serialize;

use crate::dmatrix::WeylMatrix;
use crate::dmod::{stabilization_point, standard_monomials, CyclicModule};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::scalar;
use crate::weyl::{Monomial, WeylElement};

/// A finite free resolution, differentials listed from degree 1 upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeResolution {
    pub differentials: Vec<WeylMatrix>,
}

impl FreeResolution {
    /// `0 <- D/Dp <- D <-(.p) D <- 0`.
    pub fn cyclic(p: &WeylElement) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Invalid("cannot resolve D/D0 with a length-one resolution".into()));
        }
        Ok(FreeResolution {
            differentials: vec![WeylMatrix::scalar(p.clone())],
        })
    }

    pub fn length(&self) -> usize {
        self.differentials.len()
    }

    pub fn generator(&self) -> Result<&WeylElement> {
        match self.differentials.as_slice() {
            [m] if m.rows() == 1 && m.cols() == 1 => Ok(&m[(0, 0)]),
            _ => Err(Error::UnsupportedResolution),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ext1 {
    pub dim: usize,
    #[serde(serialize_with = "serialize_elements")]
    pub representatives: Vec<WeylElement>,
    pub dims_by_degree: Vec<usize>,
    pub stabilized_at: Option<usize>,
}

fn serialize_elements<S: serde::Serializer>(v: &[WeylElement], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e.to_string()))
}

/// `d(n)`: the dimension of the degree-`<= n` standard monomials modulo the
/// part of the coboundary image `p * std(2n)` that lands inside them, plus
/// monomial representatives of a complement.
fn truncated_ext1(p: &WeylElement, q: &WeylElement, n: usize) -> (usize, Vec<Monomial>) {
    let low = standard_monomials(q, n);
    let images: Vec<WeylElement> = standard_monomials(q, 2 * n)
        .into_iter()
        .map(|m| (p * &WeylElement::monomial(scalar::one(), m)).reduce_mod(q))
        .collect();
    // coordinates: low monomials first (descending), then everything else
    let mut coords: Vec<Monomial> = low.iter().rev().copied().collect();
    let mut high: Vec<Monomial> = images
        .iter()
        .flat_map(|e| e.terms().map(|(m, _)| *m).collect::<Vec<_>>())
        .filter(|m| m.degree() as usize > n)
        .collect();
    high.sort();
    high.dedup();
    coords.extend(high.iter().copied());
    let position = |m: &Monomial| coords.iter().position(|c| c == m).expect("coordinate");
    let split = low.len();
    let mut high_part = QMatrix::zeros(coords.len() - split, images.len());
    let mut low_part = QMatrix::zeros(split, images.len());
    for (j, e) in images.iter().enumerate() {
        for (m, x) in e.terms() {
            let k = position(m);
            if k < split {
                low_part[(k, j)] = x.clone();
            } else {
                high_part[(k - split, j)] = x.clone();
            }
        }
    }
    // combinations of images with no high part span the intersection
    let combos = if high_part.rows() == 0 {
        QMatrix::identity(images.len()).to_rows()
    } else {
        high_part.kernel_basis()
    };
    let inside: Vec<Vec<scalar::Scalar>> = combos
        .iter()
        .map(|x| low_part.mul_vec(x).expect("shape"))
        .collect();
    let echelon = if inside.is_empty() || split == 0 {
        QMatrix::zeros(0, split).rref()
    } else {
        QMatrix::from_rows(inside).expect("rectangular").rref()
    };
    let reps: Vec<Monomial> = (0..split)
        .filter(|c| !echelon.pivots.contains(c))
        .map(|c| coords[c])
        .rev()
        .collect();
    (split - echelon.rank, reps)
}

/// `dim Ext^1(D/Dp, D/Dq)` computed at truncation degrees `0..=n`; the
/// reported dimension and representatives are those at degree `n`.
pub fn ext1_dim(p: &WeylElement, q: &WeylElement, n: usize) -> Result<Ext1> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Invalid("Ext needs nonzero generators".into()));
    }
    let dims_by_degree: Vec<usize> = (0..=n).map(|k| truncated_ext1(p, q, k).0).collect();
    let (dim, reps) = truncated_ext1(p, q, n);
    Ok(Ext1 {
        dim,
        representatives: reps.into_iter().map(|m| WeylElement::monomial(scalar::one(), m)).collect(),
        stabilized_at: stabilization_point(&dims_by_degree),
        dims_by_degree,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ext2 {
    pub dim: usize,
    pub reason: &'static str,
}

/// `Ext^2` between modules with length-one resolutions vanishes because the
/// Yoneda complex has no degree-2 cochains.
pub fn ext2_dim(source: &FreeResolution, target: &FreeResolution) -> Result<Ext2> {
    if source.length() > 1 || target.length() > 1 {
        return Err(Error::UnsupportedResolution);
    }
    Ok(Ext2 {
        dim: 0,
        reason: "the Yoneda complex has no cochains in degree 2 for length-one resolutions",
    })
}

/// Ext tables for a family of cyclic modules: `ext1[i][j] = dim Ext^1(M_j, M_i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtTable {
    pub ext1: Vec<Vec<usize>>,
    pub ext2: Vec<Vec<usize>>,
    pub stabilized_at: usize,
    #[serde(skip)]
    pub representatives: Vec<Vec<Vec<WeylElement>>>,
}

pub fn ext_table(family: &[CyclicModule], n: usize) -> Result<ExtTable> {
    let k = family.len();
    let mut ext1 = vec![vec![0; k]; k];
    let mut ext2 = vec![vec![0; k]; k];
    let mut representatives = vec![vec![Vec::new(); k]; k];
    let mut stabilized_at = 0;
    for i in 0..k {
        for j in 0..k {
            let (rj, ri) = (FreeResolution::cyclic(&family[j].p)?, FreeResolution::cyclic(&family[i].p)?);
            let e = ext1_dim(rj.generator()?, ri.generator()?, n)?;
            let at = e.stabilized_at.ok_or(Error::NotStabilized {
                max_degree: n,
                last: e.dim,
            })?;
            stabilized_at = stabilized_at.max(at);
            ext1[i][j] = e.dim;
            representatives[i][j] = e.representatives;
            ext2[i][j] = ext2_dim(&rj, &ri)?.dim;
        }
    }
    Ok(ExtTable {
        ext1,
        ext2,
        stabilized_at,
        representatives,
    })
}

/// The family `{D/Dd, D/Dt}`.
pub fn standard_family() -> Vec<CyclicModule> {
    vec![
        CyclicModule::new(WeylElement::d()).expect("nonzero"),
        CyclicModule::new(WeylElement::t()).expect("nonzero"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_weyl;

    fn w(s: &str) -> WeylElement {
        parse_weyl(s).unwrap()
    }

    #[test]
    fn pairwise_dimensions() {
        assert_eq!(ext1_dim(&w("d"), &w("t"), 6).unwrap().dim, 1);
        assert_eq!(ext1_dim(&w("d"), &w("d"), 6).unwrap().dim, 0);
        assert_eq!(ext1_dim(&w("t"), &w("d"), 6).unwrap().dim, 1);
        assert_eq!(ext1_dim(&w("t"), &w("t"), 6).unwrap().dim, 0);
    }

    #[test]
    fn representative_is_one() {
        let e = ext1_dim(&w("d"), &w("t"), 5).unwrap();
        assert_eq!(e.representatives, vec![WeylElement::one()]);
    }

    #[test]
    fn ext2_vanishes() {
        let r = FreeResolution::cyclic(&w("d")).unwrap();
        assert_eq!(ext2_dim(&r, &r).unwrap().dim, 0);
        let long = FreeResolution {
            differentials: vec![WeylMatrix::identity(1), WeylMatrix::identity(1)],
        };
        assert_eq!(ext2_dim(&long, &r), Err(Error::UnsupportedResolution));
    }

    #[test]
    fn table_json() {
        let table = ext_table(&standard_family(), 8).unwrap();
        let json = serde_json::to_string(&table).unwrap();
        assert_eq!(json, format!(r#"{{"ext1":[[0,1],[1,0]],"ext2":[[0,0],[0,0]],"stabilized_at":{}}}"#, table.stabilized_at));
        assert!(table.stabilized_at <= 6);
    }

    #[test]
    fn holonomic_pair() {
        // Ext^1(D/D(t d - a), D/D(t d - a)) for a generic a: the class of 1 survives
        let e = ext1_dim(&w("t*d - 1/2"), &w("t*d - 1/2"), 6).unwrap();
        assert_eq!(e.dim, 1);
    }
}
