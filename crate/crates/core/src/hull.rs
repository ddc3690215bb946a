//! The hull of an unobstructed family and its algebraization: the (completed)
//! path algebra of the quiver with one arrow `s_ij : j -> i` per basis vector
//! of `Ext^1(M_j, M_i)`.
//!
//! Paths compose like operators: in `s21*s12` the arrow `s12` acts first.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtTable;
use crate::linalg::QMatrix;
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub name: String,
    /// source point (1-based)
    pub from: usize,
    /// target point (1-based)
    pub to: usize,
}

/// A symbol of the generators-and-relations presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Symbol {
    /// `e_i` for `i < points`; the last idempotent is `1 - sum`.
    Idempotent(usize),
    Arrow(usize),
}

/// `lhs = rhs` with `rhs = None` meaning zero; both sides are words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Vec<Symbol>,
    pub rhs: Option<Vec<Symbol>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedAlgebra {
    pub points: usize,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Relation>,
}

impl PointedAlgebra {
    fn symbol_name(&self, s: Symbol) -> String {
        match s {
            Symbol::Idempotent(i) => format!("e{}", i + 1),
            Symbol::Arrow(a) => self.arrows[a].name.clone(),
        }
    }

    fn word(&self, w: &[Symbol]) -> String {
        if w.len() == 2 && w[0] == w[1] {
            return format!("{}^2", self.symbol_name(w[0]));
        }
        w.iter().map(|&s| self.symbol_name(s)).collect::<Vec<_>>().join("*")
    }

    pub fn relation_strings(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|r| {
                let rhs = r.rhs.as_ref().map_or("0".to_string(), |w| self.word(w));
                format!("{} = {}", self.word(&r.lhs), rhs)
            })
            .collect()
    }

    /// `dim H / J^m`: the number of paths of length `< m`.
    pub fn hull_trunc_dim(&self, m: usize) -> usize {
        fn count(alg: &PointedAlgebra, at: usize, remaining: usize) -> usize {
            if remaining == 0 {
                return 0;
            }
            1 + alg
                .arrows
                .iter()
                .filter(|a| a.from == at)
                .map(|a| count(alg, a.to, remaining - 1))
                .sum::<usize>()
        }
        (1..=self.points).map(|p| count(self, p, m)).sum()
    }

    /// Description of the block `H_ij = e_i H e_j`.
    pub fn entry(&self, i: usize, j: usize) -> String {
        let into: Vec<&Arrow> = self.arrows.iter().filter(|a| a.to == i && a.from == j).collect();
        let loops: Vec<&Arrow> = self.arrows.iter().filter(|a| a.from == a.to && a.from == i).collect();
        let back: Vec<&Arrow> = self.arrows.iter().filter(|a| a.to == j && a.from == i).collect();
        if i == j {
            if !loops.is_empty() && self.arrows.len() == loops.len() {
                let vars: Vec<&str> = loops.iter().map(|a| a.name.as_str()).collect();
                return format!("k<<{}>>", vars.join(", "));
            }
            // a single 2-cycle through i
            let out: Vec<&Arrow> = self.arrows.iter().filter(|a| a.from == i && a.to != i).collect();
            if out.len() == 1 && self.arrows.len() == 2 {
                let ret = self.arrows.iter().find(|a| a.to == i && a.from == out[0].to);
                if let Some(ret) = ret {
                    return format!("k[[{}*{}]]", ret.name, out[0].name);
                }
            }
            if self.arrows.iter().all(|a| a.from != i && a.to != i) {
                return "k".into();
            }
            return format!("paths from {j} to {i}");
        }
        if into.is_empty() {
            return if self.arrows.is_empty() { "0".into() } else { format!("paths from {j} to {i}") };
        }
        if into.len() == 1 && back.len() <= 1 && self.arrows.len() == into.len() + back.len() {
            return format!("<{}>", into[0].name);
        }
        format!("paths from {j} to {i}")
    }

    pub fn entries(&self) -> Vec<Vec<String>> {
        (1..=self.points)
            .map(|i| (1..=self.points).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// `lhs - rhs` of every relation evaluated on matrices `rho(e_1..e_{p-1})`
    /// and `rho(arrows)`, paired with the relation's name.
    pub fn residuals(&self, idempotents: &[QMatrix], arrows: &[QMatrix]) -> Vec<(String, QMatrix)> {
        let n = idempotents.first().or(arrows.first()).map_or(0, |m| m.rows());
        let eval = |w: &[Symbol]| -> QMatrix {
            w.iter().fold(QMatrix::identity(n), |acc, s| {
                let m = match *s {
                    Symbol::Idempotent(i) => &idempotents[i],
                    Symbol::Arrow(a) => &arrows[a],
                };
                &acc * m
            })
        };
        self.relations
            .iter()
            .zip(self.relation_strings())
            .map(|(r, name)| {
                let lhs = eval(&r.lhs);
                let residual = match &r.rhs {
                    Some(w) => &lhs - &eval(w),
                    None => lhs,
                };
                (name, residual)
            })
            .collect()
    }

    pub fn violated_relations(&self, idempotents: &[QMatrix], arrows: &[QMatrix]) -> Vec<String> {
        self.residuals(idempotents, arrows)
            .into_iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(name, _)| name)
            .collect()
    }
}

impl fmt::Display for PointedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points: {}", self.points)?;
        for a in &self.arrows {
            writeln!(f, "arrow {}: {} -> {}", a.name, a.from, a.to)?;
        }
        for r in self.relation_strings() {
            writeln!(f, "relation {r}")?;
        }
        for (i, row) in self.entries().iter().enumerate() {
            writeln!(f, "H{}: {}", i + 1, row.join(" | "))?;
        }
        write!(f, "the J-adic completion of S is isomorphic to H")
    }
}

#[derive(Serialize)]
struct PointedAlgebraJson<'a> {
    points: usize,
    arrows: &'a [Arrow],
    relations: Vec<String>,
    entries: Vec<Vec<String>>,
    completion: &'static str,
}

impl Serialize for PointedAlgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointedAlgebraJson {
            points: self.points,
            arrows: &self.arrows,
            relations: self.relation_strings(),
            entries: self.entries(),
            completion: "the J-adic completion of S is isomorphic to H",
        }
        .serialize(s)
    }
}

/// Hull and algebraization of an unobstructed family from its Ext table.
pub fn hull_unobstructed(table: &ExtTable) -> Result<PointedAlgebra> {
    if table.ext2.iter().flatten().any(|&d| d != 0) {
        return Err(Error::Obstructed);
    }
    let points = table.ext1.len();
    let mut arrows = Vec::new();
    for (i, row) in table.ext1.iter().enumerate() {
        for (j, &dim) in row.iter().enumerate() {
            for k in 0..dim {
                let base = format!("s{}{}", i + 1, j + 1);
                let name = if k == 0 { base } else { format!("{base}_{}", k + 1) };
                arrows.push(Arrow {
                    name,
                    from: j + 1,
                    to: i + 1,
                });
            }
        }
    }
    let mut relations = Vec::new();
    let idempotents: Vec<usize> = (0..points.saturating_sub(1)).collect();
    for (a, arrow) in arrows.iter().enumerate() {
        if arrow.from != arrow.to {
            relations.push(Relation {
                lhs: vec![Symbol::Arrow(a), Symbol::Arrow(a)],
                rhs: None,
            });
        }
    }
    for &i in &idempotents {
        relations.push(Relation {
            lhs: vec![Symbol::Idempotent(i), Symbol::Idempotent(i)],
            rhs: Some(vec![Symbol::Idempotent(i)]),
        });
        for &j in &idempotents {
            if j != i {
                relations.push(Relation {
                    lhs: vec![Symbol::Idempotent(i), Symbol::Idempotent(j)],
                    rhs: None,
                });
            }
        }
    }
    let mut identities = Vec::new();
    let mut zeros = Vec::new();
    for (a, arrow) in arrows.iter().enumerate() {
        for &k in &idempotents {
            let left = vec![Symbol::Idempotent(k), Symbol::Arrow(a)];
            let right = vec![Symbol::Arrow(a), Symbol::Idempotent(k)];
            for (word, keeps) in [(left, arrow.to == k + 1), (right, arrow.from == k + 1)] {
                if keeps {
                    identities.push(Relation {
                        lhs: word,
                        rhs: Some(vec![Symbol::Arrow(a)]),
                    });
                } else {
                    zeros.push(Relation { lhs: word, rhs: None });
                }
            }
        }
    }
    relations.extend(identities);
    relations.extend(zeros);
    Ok(PointedAlgebra {
        points,
        arrows,
        relations,
    })
}

/// A path: its source point (0-based) and arrows in the order they act.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    pub source: usize,
    pub arrows: Vec<usize>,
}

/// Finite linear combinations of paths, multiplied by composition.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PathElement {
    terms: BTreeMap<Path, Scalar>,
}

impl PathElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn idempotent(point: usize) -> Self {
        Self::path(Path {
            source: point,
            arrows: Vec::new(),
        })
    }

    pub fn arrow(alg: &PointedAlgebra, a: usize) -> Self {
        Self::path(Path {
            source: alg.arrows[a].from - 1,
            arrows: vec![a],
        })
    }

    pub fn path(p: Path) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(p, Scalar::one());
        PathElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &Scalar)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PathElement {
            terms: self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect(),
        }
    }

    pub fn add(&self, other: &PathElement) -> Self {
        let mut terms = self.terms.clone();
        for (p, x) in &other.terms {
            let entry = terms.entry(p.clone()).or_insert_with(Scalar::zero);
            *entry += x;
            if entry.is_zero() {
                terms.remove(p);
            }
        }
        PathElement { terms }
    }

    /// `self * other`: `other` acts first.
    pub fn mul(&self, alg: &PointedAlgebra, other: &PathElement) -> Self {
        let mut out = PathElement::zero();
        for (p, x) in &self.terms {
            for (q, y) in &other.terms {
                if target(alg, q) == p.source {
                    let mut arrows = q.arrows.clone();
                    arrows.extend(p.arrows.iter().copied());
                    out = out.add(&PathElement::path(Path { source: q.source, arrows }).scale(&(x * y)));
                }
            }
        }
        out
    }

    /// Image under a representation given by the point projections (summing
    /// to the identity) and arrow matrices.
    pub fn evaluate(&self, projections: &[QMatrix], arrows: &[QMatrix]) -> QMatrix {
        let n = projections[0].rows();
        let mut out = QMatrix::zeros(n, n);
        for (p, x) in &self.terms {
            let mut m = projections[p.source].clone();
            for &a in &p.arrows {
                m = &arrows[a] * &m;
            }
            out = &out + &m.scale(x);
        }
        out
    }

    pub fn display(&self, alg: &PointedAlgebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(p, x)| {
                let word = if p.arrows.is_empty() {
                    format!("e{}", p.source + 1)
                } else {
                    p.arrows.iter().rev().map(|&a| alg.arrows[a].name.clone()).collect::<Vec<_>>().join("*")
                };
                if x.is_one() {
                    word
                } else {
                    format!("{}*{}", scalar::format_scalar(x), word)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn target(alg: &PointedAlgebra, p: &Path) -> usize {
    p.arrows.last().map_or(p.source, |&a| alg.arrows[a].to - 1)
}

/// The hull of the family `{D/Dd, D/Dt}`: the 2-cycle quiver.
pub fn standard_hull() -> PointedAlgebra {
    let table = ExtTable {
        ext1: vec![vec![0, 1], vec![1, 0]],
        ext2: vec![vec![0, 0], vec![0, 0]],
        stabilized_at: 0,
        representatives: Vec::new(),
    };
    hull_unobstructed(&table).expect("unobstructed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(ext1: Vec<Vec<usize>>) -> ExtTable {
        let k = ext1.len();
        ExtTable {
            ext1,
            ext2: vec![vec![0; k]; k],
            stabilized_at: 0,
            representatives: Vec::new(),
        }
    }

    #[test]
    fn two_cycle_relations() {
        let h = standard_hull();
        assert_eq!(
            h.relation_strings(),
            ["s12^2 = 0", "s21^2 = 0", "e1^2 = e1", "e1*s12 = s12", "s21*e1 = s21", "s12*e1 = 0", "e1*s21 = 0"]
        );
        assert_eq!(h.arrows[0], Arrow { name: "s12".into(), from: 2, to: 1 });
        assert_eq!(h.entries(), vec![vec!["k[[s12*s21]]", "<s12>"], vec!["<s21>", "k[[s21*s12]]"]]);
    }

    #[test]
    fn truncated_dimensions() {
        let h = standard_hull();
        assert_eq!(h.hull_trunc_dim(1), 2);
        assert_eq!(h.hull_trunc_dim(2), 4);
        assert_eq!(h.hull_trunc_dim(3), 6);
    }

    #[test]
    fn rigid_family() {
        let h = hull_unobstructed(&table(vec![vec![0, 0], vec![0, 0]])).unwrap();
        assert!(h.arrows.is_empty());
        assert_eq!(h.hull_trunc_dim(5), 2);
        assert_eq!(h.entries(), vec![vec!["k", "0"], vec!["0", "k"]]);
    }

    #[test]
    fn one_loop() {
        let h = hull_unobstructed(&table(vec![vec![1, 0], vec![0, 0]])).unwrap();
        assert_eq!(h.entry(1, 1), "k<<s11>>");
        assert_eq!(h.hull_trunc_dim(4), 5);
        assert!(h.relation_strings().contains(&"e1*s11 = s11".to_string()));
    }

    #[test]
    fn obstruction_is_rejected() {
        let mut t = table(vec![vec![0, 1], vec![1, 0]]);
        t.ext2[0][1] = 1;
        assert_eq!(hull_unobstructed(&t), Err(Error::Obstructed));
    }

    #[test]
    fn path_products() {
        let h = standard_hull();
        let (s12, s21) = (PathElement::arrow(&h, 0), PathElement::arrow(&h, 1));
        let e1 = PathElement::idempotent(0);
        assert_eq!(s21.mul(&h, &e1), s21);
        assert!(s12.mul(&h, &e1).is_zero());
        assert!(s12.mul(&h, &s12).is_zero());
        assert_eq!(s21.mul(&h, &s12).display(&h), "s21*s12");
    }
}
