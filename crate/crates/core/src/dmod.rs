//! Presented left D-modules, truncated hom spaces and isomorphism witnesses.
//!
//! Side convention: a module is `D^n / D^n Delta`, row vectors modulo the
//! row space of `Delta` (right multiplication). A homomorphism
//! `D^n/D^n Delta -> D^m/D^m Delta'` is right multiplication by an `n x m`
//! matrix `R` with `Delta R = X Delta'` for some `X`; the matrix `X` is
//! carried along as the certificate that `R` is well defined.
//!
//! For cyclic modules `D/Dq` the single element `q` is a left Groebner basis,
//! so normal forms modulo `Dq` are exact and every hom computation reduces to
//! finite-dimensional linear algebra on standard monomials.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dmatrix::{element_as_string, WeylMatrix};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::scalar::{self, Scalar};
use crate::weyl::{Monomial, WeylElement};

pub const DEFAULT_MAX_DEGREE: usize = 8;
pub const MAX_DEGREE_CAP: usize = 16;
/// Degree cap for the dense search used when a presentation has no unit pivot.
pub const FALLBACK_DEGREE_CAP: usize = 4;

pub fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE_CAP {
        return Err(Error::DegreeCap(n));
    }
    Ok(())
}

/// Monomials `t^i d^j` with `i + j <= n`, ascending.
pub fn truncated_monomials(n: usize) -> Vec<Monomial> {
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for deg in 0..=n as u32 {
        for d in 0..=deg {
            out.push(Monomial::new(deg - d, d));
        }
    }
    out
}

/// Monomials of degree `<= n` that are not divisible by the leading monomial
/// of `q`: a basis of the degree-`n` part of `D/Dq`.
pub fn standard_monomials(q: &WeylElement, n: usize) -> Vec<Monomial> {
    let (lead, _) = q.leading().expect("nonzero generator");
    truncated_monomials(n)
        .into_iter()
        .filter(|m| m.divide(lead).is_none())
        .collect()
}

/// The `N` at which a sequence of truncated dimensions is declared stable:
/// three consecutive equal values with no change afterwards.
pub fn stabilization_point(values: &[usize]) -> Option<usize> {
    let last = *values.last()?;
    let start = values.iter().rposition(|&v| v != last).map_or(0, |i| i + 1);
    let declared = start + 2;
    (declared < values.len()).then_some(declared)
}

/// The module `D/Dp`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicModule {
    #[serde(with = "element_as_string")]
    pub p: WeylElement,
}

impl CyclicModule {
    pub fn new(p: WeylElement) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Invalid("cyclic module needs a nonzero generator".into()));
        }
        Ok(CyclicModule { p })
    }

    pub fn presented(&self) -> PresentedModule {
        PresentedModule {
            delta: WeylMatrix::scalar(self.p.clone()),
        }
    }
}

/// `D^n / D^n Delta` for a square `Delta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedModule {
    pub delta: WeylMatrix,
}

impl PresentedModule {
    pub fn new(delta: WeylMatrix) -> Result<Self> {
        if delta.rows() == 0 || delta.rows() != delta.cols() {
            return Err(Error::Invalid(format!(
                "presentation must be square and nonempty, got {}x{}",
                delta.rows(),
                delta.cols()
            )));
        }
        Ok(PresentedModule { delta })
    }

    pub fn n(&self) -> usize {
        self.delta.rows()
    }

    pub fn as_cyclic(&self) -> Option<CyclicModule> {
        (self.n() == 1 && !self.delta[(0, 0)].is_zero()).then(|| CyclicModule {
            p: self.delta[(0, 0)].clone(),
        })
    }

    pub fn direct_sum(parts: &[PresentedModule]) -> PresentedModule {
        let blocks: Vec<WeylMatrix> = parts.iter().map(|m| m.delta.clone()).collect();
        PresentedModule {
            delta: WeylMatrix::block_diagonal(&blocks),
        }
    }
}

/// JSON form of a module: `{"type":"cyclic","p":"t*d - 1"}` or
/// `{"type":"presented","n":2,"delta":[["d","-1"],["0","t"]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModuleSpec {
    Cyclic {
        #[serde(with = "element_as_string")]
        p: WeylElement,
    },
    Presented { n: usize, delta: WeylMatrix },
}

impl ModuleSpec {
    pub fn from_module(m: &PresentedModule) -> Self {
        match m.as_cyclic() {
            Some(c) => ModuleSpec::Cyclic { p: c.p },
            None => ModuleSpec::Presented {
                n: m.n(),
                delta: m.delta.clone(),
            },
        }
    }

    pub fn into_module(self) -> Result<PresentedModule> {
        match self {
            ModuleSpec::Cyclic { p } => Ok(CyclicModule::new(p)?.presented()),
            ModuleSpec::Presented { n, delta } => {
                if delta.rows() != n {
                    return Err(Error::Invalid(format!("declared n = {n} but delta has {} rows", delta.rows())));
                }
                PresentedModule::new(delta)
            }
        }
    }
}

/// Coordinates of a list of elements (columns) over the union of their
/// monomials, rows in ascending monomial order.
fn coordinate_matrix(columns: &[WeylElement]) -> (QMatrix, Vec<Monomial>) {
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for c in columns {
        for (m, _) in c.terms() {
            index.entry(*m).or_insert(0);
        }
    }
    for (k, slot) in index.values_mut().enumerate() {
        *slot = k;
    }
    let mut mat = QMatrix::zeros(index.len(), columns.len());
    for (j, c) in columns.iter().enumerate() {
        for (m, x) in c.terms() {
            mat[(index[m], j)] = x.clone();
        }
    }
    (mat, index.into_keys().collect())
}

fn combine(basis: &[Monomial], coeffs: &[Scalar]) -> WeylElement {
    WeylElement::from_terms(basis.iter().copied().zip(coeffs.iter().cloned()))
}

fn combine_elements(elements: &[WeylElement], coeffs: &[Scalar]) -> WeylElement {
    elements
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .fold(WeylElement::zero(), |acc, (e, c)| &acc + &e.scale(c))
}

/// Representatives `r` (normal forms modulo `Dq`, degree `<= n`) of a basis
/// of the hom classes `D/Dp -> D/Dq`, i.e. `p r` in `Dq`.
pub fn hom_basis(p: &WeylElement, q: &WeylElement, n: usize) -> Vec<WeylElement> {
    let basis = standard_monomials(q, n);
    let images: Vec<WeylElement> = basis
        .iter()
        .map(|m| (p * &WeylElement::monomial(scalar::one(), *m)).reduce_mod(q))
        .collect();
    let (mat, _) = coordinate_matrix(&images);
    let kernel = if mat.rows() == 0 {
        (0..basis.len())
            .map(|k| {
                let mut v = vec![Scalar::zero(); basis.len()];
                v[k] = Scalar::one();
                v
            })
            .collect()
    } else {
        mat.kernel_basis()
    };
    kernel.iter().map(|v| combine(&basis, v)).collect()
}

/// Result of a truncated hom search between cyclic modules.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomSpace {
    #[serde(with = "element_as_string")]
    pub source: WeylElement,
    #[serde(with = "element_as_string")]
    pub target: WeylElement,
    pub max_degree: usize,
    pub dimension: usize,
    #[serde(serialize_with = "serialize_elements")]
    pub basis: Vec<WeylElement>,
    pub dims_by_degree: Vec<usize>,
    pub stabilized_at: Option<usize>,
}

fn serialize_elements<S: serde::Serializer>(v: &[WeylElement], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e.to_string()))
}

/// Hom classes `D/Dp -> D/Dq` representable with degree `<= n`, with the
/// truncated dimension recorded for every degree up to `n`.
pub fn hom_search(source: &CyclicModule, target: &CyclicModule, n: usize) -> HomSpace {
    let dims_by_degree: Vec<usize> = (0..=n).map(|k| hom_basis(&source.p, &target.p, k).len()).collect();
    let basis = hom_basis(&source.p, &target.p, n);
    HomSpace {
        source: source.p.clone(),
        target: target.p.clone(),
        max_degree: n,
        dimension: basis.len(),
        basis,
        stabilized_at: stabilization_point(&dims_by_degree),
        dims_by_degree,
    }
}

/// Exact check that right multiplication by `r` is well defined on `D/Dp -> D/Dq`.
pub fn is_hom(p: &WeylElement, q: &WeylElement, r: &WeylElement) -> bool {
    let product = p * r;
    let (quotient, remainder) = product.left_divide(q);
    remainder.is_zero() && &quotient * q == product
}

/// Explicit mutually inverse homomorphisms between two presented modules,
/// with every membership claim backed by a certificate matrix:
///
/// * `source.delta * forward == forward_lift * target.delta`
/// * `target.delta * backward == backward_lift * source.delta`
/// * `forward * backward - I == source_homotopy * source.delta`
/// * `backward * forward - I == target_homotopy * target.delta`
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoWitness {
    #[serde(skip)]
    pub source: PresentedModule,
    #[serde(skip)]
    pub target: PresentedModule,
    pub forward: WeylMatrix,
    pub backward: WeylMatrix,
    pub forward_lift: WeylMatrix,
    pub backward_lift: WeylMatrix,
    pub source_homotopy: WeylMatrix,
    pub target_homotopy: WeylMatrix,
    /// Degree bound of the search that produced the witness (0 for
    /// witnesses built by exact elimination).
    pub degree: usize,
}

impl IsoWitness {
    pub fn identity(m: &PresentedModule) -> Self {
        let n = m.n();
        IsoWitness {
            source: m.clone(),
            target: m.clone(),
            forward: WeylMatrix::identity(n),
            backward: WeylMatrix::identity(n),
            forward_lift: WeylMatrix::identity(n),
            backward_lift: WeylMatrix::identity(n),
            source_homotopy: WeylMatrix::zeros(n, n),
            target_homotopy: WeylMatrix::zeros(n, n),
            degree: 0,
        }
    }

    /// Checks all four certificate identities exactly.
    pub fn verify(&self) -> bool {
        let (a, b) = (&self.source.delta, &self.target.delta);
        let (n, m) = (a.rows(), b.rows());
        let shapes = self.forward.rows() == n
            && self.forward.cols() == m
            && self.backward.rows() == m
            && self.backward.cols() == n
            && self.forward_lift.rows() == n
            && self.forward_lift.cols() == m
            && self.backward_lift.rows() == m
            && self.backward_lift.cols() == n
            && self.source_homotopy.rows() == n
            && self.source_homotopy.cols() == n
            && self.target_homotopy.rows() == m
            && self.target_homotopy.cols() == m;
        if !shapes {
            return false;
        }
        a * &self.forward == &self.forward_lift * b
            && b * &self.backward == &self.backward_lift * a
            && &(&self.forward * &self.backward) - &WeylMatrix::identity(n) == &self.source_homotopy * a
            && &(&self.backward * &self.forward) - &WeylMatrix::identity(m) == &self.target_homotopy * b
    }

    pub fn inverse(&self) -> Self {
        IsoWitness {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            forward_lift: self.backward_lift.clone(),
            backward_lift: self.forward_lift.clone(),
            source_homotopy: self.target_homotopy.clone(),
            target_homotopy: self.source_homotopy.clone(),
            degree: self.degree,
        }
    }

    /// `self: A -> B` followed by `next: B -> C`.
    pub fn then(&self, next: &IsoWitness) -> Self {
        assert_eq!(self.target, next.source, "witnesses do not compose");
        let (r1, s1, x1, x1b, y1, y1b) = (
            &self.forward,
            &self.backward,
            &self.forward_lift,
            &self.backward_lift,
            &self.source_homotopy,
            &self.target_homotopy,
        );
        let (r2, s2, x2, x2b, y2, y2b) = (
            &next.forward,
            &next.backward,
            &next.forward_lift,
            &next.backward_lift,
            &next.source_homotopy,
            &next.target_homotopy,
        );
        IsoWitness {
            source: self.source.clone(),
            target: next.target.clone(),
            forward: r1 * r2,
            backward: s2 * s1,
            forward_lift: x1 * x2,
            backward_lift: x2b * x1b,
            source_homotopy: &(&(r1 * y2) * x1b) + y1,
            target_homotopy: &(&(s2 * y1b) * x2) + y2b,
            degree: self.degree.max(next.degree),
        }
    }

    pub fn direct_sum(parts: &[IsoWitness]) -> Self {
        let block = |f: fn(&IsoWitness) -> &WeylMatrix| {
            WeylMatrix::block_diagonal(&parts.iter().map(|w| f(w).clone()).collect::<Vec<_>>())
        };
        IsoWitness {
            source: PresentedModule::direct_sum(&parts.iter().map(|w| w.source.clone()).collect::<Vec<_>>()),
            target: PresentedModule::direct_sum(&parts.iter().map(|w| w.target.clone()).collect::<Vec<_>>()),
            forward: block(|w| &w.forward),
            backward: block(|w| &w.backward),
            forward_lift: block(|w| &w.forward_lift),
            backward_lift: block(|w| &w.backward_lift),
            source_homotopy: block(|w| &w.source_homotopy),
            target_homotopy: block(|w| &w.target_homotopy),
            degree: parts.iter().map(|w| w.degree).max().unwrap_or(0),
        }
    }

    /// Witness for `Delta' = P Delta Q` with invertible scalar `P`, `Q`.
    pub fn scalar_change(m: &PresentedModule, p: &QMatrix, q: &QMatrix) -> Option<Self> {
        let (p_inv, q_inv) = (p.inverse()?, q.inverse()?);
        let (pw, qw) = (WeylMatrix::from_qmatrix(p), WeylMatrix::from_qmatrix(q));
        let target = PresentedModule {
            delta: &(&pw * &m.delta) * &qw,
        };
        let n = m.n();
        Some(IsoWitness {
            source: m.clone(),
            target,
            forward: qw,
            backward: WeylMatrix::from_qmatrix(&q_inv),
            forward_lift: WeylMatrix::from_qmatrix(&p_inv),
            backward_lift: pw,
            source_homotopy: WeylMatrix::zeros(n, n),
            target_homotopy: WeylMatrix::zeros(n, n),
            degree: 0,
        })
    }
}

fn cyclic_witness(p: &WeylElement, q: &WeylElement, r: &WeylElement, s: &WeylElement, degree: usize) -> IsoWitness {
    let quotient = |v: WeylElement, by: &WeylElement| v.left_divide(by).0;
    let one = WeylElement::one();
    IsoWitness {
        source: CyclicModule { p: p.clone() }.presented(),
        target: CyclicModule { p: q.clone() }.presented(),
        forward: WeylMatrix::scalar(r.clone()),
        backward: WeylMatrix::scalar(s.clone()),
        forward_lift: WeylMatrix::scalar(quotient(p * r, q)),
        backward_lift: WeylMatrix::scalar(quotient(q * s, p)),
        source_homotopy: WeylMatrix::scalar(quotient(&(r * s) - &one, p)),
        target_homotopy: WeylMatrix::scalar(quotient(&(s * r) - &one, q)),
        degree,
    }
}

/// Coefficient vectors tried, in order, when picking the forward map out of
/// a hom basis of size `k`: unit vectors first, then small integer points.
fn candidate_coefficients(k: usize) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { scalar::one() } else { scalar::zero() }).collect())
        .collect();
    if k > 1 {
        for total in 2..=3u32 {
            for point in simplex_points(k, total) {
                if point.iter().sum::<u32>() == total && point.iter().filter(|&&x| x > 0).count() > 1 {
                    out.push(point.iter().map(|&x| scalar::int(x as i64)).collect());
                }
            }
        }
    }
    out.truncate(64);
    out
}

/// Forward maps tried by the dense search: unit vectors, then their sum.
fn dense_candidates(k: usize) -> Vec<Vec<Scalar>> {
    let mut out = candidate_coefficients(k);
    out.truncate(k);
    if k > 1 {
        out.push(vec![scalar::one(); k]);
    }
    out
}

/// Points of `{x in N^dim : sum(x) <= bound}` ordered by total, then lexicographically.
pub fn simplex_points(dim: usize, bound: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == dim {
            out.push(prefix.clone());
            return;
        }
        for x in 0..=remaining {
            prefix.push(x);
            rec(dim, remaining - x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, bound, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| a.cmp(b)));
    out
}

/// Searches degrees `0..=n` for mutually inverse maps `D/Dp <-> D/Dq`.
pub fn cyclic_iso_witness(p: &WeylElement, q: &WeylElement, n: usize) -> Option<IsoWitness> {
    if p == q {
        return Some(IsoWitness::identity(&CyclicModule { p: p.clone() }.presented()));
    }
    let one = WeylElement::one();
    for degree in 0..=n {
        let forward = hom_basis(p, q, degree);
        let backward = hom_basis(q, p, degree);
        if forward.is_empty() || backward.is_empty() {
            continue;
        }
        for coeffs in candidate_coefficients(forward.len()) {
            let r = combine_elements(&forward, &coeffs);
            // r s = 1 mod Dp and s r = 1 mod Dq, linear in the coefficients of s.
            let mut columns = Vec::with_capacity(backward.len());
            for s in &backward {
                columns.push(((&r * s).reduce_mod(p), (s * &r).reduce_mod(q)));
            }
            let (left, left_rows) = coordinate_matrix(
                &columns.iter().map(|c| c.0.clone()).chain([one.reduce_mod(p)]).collect::<Vec<_>>(),
            );
            let (right, right_rows) = coordinate_matrix(
                &columns.iter().map(|c| c.1.clone()).chain([one.reduce_mod(q)]).collect::<Vec<_>>(),
            );
            let k = backward.len();
            let rows = left.rows() + right.rows();
            let mut system = QMatrix::zeros(rows, k);
            let mut rhs = vec![Scalar::zero(); rows];
            for i in 0..left.rows() {
                for j in 0..k {
                    system[(i, j)] = left[(i, j)].clone();
                }
                rhs[i] = left[(i, k)].clone();
            }
            for i in 0..right.rows() {
                for j in 0..k {
                    system[(left.rows() + i, j)] = right[(i, j)].clone();
                }
                rhs[left.rows() + i] = right[(i, k)].clone();
            }
            let _ = (left_rows, right_rows);
            if let Ok(Some(y)) = system.solve(&rhs) {
                let s = combine_elements(&backward, &y);
                let witness = cyclic_witness(p, q, &r, &s, degree);
                if witness.verify() {
                    return Some(witness);
                }
            }
        }
    }
    None
}

/// One step of unit-pivot elimination: the relation in row `i` solves for
/// generator `j` because `Delta[i][j]` is a nonzero scalar.
fn eliminate_unit(m: &PresentedModule, i: usize, j: usize) -> IsoWitness {
    let delta = &m.delta;
    let n = delta.rows();
    let c_inv = WeylElement::constant(delta[(i, j)].as_constant().expect("unit pivot").recip());
    let keep_rows: Vec<usize> = (0..n).filter(|&l| l != i).collect();
    let keep_cols: Vec<usize> = (0..n).filter(|&k| k != j).collect();
    let reduced_n = n - 1;

    let mut reduced = WeylMatrix::zeros(reduced_n, reduced_n);
    for (a, &l) in keep_rows.iter().enumerate() {
        let factor = &delta[(l, j)] * &c_inv;
        for (b, &k) in keep_cols.iter().enumerate() {
            reduced[(a, b)] = &delta[(l, k)] - &(&factor * &delta[(i, k)]);
        }
    }
    let mut forward = WeylMatrix::zeros(n, reduced_n);
    let mut backward = WeylMatrix::zeros(reduced_n, n);
    for (b, &k) in keep_cols.iter().enumerate() {
        forward[(k, b)] = WeylElement::one();
        forward[(j, b)] = -&(&c_inv * &delta[(i, k)]);
        backward[(b, k)] = WeylElement::one();
    }
    let mut forward_lift = WeylMatrix::zeros(n, reduced_n);
    let mut backward_lift = WeylMatrix::zeros(reduced_n, n);
    for (a, &l) in keep_rows.iter().enumerate() {
        forward_lift[(l, a)] = WeylElement::one();
        backward_lift[(a, l)] = WeylElement::one();
        backward_lift[(a, i)] = -&(&delta[(l, j)] * &c_inv);
    }
    let mut source_homotopy = WeylMatrix::zeros(n, n);
    source_homotopy[(j, i)] = -&c_inv;
    IsoWitness {
        source: m.clone(),
        target: PresentedModule { delta: reduced },
        forward,
        backward,
        forward_lift,
        backward_lift,
        source_homotopy,
        target_homotopy: WeylMatrix::zeros(reduced_n, reduced_n),
        degree: 0,
    }
}

fn find_unit(delta: &WeylMatrix) -> Option<(usize, usize)> {
    for i in 0..delta.rows() {
        for j in 0..delta.cols() {
            if let Some(c) = delta[(i, j)].as_constant() {
                if !c.is_zero() {
                    return Some((i, j));
                }
            }
        }
    }
    None
}

/// Connected components of the row/column incidence graph; `None` unless
/// every component is square.
fn square_blocks(delta: &WeylMatrix) -> Option<Vec<(Vec<usize>, Vec<usize>)>> {
    let n = delta.rows();
    // nodes 0..n are rows, n..2n are columns
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        parent[x] = root;
        root
    }
    for i in 0..n {
        for j in 0..n {
            if !delta[(i, j)].is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, n + j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for node in 0..2 * n {
        let root = find(&mut parent, node);
        let entry = groups.entry(root).or_default();
        if node < n {
            entry.0.push(node);
        } else {
            entry.1.push(node - n);
        }
    }
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = groups.into_values().collect();
    if blocks.iter().any(|(r, c)| r.len() != c.len()) {
        return None;
    }
    blocks.sort_by_key(|(_, cols)| cols[0]);
    Some(blocks)
}

fn permutation(order: &[usize]) -> QMatrix {
    // row a selects original index order[a]
    let mut p = QMatrix::zeros(order.len(), order.len());
    for (a, &i) in order.iter().enumerate() {
        p[(a, i)] = scalar::one();
    }
    p
}

/// A presentation rewritten as a direct sum, with the certifying witness
/// `original -> direct_sum(summands)`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub summands: Vec<PresentedModule>,
    pub witness: IsoWitness,
}

impl Decomposition {
    pub fn cyclic_summands(&self) -> Option<Vec<CyclicModule>> {
        self.summands.iter().map(PresentedModule::as_cyclic).collect()
    }
}

/// Eliminates scalar pivots, splits block-diagonal structure and makes every
/// cyclic summand monic. Every step is an exact isomorphism.
pub fn decompose(m: &PresentedModule) -> Decomposition {
    let mut witness = IsoWitness::identity(m);
    while let Some((i, j)) = find_unit(&witness.target.delta) {
        let step = eliminate_unit(&witness.target, i, j);
        witness = witness.then(&step);
    }
    let current = witness.target.clone();
    if current.n() == 0 {
        return Decomposition {
            summands: Vec::new(),
            witness,
        };
    }
    let blocks = square_blocks(&current.delta).unwrap_or_else(|| vec![((0..current.n()).collect(), (0..current.n()).collect())]);
    let row_order: Vec<usize> = blocks.iter().flat_map(|(r, _)| r.clone()).collect();
    let col_order: Vec<usize> = blocks.iter().flat_map(|(_, c)| c.clone()).collect();
    let p = permutation(&row_order);
    let q = permutation(&col_order).transpose();
    let split = IsoWitness::scalar_change(&current, &p, &q).expect("permutations are invertible");
    witness = witness.then(&split);

    let mut summands = Vec::new();
    let mut normalizers = Vec::new();
    for (rows, cols) in &blocks {
        let block = PresentedModule {
            delta: current.delta.submatrix(rows, cols),
        };
        let normalizer = match block.as_cyclic() {
            Some(c) => {
                let lead = c.p.leading().expect("nonzero").1.clone();
                let scale = QMatrix::from_rows(vec![vec![lead.recip()]]).expect("1x1");
                IsoWitness::scalar_change(&block, &scale, &QMatrix::identity(1)).expect("nonzero scalar")
            }
            None => IsoWitness::identity(&block),
        };
        summands.push(normalizer.target.clone());
        normalizers.push(normalizer);
    }
    witness = witness.then(&IsoWitness::direct_sum(&normalizers));
    Decomposition { summands, witness }
}

/// Finds a cyclic form `D/Dp` of `m` with a certified isomorphism
/// `m -> D/Dp`, or `None` if none is found up to degree `n`.
pub fn cyclic_identify(m: &PresentedModule, n: usize) -> Option<(CyclicModule, IsoWitness)> {
    let dec = decompose(m);
    if dec.summands.len() == 1 {
        if let Some(c) = dec.summands[0].as_cyclic() {
            return Some((c, dec.witness));
        }
        let block = &dec.summands[0];
        let (c, w) = generator_search(block, n.min(FALLBACK_DEGREE_CAP))?;
        return Some((c, dec.witness.then(&w)));
    }
    None
}

/// Isomorphism search between two presented modules up to degree `n`.
/// `None` means no witness was found up to that degree, not that the modules
/// are non-isomorphic.
pub fn iso_witness(a: &PresentedModule, b: &PresentedModule, n: usize) -> Option<IsoWitness> {
    if a == b {
        return Some(IsoWitness::identity(a));
    }
    let (da, db) = (decompose(a), decompose(b));
    if da.summands.len() == db.summands.len() {
        if let (Some(ca), Some(cb)) = (da.cyclic_summands(), db.cyclic_summands()) {
            let k = ca.len();
            let mut cache: BTreeMap<(usize, usize), Option<IsoWitness>> = BTreeMap::new();
            for perm in permutations(k) {
                let mut parts = Vec::with_capacity(k);
                for (i, &j) in perm.iter().enumerate() {
                    let entry = cache
                        .entry((i, j))
                        .or_insert_with(|| cyclic_iso_witness(&ca[i].p, &cb[j].p, n));
                    match entry {
                        Some(w) => parts.push(w.clone()),
                        None => break,
                    }
                }
                if parts.len() < k {
                    continue;
                }
                let matched = IsoWitness::direct_sum(&parts);
                // reorder the target summands back to b's order
                let sizes = vec![1; k];
                let reorder = block_permutation_witness(&matched.target, &perm, &sizes);
                let witness = da.witness.then(&matched).then(&reorder).then(&db.witness.inverse());
                debug_assert!(witness.verify());
                return Some(witness);
            }
            return None;
        }
    }
    let (ra, rb) = (&da.witness.target, &db.witness.target);
    if ra.n() == 0 || rb.n() == 0 {
        return None;
    }
    let core = presented_iso_search(ra, rb, n.min(FALLBACK_DEGREE_CAP))?;
    Some(da.witness.then(&core).then(&db.witness.inverse()))
}

/// Witness from `direct_sum(b[perm[0]], b[perm[1]], ...)` to `direct_sum(b[0], b[1], ...)`.
fn block_permutation_witness(m: &PresentedModule, perm: &[usize], sizes: &[usize]) -> IsoWitness {
    // position of summand j inside m
    let mut offsets = vec![0; perm.len()];
    let mut acc = 0;
    for (pos, &j) in perm.iter().enumerate() {
        offsets[j] = acc;
        acc += sizes[pos];
    }
    let mut order = Vec::new();
    for j in 0..perm.len() {
        let pos = perm.iter().position(|&x| x == j).expect("permutation");
        order.extend(offsets[j]..offsets[j] + sizes[pos]);
    }
    let p = permutation(&order);
    IsoWitness::scalar_change(m, &p, &p.transpose()).expect("permutation")
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, used: &mut Vec<bool>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for j in 0..k {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(k, used, prefix, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, &mut vec![false; k], &mut Vec::new(), &mut out);
    out
}

/// Linear equations whose unknowns are scalars; each column is given by its
/// contribution (a Weyl element) to each equation.
struct WeylSystem {
    equations: usize,
    columns: Vec<Vec<(usize, WeylElement)>>,
}

impl WeylSystem {
    fn new(equations: usize) -> Self {
        WeylSystem {
            equations,
            columns: Vec::new(),
        }
    }

    fn push(&mut self, column: Vec<(usize, WeylElement)>) {
        self.columns.push(column);
    }

    /// Adds one column per monomial of a matrix-valued unknown `U` (entries of
    /// degree `<= bound`); `f(a, b, m)` gives the contribution of `U[a][b] = m`.
    fn push_matrix_unknown(
        &mut self,
        rows: usize,
        cols: usize,
        bound: usize,
        f: impl Fn(usize, usize, &WeylElement) -> Vec<(usize, WeylElement)>,
    ) -> Vec<(usize, usize, Monomial)> {
        let mut layout = Vec::new();
        for a in 0..rows {
            for b in 0..cols {
                for m in truncated_monomials(bound) {
                    let e = WeylElement::monomial(scalar::one(), m);
                    self.push(f(a, b, &e));
                    layout.push((a, b, m));
                }
            }
        }
        layout
    }

    fn assemble(&self, rhs: &[WeylElement]) -> (QMatrix, Vec<Scalar>) {
        let mut index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
        for col in &self.columns {
            for (eq, e) in col {
                for (m, _) in e.terms() {
                    index.entry((*eq, *m)).or_insert(0);
                }
            }
        }
        for (eq, e) in rhs.iter().enumerate() {
            for (m, _) in e.terms() {
                index.entry((eq, *m)).or_insert(0);
            }
        }
        for (k, slot) in index.values_mut().enumerate() {
            *slot = k;
        }
        let mut mat = QMatrix::zeros(index.len(), self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for (eq, e) in col {
                for (m, x) in e.terms() {
                    mat[(index[&(*eq, *m)], j)] += x;
                }
            }
        }
        let mut b = vec![Scalar::zero(); index.len()];
        for (eq, e) in rhs.iter().enumerate() {
            for (m, x) in e.terms() {
                b[index[&(eq, *m)]] = x.clone();
            }
        }
        debug_assert!(rhs.len() <= self.equations);
        (mat, b)
    }
}

fn unpack(layout: &[(usize, usize, Monomial)], values: &[Scalar], rows: usize, cols: usize) -> WeylMatrix {
    let mut out = WeylMatrix::zeros(rows, cols);
    for ((a, b, m), x) in layout.iter().zip(values) {
        out[(*a, *b)].add_term(*m, x.clone());
    }
    out
}

/// Homomorphisms `a -> b` with entries of degree `<= n`, each with its lift:
/// pairs `(R, X)` with `Delta_a R = X Delta_b`. Dense; meant for small `n`.
pub fn presented_hom_basis(a: &PresentedModule, b: &PresentedModule, n: usize) -> Vec<(WeylMatrix, WeylMatrix)> {
    let (na, nb) = (a.n(), b.n());
    let lift_bound = n + a.delta.degree().unwrap_or(0) as usize;
    let mut sys = WeylSystem::new(na * nb);
    let eq = |i: usize, j: usize| i * nb + j;
    // (Delta_a R)_{ij} = sum_k Delta_a[i][k] R[k][j]
    let r_layout = sys.push_matrix_unknown(na, nb, n, |k, j, m| {
        (0..na).map(|i| (eq(i, j), &a.delta[(i, k)] * m)).filter(|(_, e)| !e.is_zero()).collect()
    });
    // -(X Delta_b)_{ij} = -sum_k X[i][k] Delta_b[k][j]
    let x_layout = sys.push_matrix_unknown(na, nb, lift_bound, |i, k, m| {
        (0..nb).map(|j| (eq(i, j), -&(m * &b.delta[(k, j)]))).filter(|(_, e)| !e.is_zero()).collect()
    });
    let (mat, _) = sys.assemble(&[]);
    let kernel = if mat.rows() == 0 {
        QMatrix::zeros(0, sys.columns.len()).kernel_basis()
    } else {
        mat.kernel_basis()
    };
    let split = r_layout.len();
    // keep vectors whose R-parts are independent
    let mut chosen: Vec<(WeylMatrix, WeylMatrix)> = Vec::new();
    let mut r_parts: Vec<Vec<Scalar>> = Vec::new();
    for v in kernel {
        let (rv, xv) = v.split_at(split);
        if rv.iter().all(Zero::is_zero) {
            continue;
        }
        let mut trial = r_parts.clone();
        trial.push(rv.to_vec());
        if QMatrix::from_rows(trial.clone()).map(|m| m.rank()).unwrap_or(0) == trial.len() {
            r_parts = trial;
            chosen.push((unpack(&r_layout, rv, na, nb), unpack(&x_layout, xv, na, nb)));
        }
    }
    chosen
}

/// Dense truncated isomorphism search for presentations without unit pivots.
pub fn presented_iso_search(a: &PresentedModule, b: &PresentedModule, n: usize) -> Option<IsoWitness> {
    let (na, nb) = (a.n(), b.n());
    for degree in 0..=n {
        let forward = presented_hom_basis(a, b, degree);
        let backward = presented_hom_basis(b, a, degree);
        if forward.is_empty() || backward.is_empty() {
            continue;
        }
        for coeffs in dense_candidates(forward.len()) {
            let mut r = WeylMatrix::zeros(na, nb);
            let mut x = WeylMatrix::zeros(na, nb);
            for ((rk, xk), c) in forward.iter().zip(&coeffs) {
                let cw = WeylMatrix::from_qmatrix(&QMatrix::from_rows(vec![vec![c.clone()]]).expect("1x1"));
                let scale = |m: &WeylMatrix| scale_matrix(m, &cw[(0, 0)]);
                r = &r + &scale(rk);
                x = &x + &scale(xk);
            }
            let bound = 2 * degree;
            // equations: (R S - I) = Y Delta_a  [na*na]  and  (S R - I) = Y' Delta_b  [nb*nb]
            let first = na * na;
            let mut sys = WeylSystem::new(first + nb * nb);
            for (s, _) in &backward {
                let rs = &r * s;
                let sr = s * &r;
                let mut col = Vec::new();
                for i in 0..na {
                    for j in 0..na {
                        col.push((i * na + j, rs[(i, j)].clone()));
                    }
                }
                for i in 0..nb {
                    for j in 0..nb {
                        col.push((first + i * nb + j, sr[(i, j)].clone()));
                    }
                }
                sys.push(col);
            }
            let y_layout = sys.push_matrix_unknown(na, na, bound, |i, k, m| {
                (0..na).map(|j| (i * na + j, -&(m * &a.delta[(k, j)]))).collect()
            });
            let yb_layout = sys.push_matrix_unknown(nb, nb, bound, |i, k, m| {
                (0..nb).map(|j| (first + i * nb + j, -&(m * &b.delta[(k, j)]))).collect()
            });
            let mut rhs = vec![WeylElement::zero(); first + nb * nb];
            for i in 0..na {
                rhs[i * na + i] = WeylElement::one();
            }
            for i in 0..nb {
                rhs[first + i * nb + i] = WeylElement::one();
            }
            let (mat, vec_b) = sys.assemble(&rhs);
            let Ok(Some(sol)) = mat.solve(&vec_b) else {
                continue;
            };
            let k = backward.len();
            let mut s = WeylMatrix::zeros(nb, na);
            let mut xb = WeylMatrix::zeros(nb, na);
            for ((sk, xk), c) in backward.iter().zip(&sol[..k]) {
                let c = WeylElement::constant(c.clone());
                s = &s + &scale_matrix(sk, &c);
                xb = &xb + &scale_matrix(xk, &c);
            }
            let ya_len = y_layout.len();
            let witness = IsoWitness {
                source: a.clone(),
                target: b.clone(),
                forward: r.clone(),
                backward: s,
                forward_lift: x.clone(),
                backward_lift: xb,
                source_homotopy: unpack(&y_layout, &sol[k..k + ya_len], na, na),
                target_homotopy: unpack(&yb_layout, &sol[k + ya_len..], nb, nb),
                degree,
            };
            if witness.verify() {
                return Some(witness);
            }
        }
    }
    None
}

fn scale_matrix(m: &WeylMatrix, c: &WeylElement) -> WeylMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = c * &m[(i, j)];
        }
    }
    out
}

/// Cyclic generator search for a presentation with no unit pivot: tries
/// each standard generator, takes its smallest annihilator of degree `<= n`
/// and checks the induced map with the dense search.
fn generator_search(m: &PresentedModule, n: usize) -> Option<(CyclicModule, IsoWitness)> {
    let size = m.n();
    for k in 0..size {
        // p e_k = X Delta, unknowns p (degree <= n) and X (1 x size, degree <= n)
        let mut sys = WeylSystem::new(size);
        let p_basis = truncated_monomials(n);
        for mono in &p_basis {
            sys.push(vec![(k, WeylElement::monomial(scalar::one(), *mono))]);
        }
        sys.push_matrix_unknown(1, size, n, |_, l, e| {
            (0..size).map(|j| (j, -&(e * &m.delta[(l, j)]))).collect()
        });
        let (mat, _) = sys.assemble(&[]);
        let kernel = mat.kernel_basis();
        let parts: Vec<Vec<Scalar>> = kernel
            .iter()
            .map(|v| v[..p_basis.len()].iter().rev().cloned().collect())
            .filter(|v: &Vec<Scalar>| v.iter().any(|x| !x.is_zero()))
            .collect();
        if parts.is_empty() {
            continue;
        }
        let echelon = QMatrix::from_rows(parts).expect("rectangular").rref();
        let last = echelon.rank.checked_sub(1)?;
        let coeffs: Vec<Scalar> = echelon.reduced.row(last).iter().rev().cloned().collect();
        let p = combine(&p_basis, &coeffs);
        let cyclic = CyclicModule { p };
        if let Some(w) = presented_iso_search(m, &cyclic.presented(), n) {
            return Some((cyclic, w));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_weyl;

    fn w(s: &str) -> WeylElement {
        parse_weyl(s).unwrap()
    }

    fn cyc(s: &str) -> CyclicModule {
        CyclicModule::new(w(s)).unwrap()
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(truncated_monomials(0), vec![Monomial::ONE]);
        assert_eq!(truncated_monomials(1).len(), 3);
        assert_eq!(truncated_monomials(12).len(), 91);
    }

    #[test]
    fn stabilization_rule() {
        assert_eq!(stabilization_point(&[1, 0, 0, 0, 0]), Some(3));
        assert_eq!(stabilization_point(&[1, 1, 1]), Some(2));
        assert_eq!(stabilization_point(&[1, 2, 2]), None);
        assert_eq!(stabilization_point(&[]), None);
    }

    #[test]
    fn hom_dimensions() {
        assert_eq!(hom_search(&cyc("d"), &cyc("d"), 6).dimension, 1);
        assert_eq!(hom_search(&cyc("d"), &cyc("t"), 6).dimension, 0);
        let h = hom_search(&cyc("t*d - 1"), &cyc("d"), 6);
        assert!(h.dimension >= 1);
        for r in &h.basis {
            assert!(is_hom(&w("t*d - 1"), &w("d"), r));
        }
    }

    #[test]
    fn shift_isomorphism() {
        let wit = cyclic_iso_witness(&w("t*d - 1/2"), &w("t*d - 3/2"), 4).expect("witness");
        assert!(wit.verify());
    }

    #[test]
    fn no_witness_between_m1_and_m2() {
        assert!(cyclic_iso_witness(&w("d"), &w("t"), 8).is_none());
    }

    #[test]
    fn identity_witness() {
        let m = cyc("t*d + 7").presented();
        let wit = iso_witness(&m, &m, 3).unwrap();
        assert!(wit.verify());
        assert_eq!(wit.forward, WeylMatrix::identity(1));
    }

    #[test]
    fn elimination_reaches_cyclic_form() {
        let m = PresentedModule::new(WeylMatrix::parse_rows(&[vec!["d".into(), "-1".into()], vec!["-1".into(), "t".into()]]).unwrap()).unwrap();
        let (c, wit) = cyclic_identify(&m, 4).unwrap();
        assert!(wit.verify());
        assert_eq!(c.p, w("t*d - 1"));
    }

    #[test]
    fn block_diagonal_split() {
        let m = PresentedModule::new(WeylMatrix::parse_rows(&[vec!["d".into(), "0".into()], vec!["0".into(), "t".into()]]).unwrap()).unwrap();
        assert!(cyclic_identify(&m, 4).is_none());
        let dec = decompose(&m);
        let parts = dec.cyclic_summands().unwrap();
        assert_eq!(parts, vec![cyc("d"), cyc("t")]);
        assert!(dec.witness.verify());
    }

    #[test]
    fn direct_sums_match_up_to_order() {
        let a = PresentedModule::direct_sum(&[cyc("d").presented(), cyc("t").presented()]);
        let b = PresentedModule::direct_sum(&[cyc("t").presented(), cyc("2*d").presented()]);
        let wit = iso_witness(&a, &b, 2).unwrap();
        assert!(wit.verify());
    }

    #[test]
    fn dense_search_handles_scalar_change() {
        // P Delta Q with non-permutation scalars: no unit pivots survive
        let base = PresentedModule::direct_sum(&[cyc("d").presented(), cyc("t").presented()]);
        let p = QMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        let q = QMatrix::from_ints(&[&[1, 0], &[1, 1]]);
        let mixed = IsoWitness::scalar_change(&base, &p, &q).unwrap().target;
        assert!(find_unit(&mixed.delta).is_none());
        let wit = presented_iso_search(&mixed, &base, 1).expect("degree-0 witness");
        assert!(wit.verify());
    }

    #[test]
    fn module_json() {
        let spec: ModuleSpec = serde_json::from_str(r#"{"type":"cyclic","p":"t*d - 1"}"#).unwrap();
        assert_eq!(spec.clone().into_module().unwrap(), cyc("t*d - 1").presented());
        let spec: ModuleSpec = serde_json::from_str(r#"{"type":"presented","n":2,"delta":[["d","-1"],["0","t"]]}"#).unwrap();
        let m = spec.into_module().unwrap();
        assert_eq!(m.n(), 2);
        let back = serde_json::to_string(&ModuleSpec::from_module(&m)).unwrap();
        assert_eq!(back, r#"{"type":"presented","n":2,"delta":[["d","-1"],["0","t"]]}"#);
        assert!(serde_json::from_str::<ModuleSpec>(r#"{"type":"cyclic","p":"0"}"#).unwrap().into_module().is_err());
    }
}
