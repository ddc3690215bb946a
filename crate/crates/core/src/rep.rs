//! Finite-dimensional modules over the algebraization `S`: matrices
//! `(E1, S12, S21)` satisfying the relations of the hull, classified up to
//! simultaneous conjugation.
//!
//! `S` is the path algebra of the oriented 2-cycle, so an `n`-dimensional
//! module is a quiver representation `V1 <-A- V2`, `V1 -B-> V2` with
//! `A = s12`, `B = s21`. Its indecomposables are strings (uniserial chains
//! alternating between the two points) and bands `A = I, B = J_k(lambda)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dmod::simplex_points;
use crate::error::{Error, Result};
use crate::hull::standard_hull;
use crate::linalg::QMatrix;
use crate::scalar::{self, Scalar};

/// Parameter samples used to check one-parameter families.
pub fn default_samples() -> Vec<Scalar> {
    vec![scalar::int(1), scalar::int(-1), scalar::int(2), scalar::frac(1, 2)]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub e1: QMatrix,
    pub s12: QMatrix,
    pub s21: QMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty", with = "param_map")]
    pub params: BTreeMap<String, Scalar>,
}

mod param_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Scalar>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k, scalar::format_scalar(v))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, Scalar>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| scalar::parse_scalar(&v).map(|x| (k, x)).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Representation {
    pub fn n(&self) -> usize {
        self.e1.rows()
    }

    pub fn matrices(&self) -> [&QMatrix; 3] {
        [&self.e1, &self.s12, &self.s21]
    }

    /// `G T G^-1`.
    pub fn conjugate(&self, g: &QMatrix) -> Result<Representation> {
        let g_inv = g.inverse().ok_or_else(|| Error::Invalid("conjugating matrix is singular".into()))?;
        let c = |m: &QMatrix| &(g * m) * &g_inv;
        Ok(Representation {
            e1: c(&self.e1),
            s12: c(&self.s12),
            s21: c(&self.s21),
            label: None,
            params: BTreeMap::new(),
        })
    }

    pub fn direct_sum(&self, other: &Representation) -> Representation {
        let block = |a: &QMatrix, b: &QMatrix| {
            let (n, m) = (a.rows(), b.rows());
            let mut out = QMatrix::zeros(n + m, n + m);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] = a[(i, j)].clone();
                }
            }
            for i in 0..m {
                for j in 0..m {
                    out[(n + i, n + j)] = b[(i, j)].clone();
                }
            }
            out
        };
        Representation {
            e1: block(&self.e1, &other.e1),
            s12: block(&self.s12, &other.s12),
            s21: block(&self.s21, &other.s21),
            label: None,
            params: BTreeMap::new(),
        }
    }

    /// Re-runs `validate` on the stored matrices.
    pub fn check(&self) -> Result<()> {
        validate(self.e1.clone(), self.s12.clone(), self.s21.clone()).map(|_| ())
    }
}

/// Checks the relations of `S` and reports every violated one with its residual.
pub fn validate(e1: QMatrix, s12: QMatrix, s21: QMatrix) -> Result<Representation> {
    let n = e1.rows();
    for (name, m) in [("E1", &e1), ("S12", &s12), ("S21", &s21)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{name} is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    let violated: Vec<String> = standard_hull()
        .residuals(&[e1.clone()], &[s12.clone(), s21.clone()])
        .into_iter()
        .filter(|(_, r)| !r.is_zero())
        .map(|(name, r)| format!("{name} fails with residual {}", matrix_string(&r)))
        .collect();
    if !violated.is_empty() {
        return Err(Error::RelationViolation(violated));
    }
    Ok(Representation {
        e1,
        s12,
        s21,
        label: None,
        params: BTreeMap::new(),
    })
}

fn matrix_string(m: &QMatrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(scalar::format_scalar).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

/// `T` in the basis `image(E1) + ker(E1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverForm {
    /// `(dim V1, dim V2)`
    pub dims: (usize, usize),
    /// `V2 -> V1`, the block of `S12`
    pub a: QMatrix,
    /// `V1 -> V2`, the block of `S21`
    pub b: QMatrix,
    /// `G` with `G T G^-1` block-shaped
    pub change: QMatrix,
}

pub fn quiver_form(t: &Representation) -> QuiverForm {
    let n = t.n();
    let echelon = t.e1.rref();
    let mut columns: Vec<Vec<Scalar>> = echelon.pivots.iter().map(|&j| t.e1.column(j)).collect();
    let p = columns.len();
    columns.extend(t.e1.kernel_basis());
    let basis = QMatrix::from_columns(&columns, n);
    let change = basis.inverse().expect("image and kernel of an idempotent are complementary");
    let conj = t.conjugate(&change).expect("invertible");
    let q = n - p;
    let mut a = QMatrix::zeros(p, q);
    let mut b = QMatrix::zeros(q, p);
    for i in 0..p {
        for j in 0..q {
            a[(i, j)] = conj.s12[(i, p + j)].clone();
            b[(j, i)] = conj.s21[(p + j, i)].clone();
        }
    }
    QuiverForm { dims: (p, q), a, b, change }
}

/// Inverse of `quiver_form` up to the base change.
pub fn from_quiver(a: &QMatrix, b: &QMatrix) -> Result<Representation> {
    let (p, q) = (a.rows(), a.cols());
    if b.rows() != q || b.cols() != p {
        return Err(Error::DimensionMismatch("B must be the transpose shape of A".into()));
    }
    let n = p + q;
    let mut e1 = QMatrix::zeros(n, n);
    let mut s12 = QMatrix::zeros(n, n);
    let mut s21 = QMatrix::zeros(n, n);
    for i in 0..p {
        e1[(i, i)] = scalar::one();
        for j in 0..q {
            s12[(i, p + j)] = a[(i, j)].clone();
            s21[(p + j, i)] = b[(j, i)].clone();
        }
    }
    validate(e1, s12, s21)
}

/// Basis of `{G : G X = X' G}` for the three generators.
pub fn intertwiners(t: &Representation, u: &Representation) -> Vec<QMatrix> {
    let n = t.n();
    let mut system = QMatrix::zeros(3 * n * n, n * n);
    for (k, (x, y)) in t.matrices().iter().zip(u.matrices()).enumerate() {
        for i in 0..n {
            for j in 0..n {
                let row = k * n * n + i * n + j;
                for l in 0..n {
                    system[(row, i * n + l)] += &x[(l, j)];
                    system[(row, l * n + j)] -= &y[(i, l)];
                }
            }
        }
    }
    system
        .kernel_basis()
        .into_iter()
        .map(|v| QMatrix::from_rows(v.chunks(n).map(<[Scalar]>::to_vec).collect()).expect("square"))
        .collect()
}

fn combination(basis: &[QMatrix], point: &[u32]) -> QMatrix {
    let n = basis[0].rows();
    basis
        .iter()
        .zip(point)
        .filter(|(_, &x)| x != 0)
        .fold(QMatrix::zeros(n, n), |acc, (m, &x)| &acc + &m.scale(&scalar::int(x as i64)))
}

/// An invertible `G` with `G T G^-1 = T'`, or `None`.
///
/// `det` restricted to the intertwiner space is a polynomial of degree `n`,
/// so it is nonzero somewhere iff it is nonzero on the grid
/// `{x in N^d : sum(x) <= n}`, which points are visited in a fixed order.
pub fn are_conjugate(t: &Representation, u: &Representation) -> Option<QMatrix> {
    if t.n() != u.n() {
        return None;
    }
    if t.n() == 0 {
        return Some(QMatrix::identity(0));
    }
    let basis = intertwiners(t, u);
    if basis.is_empty() {
        return None;
    }
    simplex_points(basis.len(), t.n() as u32)
        .into_iter()
        .map(|x| combination(&basis, &x))
        .find(|g| g.determinant().map(|d| !d.is_zero()).unwrap_or(false))
}

fn matrix_algebra_dimension(generators: &[&QMatrix], n: usize) -> usize {
    let flatten = |m: &QMatrix| m.entries().to_vec();
    let mut basis: Vec<QMatrix> = vec![QMatrix::identity(n)];
    let mut rows: Vec<Vec<Scalar>> = vec![flatten(&basis[0])];
    let mut frontier = basis.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in generators {
                let product = *g * m;
                let mut trial = rows.clone();
                trial.push(flatten(&product));
                if QMatrix::from_rows(trial.clone()).expect("rectangular").rank() == trial.len() {
                    rows = trial;
                    basis.push(product.clone());
                    next.push(product);
                }
            }
        }
        frontier = next;
    }
    rows.len()
}

/// Dimension of the unital algebra generated by `E1, S12, S21`.
pub fn generated_algebra_dimension(t: &Representation) -> usize {
    matrix_algebra_dimension(&t.matrices(), t.n())
}

/// Simple over the algebraic closure: the generated algebra is all of `M_n`.
pub fn is_simple(t: &Representation) -> bool {
    t.n() > 0 && generated_algebra_dimension(t) == t.n() * t.n()
}

/// A basis of a proper nonzero submodule, searched among dimension 1 and
/// codimension 1; complete for `n <= 3`.
pub fn find_proper_submodule(t: &Representation) -> Result<Option<Vec<Vec<Scalar>>>> {
    let n = t.n();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if n <= 1 {
        return Ok(None);
    }
    let identity = QMatrix::identity(n);
    let shifted = &t.e1 - &identity;
    let common_vector = |a: &QMatrix, b: &QMatrix, e: &QMatrix| -> Option<Vec<Scalar>> {
        let stacked = a.vstack(b).and_then(|m| m.vstack(e)).expect("same width");
        stacked.kernel_basis().into_iter().next()
    };
    for e in [&t.e1, &shifted] {
        if let Some(v) = common_vector(&t.s12, &t.s21, e) {
            return Ok(Some(vec![v]));
        }
    }
    // a codimension-1 submodule is the kernel of a common eigenvector of the transposes
    for e in [t.e1.transpose(), shifted.transpose()] {
        if let Some(l) = common_vector(&t.s12.transpose(), &t.s21.transpose(), &e) {
            let functional = QMatrix::from_rows(vec![l]).expect("row");
            return Ok(Some(functional.kernel_basis()));
        }
    }
    Ok(None)
}

/// Whether `End(T)` is local: decided by testing, on the unisolvent grid,
/// that every endomorphism has a single eigenvalue.
pub fn is_indecomposable(t: &Representation) -> bool {
    let n = t.n();
    if n == 0 {
        return false;
    }
    let basis = intertwiners(t, t);
    let nf = scalar::int(n as i64);
    simplex_points(basis.len(), n as u32).into_iter().all(|x| {
        let g = combination(&basis, &x);
        let trace: Scalar = (0..n).map(|i| g[(i, i)].clone()).sum();
        let lambda = trace / &nf;
        let mut shifted = g.clone();
        for i in 0..n {
            shifted[(i, i)] -= &lambda;
        }
        // a single eigenvalue means g - lambda is nilpotent
        let charpoly = shifted.charpoly().expect("square");
        charpoly[..n].iter().all(Zero::is_zero)
    })
}

/// An indecomposable summand type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Summand {
    /// chain `x_0 -> x_1 -> ...` of `len` vectors, `x_0` at point `start`
    String { start: u8, len: usize },
    /// `A = I`, `B = J_size(lambda)` with `lambda` a parameter
    Band { size: usize },
}

impl Summand {
    fn vertex(start: u8, k: usize) -> u8 {
        if k % 2 == 0 {
            start
        } else {
            3 - start
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match *self {
            Summand::String { start, len } => {
                let at1 = (0..len).filter(|&k| Self::vertex(start, k) == 1).count();
                (at1, len - at1)
            }
            Summand::Band { size } => (size, size),
        }
    }

    pub fn dimension(&self) -> usize {
        let (p, q) = self.dims();
        p + q
    }

    fn is_simple_at(&self, point: u8) -> bool {
        *self == Summand::String { start: point, len: 1 }
    }

    /// Sort key placing simples at point 1 first and at point 2 last.
    fn order_key(&self) -> (u8, usize, usize) {
        match *self {
            _ if self.is_simple_at(1) => (0, 0, 0),
            _ if self.is_simple_at(2) => (3, 0, 0),
            Summand::String { start, len } => (1, len, start as usize),
            Summand::Band { size } => (2, size, 0),
        }
    }
}

/// A template entry: a constant or one of the family parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Entry {
    Const(Scalar),
    Param(usize),
}

#[derive(Clone, Debug)]
struct Template {
    n: usize,
    e1: Vec<Entry>,
    s12: Vec<Entry>,
    s21: Vec<Entry>,
}

impl Template {
    fn build(summands: &[Summand]) -> Template {
        let n: usize = summands.iter().map(Summand::dimension).sum();
        // (summand, local vector, point) in basis order: point 1 vectors, then point 2
        let mut vectors: Vec<(usize, usize, u8)> = Vec::new();
        for point in [1u8, 2] {
            for (s, summand) in summands.iter().enumerate() {
                match *summand {
                    Summand::String { start, len } => {
                        for k in 0..len {
                            if Summand::vertex(start, k) == point {
                                vectors.push((s, k, point));
                            }
                        }
                    }
                    Summand::Band { size } => {
                        for k in 0..size {
                            vectors.push((s, k, point));
                        }
                    }
                }
            }
        }
        let index = |s: usize, k: usize, point: u8| {
            vectors.iter().position(|&v| v == (s, k, point)).expect("vector")
        };
        let zero = || vec![Entry::Const(scalar::zero()); n * n];
        let (mut e1, mut s12, mut s21) = (zero(), zero(), zero());
        for (i, v) in vectors.iter().enumerate() {
            if v.2 == 1 {
                e1[i * n + i] = Entry::Const(scalar::one());
            }
        }
        let mut param = 0;
        for (s, summand) in summands.iter().enumerate() {
            match *summand {
                Summand::String { start, len } => {
                    for k in 0..len.saturating_sub(1) {
                        let from = Summand::vertex(start, k);
                        let (src, dst) = (index(s, k, from), index(s, k + 1, 3 - from));
                        let target = if from == 2 { &mut s12 } else { &mut s21 };
                        target[dst * n + src] = Entry::Const(scalar::one());
                    }
                }
                Summand::Band { size } => {
                    for k in 0..size {
                        let (x, y) = (index(s, k, 1), index(s, k, 2));
                        s12[x * n + y] = Entry::Const(scalar::one());
                        s21[y * n + x] = Entry::Param(param);
                        if k > 0 {
                            s21[index(s, k - 1, 2) * n + x] = Entry::Const(scalar::one());
                        }
                    }
                    param += 1;
                }
            }
        }
        Template { n, e1, s12, s21 }
    }

    fn instantiate(&self, values: &[Scalar]) -> [QMatrix; 3] {
        let n = self.n;
        let fill = |entries: &[Entry]| {
            let mut m = QMatrix::zeros(n, n);
            for (k, e) in entries.iter().enumerate() {
                m[(k / n, k % n)] = match e {
                    Entry::Const(c) => c.clone(),
                    Entry::Param(p) => values[*p].clone(),
                };
            }
            m
        };
        [fill(&self.e1), fill(&self.s12), fill(&self.s21)]
    }

    fn strings(&self, names: &[String]) -> [Vec<Vec<String>>; 3] {
        let n = self.n;
        let render = |entries: &[Entry]| -> Vec<Vec<String>> {
            entries
                .chunks(n.max(1))
                .map(|row| {
                    row.iter()
                        .map(|e| match e {
                            Entry::Const(c) => scalar::format_scalar(c),
                            Entry::Param(p) => names[*p].clone(),
                        })
                        .collect()
                })
                .collect()
        };
        [render(&self.e1), render(&self.s12), render(&self.s21)]
    }
}

/// One isomorphism class, or a family of classes indexed by nonzero parameters.
#[derive(Clone, Debug)]
pub struct Family {
    pub n: usize,
    /// 1-based position in the list for dimension `n`
    pub index: usize,
    pub split: (usize, usize),
    pub params: Vec<String>,
    pub summands: Vec<Summand>,
    pub simple: bool,
    pub indecomposable: bool,
    /// labels of the summands when decomposable
    pub decomposition: Vec<String>,
    template: Template,
}

impl Family {
    pub fn label(&self) -> String {
        label_string(self.n, self.index, &self.params)
    }

    pub fn id(&self) -> String {
        format!("T_{}_{}", self.n, self.index)
    }

    pub fn is_parametric(&self) -> bool {
        !self.params.is_empty()
    }

    pub fn instantiate(&self, values: &[Scalar]) -> Result<Representation> {
        if values.len() != self.params.len() {
            return Err(Error::Invalid(format!(
                "{} takes {} parameter(s), got {}",
                self.label(),
                self.params.len(),
                values.len()
            )));
        }
        if values.iter().any(Zero::is_zero) {
            return Err(Error::Invalid(format!("parameters of {} must be nonzero", self.label())));
        }
        let [e1, s12, s21] = self.template.instantiate(values);
        let mut rep = validate(e1, s12, s21)?;
        rep.label = Some(self.label());
        rep.params = self.params.iter().cloned().zip(values.iter().cloned()).collect();
        Ok(rep)
    }

    /// Instantiates from a `name -> value` map.
    pub fn instantiate_named(&self, values: &BTreeMap<String, Scalar>) -> Result<Representation> {
        let ordered: Result<Vec<Scalar>> = self
            .params
            .iter()
            .map(|p| {
                values
                    .get(p)
                    .cloned()
                    .ok_or_else(|| Error::Invalid(format!("{} needs parameter `{p}`", self.label())))
            })
            .collect();
        self.instantiate(&ordered?)
    }

    /// Parameter tuples drawn from `samples` (every combination).
    pub fn sample_points(&self, samples: &[Scalar]) -> Vec<Vec<Scalar>> {
        let mut points = vec![Vec::new()];
        for _ in &self.params {
            points = points
                .into_iter()
                .flat_map(|p| {
                    samples.iter().map(move |s| {
                        let mut q = p.clone();
                        q.push(s.clone());
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn template_strings(&self) -> [Vec<Vec<String>>; 3] {
        self.template.strings(&self.params)
    }
}

fn label_string(n: usize, index: usize, params: &[String]) -> String {
    let mut parts = vec![n.to_string(), index.to_string()];
    parts.extend(params.iter().cloned());
    format!("T_{{{}}}", parts.join(","))
}

fn param_names(n: usize, family_params: usize, ordinal: usize) -> Vec<String> {
    match (n, family_params) {
        (_, 0) => Vec::new(),
        (2, 1) => vec!["a".into()],
        (3, 1) => vec![if ordinal == 0 { "b".into() } else { "c".into() }],
        _ => (1..=family_params).map(|k| format!("l{k}")).collect(),
    }
}

fn summand_types(n: usize) -> Vec<Summand> {
    let mut types = Vec::new();
    for len in 1..=n {
        for start in [1u8, 2] {
            types.push(Summand::String { start, len });
        }
    }
    for size in 1..=n / 2 {
        types.push(Summand::Band { size });
    }
    types.sort_by_key(Summand::order_key);
    types
}

fn multisets(types: &[Summand], n: usize) -> Vec<Vec<Summand>> {
    fn rec(types: &[Summand], from: usize, remaining: usize, prefix: &mut Vec<Summand>, out: &mut Vec<Vec<Summand>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for (k, t) in types.iter().enumerate().skip(from) {
            if t.dimension() <= remaining {
                prefix.push(*t);
                rec(types, k, remaining - t.dimension(), prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(types, 0, n, &mut Vec::new(), &mut out);
    out
}

fn split_order(n: usize) -> Vec<(usize, usize)> {
    if n == 1 {
        return vec![(1, 0), (0, 1)];
    }
    let mut order = vec![(0, n), (n, 0)];
    order.extend((1..n).map(|p| (p, n - p)));
    order
}

/// All classes of dimension `n` in list order, without flags.
fn enumerate_families(n: usize) -> Vec<Family> {
    let types = summand_types(n);
    let all = multisets(&types, n);
    let mut families = Vec::new();
    let mut param_ordinal = 0;
    for split in split_order(n) {
        let mut group: Vec<(Vec<Summand>, (usize, usize, usize))> = all
            .iter()
            .filter(|m| {
                let (p, q) = m.iter().fold((0, 0), |acc, s| (acc.0 + s.dims().0, acc.1 + s.dims().1));
                (p, q) == split
            })
            .map(|m| {
                let template = Template::build(m);
                let bands = m.iter().filter(|s| matches!(s, Summand::Band { .. })).count();
                let [_, s12, s21] = template.instantiate(&vec![scalar::one(); bands]);
                (m.clone(), (s12.rank(), s21.rank(), bands))
            })
            .collect();
        group.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| {
            let key = |m: &Vec<Summand>| m.iter().map(Summand::order_key).collect::<Vec<_>>();
            key(&a.0).cmp(&key(&b.0))
        }));
        for (summands, (_, _, bands)) in group {
            let params = param_names(n, bands, param_ordinal);
            if bands > 0 {
                param_ordinal += 1;
            }
            families.push(Family {
                n,
                index: families.len() + 1,
                split,
                params,
                template: Template::build(&summands),
                summands,
                simple: false,
                indecomposable: false,
                decomposition: Vec::new(),
            });
        }
    }
    families
}

/// Classification of `n`-dimensional modules.
#[derive(Clone, Debug)]
pub struct ClassificationResult {
    pub n: usize,
    pub samples: Vec<Scalar>,
    pub families: Vec<Family>,
}

impl ClassificationResult {
    pub fn discrete(&self) -> usize {
        self.families.iter().filter(|f| !f.is_parametric()).count()
    }

    pub fn parametric(&self) -> usize {
        self.families.iter().filter(|f| f.is_parametric()).count()
    }

    pub fn by_id(&self, id: &str) -> Option<&Family> {
        self.families.iter().find(|f| f.id() == id)
    }

    /// The family containing `t`, its parameter values, and a `G` with
    /// `G T G^-1 = t` where `T` is the canonical member.
    pub fn identify(&self, t: &Representation) -> Option<(&Family, Vec<Scalar>, QMatrix)> {
        if t.n() != self.n {
            return None;
        }
        let eigenvalues = nonzero_rational_eigenvalues(&(&t.s12 * &t.s21));
        for family in &self.families {
            let candidates: Vec<Vec<Scalar>> = if family.is_parametric() {
                let mut points = vec![Vec::new()];
                for _ in &family.params {
                    points = points
                        .into_iter()
                        .flat_map(|p: Vec<Scalar>| {
                            eigenvalues.iter().map(move |x| {
                                let mut q = p.clone();
                                q.push(x.clone());
                                q
                            })
                        })
                        .collect();
                }
                points
            } else {
                vec![Vec::new()]
            };
            for values in candidates {
                let Ok(canonical) = family.instantiate(&values) else {
                    continue;
                };
                if let Some(g) = are_conjugate(&canonical, t) {
                    return Some((family, values, g));
                }
            }
        }
        None
    }
}

#[derive(Serialize)]
struct FamilyJson {
    label: String,
    id: String,
    split: (usize, usize),
    params: Vec<String>,
    e1: Vec<Vec<String>>,
    s12: Vec<Vec<String>>,
    s21: Vec<Vec<String>>,
    simple: bool,
    indecomposable: bool,
    decomposition: Vec<String>,
}

#[derive(Serialize)]
struct ClassificationJson {
    n: usize,
    samples: Vec<String>,
    discrete: usize,
    parametric: usize,
    simplicity_criterion: &'static str,
    families: Vec<FamilyJson>,
}

impl Serialize for ClassificationResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ClassificationJson {
            n: self.n,
            samples: self.samples.iter().map(scalar::format_scalar).collect(),
            discrete: self.discrete(),
            parametric: self.parametric(),
            simplicity_criterion: "generated matrix algebra has dimension n^2",
            families: self
                .families
                .iter()
                .map(|f| {
                    let [e1, s12, s21] = f.template_strings();
                    FamilyJson {
                        label: f.label(),
                        id: f.id(),
                        split: f.split,
                        params: f.params.clone(),
                        e1,
                        s12,
                        s21,
                        simple: f.simple,
                        indecomposable: f.indecomposable,
                        decomposition: f.decomposition.clone(),
                    }
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Lists the classes of `n`-dimensional modules (exact for `n <= 3`, and
/// over the algebraic closure for `n = 4`), with flags checked at every
/// sample point.
pub fn classify(n: usize, samples: &[Scalar]) -> Result<ClassificationResult> {
    if n == 0 || n > 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    if samples.is_empty() || samples.iter().any(Zero::is_zero) {
        return Err(Error::Invalid("parameter samples must be nonempty and nonzero".into()));
    }
    let mut families = enumerate_families(n);
    let lower: Vec<Vec<Family>> = (0..n).map(|m| if m == 0 { Vec::new() } else { enumerate_families(m) }).collect();
    for family in &mut families {
        let reps: Vec<Representation> = family
            .sample_points(samples)
            .iter()
            .map(|v| family.instantiate(v))
            .collect::<Result<_>>()?;
        family.simple = reps.iter().all(is_simple);
        family.indecomposable = reps.iter().all(is_indecomposable);
        if family.summands.len() > 1 {
            let mut next_param = 0;
            for s in &family.summands {
                let m = s.dimension();
                let sub = lower[m]
                    .iter()
                    .find(|f| f.summands == [*s])
                    .expect("every summand is listed in its own dimension");
                let names: Vec<String> = family.params[next_param..next_param + sub.params.len()].to_vec();
                next_param += sub.params.len();
                family.decomposition.push(label_string(m, sub.index, &names));
            }
        }
    }
    Ok(ClassificationResult {
        n,
        samples: samples.to_vec(),
        families,
    })
}

/// Looks up a family label such as `T_2_6`, `T_{2,6}` or `T_{2,6,a}`.
pub fn family_by_label(label: &str) -> Result<Family> {
    let body = label
        .strip_prefix("T")
        .ok_or_else(|| Error::Invalid(format!("unknown label `{label}`")))?;
    let fields: Vec<&str> = body
        .split(|c: char| c == '_' || c == ',' || c == '{' || c == '}')
        .filter(|s| !s.is_empty())
        .collect();
    let parse = |s: Option<&&str>| s.and_then(|x| x.parse::<usize>().ok());
    let (n, index) = match (parse(fields.first()), parse(fields.get(1))) {
        (Some(n), Some(i)) => (n, i),
        _ => return Err(Error::Invalid(format!("unknown label `{label}`"))),
    };
    if n == 0 || n > 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    let result = classify(n, &default_samples())?;
    result
        .families
        .into_iter()
        .find(|f| f.index == index)
        .ok_or_else(|| Error::Invalid(format!("no class {index} in dimension {n}")))
}

/// Nonzero rational eigenvalues of `m`, ascending, by the rational root theorem.
pub fn nonzero_rational_eigenvalues(m: &QMatrix) -> Vec<Scalar> {
    let coeffs = m.charpoly().expect("square");
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Scalar::from(lcm.clone())).to_integer()).collect();
    while ints.first().is_some_and(Zero::is_zero) {
        ints.remove(0);
    }
    let (Some(constant), Some(lead)) = (ints.first(), ints.last()) else {
        return Vec::new();
    };
    let (Some(c), Some(l)) = (constant.abs().to_u64(), lead.abs().to_u64()) else {
        return Vec::new();
    };
    if c > 1_000_000 || l > 1_000_000 {
        return Vec::new();
    }
    let divisors = |x: u64| -> Vec<u64> { (1..=x).filter(|d| x % d == 0).collect() };
    let mut roots = Vec::new();
    for p in divisors(c) {
        for q in divisors(l) {
            for sign in [1i64, -1] {
                let candidate = Scalar::new(BigInt::from(sign) * BigInt::from(p), BigInt::from(q));
                let value = coeffs
                    .iter()
                    .rev()
                    .fold(Scalar::zero(), |acc, k| acc * &candidate + k);
                if value.is_zero() && !roots.contains(&candidate) {
                    roots.push(candidate);
                }
            }
        }
    }
    roots.sort();
    roots
}
