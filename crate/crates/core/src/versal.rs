//! The versal family over `S` and its specializations `M_T = M_S (x)_S T`.
//!
//! `d^S` is stored as terms `c * (.w) (x) h` acting on `D (x) S` by
//! `d(P (x) x) = sum c (P w) (x) (h x)`. On an `S`-module `T` with basis
//! `v_1..v_n` this becomes right multiplication on row vectors by
//! `Delta[k][l] = sum c w rho(h)[l][k]`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::dmatrix::WeylMatrix;
use crate::dmod::{cyclic_identify, decompose, iso_witness, CyclicModule, IsoWitness, ModuleSpec, PresentedModule};
use crate::hull::{standard_hull, Path, PathElement, PointedAlgebra};
use crate::linalg::QMatrix;
use crate::rep::{validate, Representation};
use crate::scalar::{self, Scalar};
use crate::weyl::WeylElement;

#[derive(Clone, Debug, PartialEq)]
pub struct VersalTerm {
    pub coefficient: Scalar,
    pub multiplier: WeylElement,
    pub element: PathElement,
}

#[derive(Clone, Debug)]
pub struct VersalDifferential {
    pub algebra: PointedAlgebra,
    pub terms: Vec<VersalTerm>,
}

/// An element of `D (x) S`: a Weyl coefficient per path.
pub type TensorElement = BTreeMap<Path, WeylElement>;

impl VersalDifferential {
    /// `(.d) (x) e1 + (.t) (x) e2 - (.1) (x) s12 - (.1) (x) s21`.
    pub fn standard() -> Self {
        let algebra = standard_hull();
        let term = |c: i64, w: WeylElement, h: PathElement| VersalTerm {
            coefficient: scalar::int(c),
            multiplier: w,
            element: h,
        };
        let terms = vec![
            term(1, WeylElement::d(), PathElement::idempotent(0)),
            term(1, WeylElement::t(), PathElement::idempotent(1)),
            term(-1, WeylElement::one(), PathElement::arrow(&algebra, 0)),
            term(-1, WeylElement::one(), PathElement::arrow(&algebra, 1)),
        ];
        VersalDifferential { algebra, terms }
    }

    /// `d(P (x) x)`.
    pub fn apply(&self, p: &WeylElement, x: &PathElement) -> TensorElement {
        let mut out = TensorElement::new();
        for term in &self.terms {
            let coefficient = (p * &term.multiplier).scale(&term.coefficient);
            for (path, c) in term.element.mul(&self.algebra, x).terms() {
                let entry = out.entry(path.clone()).or_insert_with(WeylElement::zero);
                *entry = &*entry + &coefficient.scale(c);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Presentation of `M_T`.
    pub fn specialize(&self, t: &Representation) -> PresentedModule {
        let n = t.n();
        let identity = QMatrix::identity(n);
        let projections = [t.e1.clone(), &identity - &t.e1];
        let arrows = [t.s12.clone(), t.s21.clone()];
        let mut delta = WeylMatrix::zeros(n, n);
        for term in &self.terms {
            let rho = term.element.evaluate(&projections, &arrows);
            let w = term.multiplier.scale(&term.coefficient);
            for k in 0..n {
                for l in 0..n {
                    if !rho[(l, k)].is_zero() {
                        delta[(k, l)] = &delta[(k, l)] + &w.scale(&rho[(l, k)]);
                    }
                }
            }
        }
        PresentedModule { delta }
    }

    pub fn describe(&self) -> String {
        self.terms
            .iter()
            .enumerate()
            .map(|(k, term)| {
                let sign = if scalar::is_negative(&term.coefficient) {
                    "- "
                } else if k == 0 {
                    ""
                } else {
                    "+ "
                };
                let magnitude = if scalar::is_negative(&term.coefficient) {
                    -term.coefficient.clone()
                } else {
                    term.coefficient.clone()
                };
                let coefficient = if magnitude == scalar::one() {
                    String::new()
                } else {
                    format!("{}*", scalar::format_scalar(&magnitude))
                };
                format!("{sign}{coefficient}(.{}) (x) {}", term.multiplier, term.element.display(&self.algebra))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn specialize(t: &Representation) -> PresentedModule {
    VersalDifferential::standard().specialize(t)
}

/// A module the identification tries, with the shift `m` when it is
/// `D/D(t d - a + m)`.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub module: PresentedModule,
    pub shift: Option<i64>,
}

/// Shifts tried for `D/D(t d - a + m)`, in order.
pub const SHIFTS: [i64; 5] = [0, -1, 1, -2, 2];

fn cyclic_candidate(name: &str, p: WeylElement, shift: Option<i64>) -> Candidate {
    Candidate {
        name: name.to_string(),
        module: CyclicModule::new(p).expect("nonzero").presented(),
        shift,
    }
}

fn euler_candidates(a: &Scalar) -> Vec<Candidate> {
    SHIFTS
        .iter()
        .map(|&m| {
            let p = &(&WeylElement::t() * &WeylElement::d()) - &WeylElement::constant(a - scalar::int(m));
            cyclic_candidate(&format!("D/D({p})"), p, Some(m))
        })
        .collect()
}

fn m1() -> Candidate {
    cyclic_candidate("M1 = D/D(d)", WeylElement::d(), None)
}

fn m2() -> Candidate {
    cyclic_candidate("M2 = D/D(t)", WeylElement::t(), None)
}

fn dt() -> Candidate {
    let p = &WeylElement::d() * &WeylElement::t();
    cyclic_candidate("D/D(d*t)", p, None)
}

#[derive(Clone, Debug, Serialize)]
pub struct Match {
    pub candidate: String,
    pub module: ModuleSpec,
    pub shift: Option<i64>,
    pub witness: IsoWitness,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentificationReport {
    pub presentation: ModuleSpec,
    /// cyclic form found by elimination, if any
    pub cyclic_form: Option<String>,
    /// cyclic summands when the presentation splits
    pub summands: Vec<String>,
    pub candidates: Vec<String>,
    pub max_degree: usize,
    pub status: String,
    #[serde(rename = "match")]
    pub matched: Option<Match>,
}

impl IdentificationReport {
    pub fn is_certified(&self) -> bool {
        self.matched.is_some()
    }

    pub fn matched_name(&self) -> Option<&str> {
        self.matched.as_ref().map(|m| m.candidate.as_str())
    }
}

/// Tries the candidates in order and reports the first certified match.
pub fn identify_against(module: &PresentedModule, candidates: &[Candidate], n: usize) -> IdentificationReport {
    let cyclic_form = cyclic_identify(module, n).map(|(c, _)| c.p.to_string());
    let summands = decompose(module)
        .summands
        .iter()
        .map(|s| match s.as_cyclic() {
            Some(c) => c.p.to_string(),
            None => format!("{:?}", s.delta.to_strings()),
        })
        .collect();
    let matched = candidates.iter().find_map(|c| {
        iso_witness(module, &c.module, n).map(|witness| Match {
            candidate: c.name.clone(),
            module: ModuleSpec::from_module(&c.module),
            shift: c.shift,
            witness,
        })
    });
    let status = match &matched {
        Some(m) => format!("certified: {}", m.candidate),
        None => format!("no certified match up to degree {n}"),
    };
    IdentificationReport {
        presentation: ModuleSpec::from_module(module),
        cyclic_form,
        summands,
        candidates: candidates.iter().map(|c| c.name.clone()).collect(),
        max_degree: n,
        status,
        matched,
    }
}

/// The parameter `a` of `T`: its recorded value, else `tr(S12 S21)` when nonzero.
pub fn euler_parameter(t: &Representation) -> Option<Scalar> {
    if let Some(a) = t.params.values().next() {
        return Some(a.clone());
    }
    let product = &t.s12 * &t.s21;
    let trace: Scalar = (0..t.n()).map(|i| product[(i, i)].clone()).sum();
    (trace != scalar::zero()).then_some(trace)
}

pub fn specialization_candidates(t: &Representation) -> Vec<Candidate> {
    let mut out = vec![m1(), m2(), dt()];
    if let Some(a) = euler_parameter(t) {
        out.extend(euler_candidates(&a));
    }
    out
}

pub fn identify_specialization(t: &Representation, n: usize) -> IdentificationReport {
    identify_against(&specialize(t), &specialization_candidates(t), n)
}

/// A point `(alpha, beta)` of `Spec k[s12, s21]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativePoint {
    pub alpha: Scalar,
    pub beta: Scalar,
}

impl CommutativePoint {
    pub fn new(alpha: Scalar, beta: Scalar) -> Self {
        CommutativePoint { alpha, beta }
    }

    /// The same point viewed as a 2-dimensional module over `S`.
    pub fn as_representation(&self) -> Representation {
        let mut s12 = QMatrix::zeros(2, 2);
        let mut s21 = QMatrix::zeros(2, 2);
        s12[(0, 1)] = self.alpha.clone();
        s21[(1, 0)] = self.beta.clone();
        validate(QMatrix::from_ints(&[&[1, 0], &[0, 0]]), s12, s21).expect("valid for every point")
    }
}

/// Presentation of `M_S (x)_S S/(s12 - alpha, s21 - beta)` for the
/// commutative family of `D/Dd + D/Dt`.
pub fn commutative_presentation(pt: &CommutativePoint) -> PresentedModule {
    let c = |x: &Scalar| WeylElement::constant(-x.clone());
    PresentedModule {
        delta: WeylMatrix::from_rows(vec![
            vec![WeylElement::d(), c(&pt.beta)],
            vec![c(&pt.alpha), WeylElement::t()],
        ])
        .expect("rectangular"),
    }
}

pub fn commutative_candidates(pt: &CommutativePoint) -> Vec<Candidate> {
    let sum = Candidate {
        name: "M1 + M2".into(),
        module: PresentedModule::direct_sum(&[m1().module, m2().module]),
        shift: None,
    };
    let mut out = vec![sum, dt()];
    out.extend(euler_candidates(&(&pt.alpha * &pt.beta)));
    out
}

pub fn commutative_specialize(pt: &CommutativePoint, n: usize) -> (PresentedModule, IdentificationReport) {
    let module = commutative_presentation(pt);
    let report = identify_against(&module, &commutative_candidates(pt), n);
    (module, report)
}
