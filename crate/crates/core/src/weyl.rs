//! Normal-form arithmetic in the first Weyl algebra `D = k<t, d>/(d t - t d - 1)`.
//!
//! Every element is stored in the monomial basis `t^i d^j` (all `t` to the
//! left). Products are brought back to that basis with the reordering rule
//!
//! ```text
//! d^b t^c = sum_k  C(b,k) C(c,k) k!  t^(c-k) d^(b-k)
//! ```
//!
//! Monomials are ordered by total degree `i + j`, then by the power of `d`;
//! this is the order used for printing and for left division.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::{self, Scalar};

/// The monomial `t^t d^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub t: u32,
    pub d: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { t: 0, d: 0 };

    pub fn new(t: u32, d: u32) -> Self {
        Monomial { t, d }
    }

    pub fn degree(self) -> u32 {
        self.t + self.d
    }

    /// `self = quotient * other` on exponents, if possible.
    pub fn divide(self, other: Monomial) -> Option<Monomial> {
        (self.t >= other.t && self.d >= other.d).then(|| Monomial::new(self.t - other.t, self.d - other.d))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.d.cmp(&other.d))
            .then(self.t.cmp(&other.t))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of `D` in normal form. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeylElement {
    terms: BTreeMap<Monomial, Scalar>,
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement::default()
    }

    pub fn one() -> Self {
        WeylElement::constant(scalar::one())
    }

    pub fn t() -> Self {
        WeylElement::monomial(scalar::one(), Monomial::new(1, 0))
    }

    pub fn d() -> Self {
        WeylElement::monomial(scalar::one(), Monomial::new(0, 1))
    }

    pub fn constant(c: Scalar) -> Self {
        WeylElement::monomial(c, Monomial::ONE)
    }

    pub fn monomial(c: Scalar, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        WeylElement { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut out = WeylElement::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The scalar value, if the element is a constant (including zero).
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(scalar::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn coefficient(&self, m: Monomial) -> Scalar {
        self.terms.get(&m).cloned().unwrap_or_else(scalar::zero)
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(Monomial, &Scalar)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    /// Total degree in the Bernstein filtration; `None` for zero.
    pub fn bernstein_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return WeylElement::zero();
        }
        WeylElement {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = WeylElement::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Left division by `q`: returns `(m, r)` with `self = m*q + r` and no
    /// monomial of `r` divisible by the leading monomial of `q`.
    ///
    /// `{q}` is a Groebner basis of the left ideal `Dq` (leading monomials
    /// multiply), so `r` is the unique normal form of `self` modulo `Dq`.
    pub fn left_divide(&self, q: &WeylElement) -> (WeylElement, WeylElement) {
        let (lead, lead_coeff) = q.leading().expect("division by zero Weyl element");
        let lead_coeff = lead_coeff.clone();
        let mut work = self.clone();
        let mut quotient = WeylElement::zero();
        let mut remainder = WeylElement::zero();
        while let Some((m, c)) = work.terms.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            match m.divide(lead) {
                Some(shift) => {
                    let factor = WeylElement::monomial(&c / &lead_coeff, shift);
                    work = &work - &(&factor * q);
                    quotient = &quotient + &factor;
                }
                None => {
                    work.terms.remove(&m);
                    remainder.add_term(m, c);
                }
            }
        }
        (quotient, remainder)
    }

    /// Normal form modulo the left ideal `Dq`.
    pub fn reduce_mod(&self, q: &WeylElement) -> WeylElement {
        self.left_divide(q).1
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `(t^a d^b)(t^c d^e)` expanded in normal form.
fn monomial_product(x: Monomial, y: Monomial) -> Vec<(Monomial, BigInt)> {
    (0..=x.d.min(y.t))
        .map(|k| {
            let c = binomial(x.d, k) * binomial(y.t, k) * factorial(k);
            (Monomial::new(x.t + y.t - k, x.d + y.d - k), c)
        })
        .collect()
}

impl Add for &WeylElement {
    type Output = WeylElement;
    fn add(self, rhs: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;
    fn sub(self, rhs: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        WeylElement {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Mul for &WeylElement {
    type Output = WeylElement;
    fn mul(self, rhs: &WeylElement) -> WeylElement {
        let mut out = WeylElement::zero();
        for (mx, cx) in &self.terms {
            for (my, cy) in &rhs.terms {
                let c = cx * cy;
                for (m, k) in monomial_product(*mx, *my) {
                    out.add_term(m, &c * Scalar::from_integer(k));
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for WeylElement {
            type Output = WeylElement;
            fn $method(self, rhs: WeylElement) -> WeylElement {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn write_monomial(f: &mut fmt::Formatter<'_>, m: Monomial) -> fmt::Result {
    let mut factors = Vec::new();
    match m.t {
        0 => {}
        1 => factors.push("t".to_string()),
        k => factors.push(format!("t^{k}")),
    }
    match m.d {
        0 => {}
        1 => factors.push("d".to_string()),
        k => factors.push(format!("d^{k}")),
    }
    write!(f, "{}", factors.join("*"))
}

/// Canonical text form: terms by descending degree, `d`-power breaking ties;
/// accepted back by [`crate::parse::parse_weyl`].
impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = scalar::is_negative(c);
            let magnitude = if negative { -c.clone() } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{}", scalar::format_scalar(&magnitude))?;
            } else if magnitude.is_one() {
                write_monomial(f, *m)?;
            } else {
                write!(f, "{}*", scalar::format_scalar(&magnitude))?;
                write_monomial(f, *m)?;
            }
        }
        Ok(())
    }
}
