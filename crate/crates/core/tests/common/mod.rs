#![allow(dead_code)]

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::Rng;

use weyl_deform::linalg::QMatrix;
use weyl_deform::rep::{validate, Representation};
use weyl_deform::scalar::{frac, int, Scalar};
use weyl_deform::{Monomial, WeylElement};

pub fn random_scalar(rng: &mut StdRng) -> Scalar {
    let num = rng.gen_range(-5i64..=5);
    let den = rng.gen_range(1i64..=3);
    frac(num, den)
}

pub fn random_weyl(rng: &mut StdRng, max_degree: u32, terms: usize) -> WeylElement {
    WeylElement::from_terms((0..terms).map(|_| {
        let deg = rng.gen_range(0..=max_degree);
        let d = rng.gen_range(0..=deg);
        (Monomial::new(deg - d, d), random_scalar(rng))
    }))
}

/// Polynomials in `x` as coefficient vectors, lowest degree first.
pub type Poly = Vec<Scalar>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// The action of `P` on `k[x]` with `t = x` and `d = d/dx`, applied
/// monomial by monomial: `t^i d^j f`.
pub fn act(p: &WeylElement, f: &Poly) -> Poly {
    let mut out: Poly = Vec::new();
    for (m, c) in p.terms() {
        let mut g = f.clone();
        for _ in 0..m.d {
            g = (1..g.len()).map(|k| &g[k] * int(k as i64)).collect();
        }
        let mut shifted = vec![Scalar::zero(); m.t as usize];
        shifted.extend(g);
        if out.len() < shifted.len() {
            out.resize(shifted.len(), Scalar::zero());
        }
        for (k, x) in shifted.into_iter().enumerate() {
            out[k] += x * c;
        }
    }
    trim(out)
}

pub fn x_power(m: usize) -> Poly {
    let mut p = vec![Scalar::zero(); m + 1];
    p[m] = int(1);
    p
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize, density: f64) -> QMatrix {
    let mut m = QMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(density) {
                m[(i, j)] = int(rng.gen_range(-3i64..=3));
            }
        }
    }
    m
}

pub fn random_invertible(rng: &mut StdRng, n: usize) -> QMatrix {
    loop {
        let g = random_matrix(rng, n, n, 0.7);
        if g.inverse().is_some() {
            return g;
        }
    }
}

/// A valid representation built from the matric equations directly:
/// `E1 = G diag(1..1, 0..0) G^-1`, `S12 = E1 X (1 - E1)`, `S21 = (1 - E1) Y E1`.
pub fn random_representation(rng: &mut StdRng, n: usize) -> Representation {
    let p = rng.gen_range(0..=n);
    let mut diag = QMatrix::zeros(n, n);
    for i in 0..p {
        diag[(i, i)] = int(1);
    }
    let g = random_invertible(rng, n);
    let e1 = &(&g * &diag) * &g.inverse().unwrap();
    let complement = &QMatrix::identity(n) - &e1;
    let density = [0.0, 0.3, 0.6, 1.0][rng.gen_range(0..4)];
    let x = random_matrix(rng, n, n, density);
    let density = [0.0, 0.3, 0.6, 1.0][rng.gen_range(0..4)];
    let y = random_matrix(rng, n, n, density);
    let s12 = &(&e1 * &x) * &complement;
    let s21 = &(&complement * &y) * &e1;
    validate(e1, s12, s21).expect("constructed to satisfy the relations")
}
