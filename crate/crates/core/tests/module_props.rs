mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use weyl_deform::dmatrix::WeylMatrix;
use weyl_deform::dmod::{
    cyclic_iso_witness, decompose, hom_search, is_hom, iso_witness, standard_monomials, CyclicModule, PresentedModule,
};
use weyl_deform::ext::{ext1_dim, ext_table, standard_family};
use weyl_deform::hull::{hull_unobstructed, standard_hull};
use weyl_deform::linalg::QMatrix;
use weyl_deform::parse::parse_weyl;
use weyl_deform::scalar::{frac, int, one};
use weyl_deform::WeylElement;

fn w(s: &str) -> WeylElement {
    parse_weyl(s).unwrap()
}

fn cyc(s: &str) -> CyclicModule {
    CyclicModule::new(w(s)).unwrap()
}

fn standard_pairs() -> Vec<(CyclicModule, CyclicModule)> {
    let family = standard_family();
    let mut out = Vec::new();
    for a in &family {
        for b in &family {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

#[test]
fn hom_bases_are_exact() {
    let extra = [("t*d - 1", "d"), ("t*d - 2", "t*d - 2"), ("d*t", "t"), ("d^2", "d")];
    let mut pairs = standard_pairs();
    pairs.extend(extra.iter().map(|(a, b)| (cyc(a), cyc(b))));
    for (a, b) in pairs {
        for r in hom_search(&a, &b, 6).basis {
            assert!(is_hom(&a.p, &b.p, &r), "{} -> {} via {r}", a.p, b.p);
        }
    }
}

#[test]
fn hom_dimensions_monotone_and_stable() {
    for (a, b) in standard_pairs() {
        let h = hom_search(&a, &b, 10);
        assert!(h.dims_by_degree.windows(2).all(|x| x[0] <= x[1]), "{:?}", h.dims_by_degree);
        let tail = &h.dims_by_degree[6..];
        assert!(tail.iter().all(|&d| d == tail[0]), "{:?}", h.dims_by_degree);
        assert!(h.stabilized_at.is_some_and(|s| s <= 8));
    }
}

/// The truncated Ext dimension with the monomial coordinates shuffled.
fn shuffled_ext1(p: &WeylElement, q: &WeylElement, n: usize, rng: &mut StdRng) -> usize {
    let mut low = standard_monomials(q, n);
    low.shuffle(rng);
    let mut sources = standard_monomials(q, 2 * n);
    sources.shuffle(rng);
    let images: Vec<WeylElement> = sources
        .iter()
        .map(|m| (p * &WeylElement::monomial(one(), *m)).reduce_mod(q))
        .collect();
    let mut coords = low.clone();
    for e in &images {
        for (m, _) in e.terms() {
            if !coords.contains(m) {
                coords.push(*m);
            }
        }
    }
    let mut full = QMatrix::zeros(coords.len(), images.len());
    let mut high = QMatrix::zeros(coords.len() - low.len(), images.len());
    for (j, e) in images.iter().enumerate() {
        for (m, x) in e.terms() {
            let k = coords.iter().position(|c| c == m).unwrap();
            full[(k, j)] = x.clone();
            if k >= low.len() {
                high[(k - low.len(), j)] = x.clone();
            }
        }
    }
    // dim(image ∩ low) = rank(image) - rank(projection of image off low)
    low.len() - (full.rank() - high.rank())
}

#[test]
fn ext_independent_of_basis_order() {
    let mut rng = StdRng::seed_from_u64(11);
    let pairs = [("d", "t"), ("t", "d"), ("d", "d"), ("t*d - 1/2", "t*d - 1/2"), ("t*d - 1", "d")];
    for (p, q) in pairs {
        for n in [3, 5] {
            let expected = ext1_dim(&w(p), &w(q), n).unwrap().dim;
            for _ in 0..3 {
                assert_eq!(shuffled_ext1(&w(p), &w(q), n, &mut rng), expected, "{p}, {q}, {n}");
            }
        }
    }
}

#[test]
fn ext_table_matches_at_stabilization() {
    let t = ext_table(&standard_family(), 8).unwrap();
    assert_eq!(t.ext1, vec![vec![0, 1], vec![1, 0]]);
    assert_eq!(t.representatives[0][1], vec![WeylElement::one()]);
    assert_eq!(t.representatives[1][0], vec![WeylElement::one()]);
}

/// Path counting by powers of the adjacency matrix.
fn adjacency_count(adjacency: &QMatrix, m: usize) -> usize {
    let n = adjacency.rows();
    let mut power = QMatrix::identity(n);
    let mut total = 0usize;
    for _ in 0..m {
        total += power.entries().iter().map(|x| x.to_integer().to_string().parse::<usize>().unwrap()).sum::<usize>();
        power = &power * adjacency;
    }
    total
}

#[test]
fn hull_dimensions_against_adjacency() {
    let h = standard_hull();
    let adjacency = QMatrix::from_ints(&[&[0, 1], &[1, 0]]);
    for m in 1..=8 {
        assert_eq!(h.hull_trunc_dim(m), adjacency_count(&adjacency, m));
        assert_eq!(h.hull_trunc_dim(m), 2 * m);
    }
    let ext = weyl_deform::ext::ExtTable {
        ext1: vec![vec![1, 0], vec![0, 0]],
        ext2: vec![vec![0, 0], vec![0, 0]],
        stabilized_at: 0,
        representatives: Vec::new(),
    };
    let loop_hull = hull_unobstructed(&ext).unwrap();
    let adjacency = QMatrix::from_ints(&[&[1, 0], &[0, 0]]);
    for m in 1..=8 {
        assert_eq!(loop_hull.hull_trunc_dim(m), adjacency_count(&adjacency, m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integer_shifts_are_certified(num in -7i64..7, den in 2i64..5, k in 1i64..3) {
        prop_assume!(num % den != 0);
        let a = frac(num, den);
        let p = &w("t*d") - &WeylElement::constant(a.clone());
        let q = &w("t*d") - &WeylElement::constant(a + int(k));
        let witness = cyclic_iso_witness(&p, &q, 2 * k as usize + 2).expect("shift isomorphism");
        prop_assert!(witness.verify());
    }

    #[test]
    fn block_sums_split_into_their_blocks(i in 0usize..4, j in 0usize..4) {
        let pool = ["d", "t", "t*d - 1/2", "d*t"];
        let (a, b) = (cyc(pool[i]).presented(), cyc(pool[j]).presented());
        let sum = PresentedModule::direct_sum(&[a.clone(), b.clone()]);
        let dec = decompose(&sum);
        prop_assert!(dec.witness.verify());
        prop_assert_eq!(dec.cyclic_summands().unwrap(), vec![a.as_cyclic().unwrap(), b.as_cyclic().unwrap()]);
        let swapped = PresentedModule::direct_sum(&[b, a]);
        let witness = iso_witness(&sum, &swapped, 2).expect("summands match");
        prop_assert!(witness.verify());
    }
}

#[test]
fn witnesses_compose_and_invert() {
    let a = cyc("t*d - 1/3").presented();
    let b = cyc("t*d - 4/3").presented();
    let c = cyc("t*d - 7/3").presented();
    let ab = iso_witness(&a, &b, 4).unwrap();
    let bc = iso_witness(&b, &c, 4).unwrap();
    assert!(ab.then(&bc).verify());
    assert!(ab.inverse().verify());
    let sum = weyl_deform::dmod::IsoWitness::direct_sum(&[ab, bc]);
    assert!(sum.verify());
}

#[test]
fn unit_free_presentation_uses_dense_search() {
    let base = PresentedModule::direct_sum(&[cyc("d").presented(), cyc("t").presented()]);
    let p = QMatrix::from_ints(&[&[2, 1], &[1, 1]]);
    let q = QMatrix::from_ints(&[&[1, 1], &[1, 2]]);
    let mixed = weyl_deform::dmod::IsoWitness::scalar_change(&base, &p, &q).unwrap().target;
    assert!(mixed.delta.entries().iter().all(|e| e.as_constant().is_none() || e.is_zero()));
    let w = iso_witness(&mixed, &base, 2).expect("found by the dense search");
    assert!(w.verify());
    let zero = PresentedModule::new(WeylMatrix::identity(1)).unwrap();
    assert!(decompose(&zero).summands.is_empty());
}
