mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

use weyl_deform::dmatrix::WeylMatrix;
use weyl_deform::dmod::iso_witness;
use weyl_deform::rep::{classify, default_samples, family_by_label};
use weyl_deform::scalar::{frac, int};
use weyl_deform::versal::{commutative_specialize, identify_specialization, specialize, CommutativePoint};

#[test]
fn direct_sums_specialize_blockwise() {
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..30 {
        let a = common::random_representation(&mut rng, 2);
        let b = common::random_representation(&mut rng, 1);
        let joint = specialize(&a.direct_sum(&b));
        let blocks = WeylMatrix::block_diagonal(&[specialize(&a).delta, specialize(&b).delta]);
        assert_eq!(joint.delta, blocks);
    }
}

#[test]
fn entries_have_degree_at_most_one() {
    for n in 1..=3 {
        for f in classify(n, &default_samples()).unwrap().families {
            for v in f.sample_points(&default_samples()) {
                let m = specialize(&f.instantiate(&v).unwrap());
                assert!(m.delta.degree().unwrap_or(0) <= 1);
            }
        }
    }
}

#[test]
fn rigidity() {
    let t11 = family_by_label("T_1_1").unwrap().instantiate(&[]).unwrap();
    let t12 = family_by_label("T_1_2").unwrap().instantiate(&[]).unwrap();
    assert_eq!(identify_specialization(&t11, 4).matched_name(), Some("M1 = D/D(d)"));
    assert_eq!(identify_specialization(&t12, 4).matched_name(), Some("M2 = D/D(t)"));
}

#[test]
fn commutative_and_noncommutative_agree() {
    let t26 = family_by_label("T_2_6").unwrap();
    for (alpha, beta) in [(int(1), int(1)), (int(2), int(1)), (frac(1, 2), int(-2)), (int(-1), frac(1, 3))] {
        let a = &alpha * &beta;
        let (module, report) = commutative_specialize(&CommutativePoint::new(alpha, beta), 4);
        assert!(report.is_certified());
        let nc = identify_specialization(&t26.instantiate(&[a.clone()]).unwrap(), 4);
        assert!(nc.is_certified());
        let cross = iso_witness(&module, &specialize(&t26.instantiate(&[a]).unwrap()), 4).expect("same class");
        assert!(cross.verify());
    }
}

#[test]
fn conjugate_modules_give_isomorphic_specializations() {
    let mut rng = StdRng::seed_from_u64(23);
    let t = family_by_label("T_2_6").unwrap().instantiate(&[frac(1, 2)]).unwrap();
    for _ in 0..5 {
        let g = common::random_invertible(&mut rng, 2);
        let moved = specialize(&t.conjugate(&g).unwrap());
        let w = iso_witness(&moved, &specialize(&t), 3).expect("conjugation is a base change");
        assert!(w.verify());
    }
}
