mod common;

use std::collections::HashMap;

use common::{dense_betti, face_of, named, random_complex};
use conley::homology::{betti_numbers, trim};
use conley::SimplicialComplex;
use proptest::prelude::*;

fn arb_complex() -> impl Strategy<Value = SimplicialComplex> {
    any::<u64>().prop_map(random_complex)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_of_boundary_vanishes(k in arb_complex()) {
        for s in 0..k.len() {
            let mut count: HashMap<usize, usize> = HashMap::new();
            for &f in k.facets(s) {
                for &g in k.facets(f) {
                    *count.entry(g).or_default() += 1;
                }
            }
            prop_assert!(count.values().all(|c| c % 2 == 0));
            prop_assert!(k.chain_boundary(&k.boundary_chain(s).unwrap()).is_empty());
        }
    }

    #[test]
    fn facet_counts_and_faces(k in arb_complex()) {
        for s in 0..k.len() {
            let facets = k.facets(s);
            if k.dim(s) == 0 {
                prop_assert!(facets.is_empty());
            } else {
                prop_assert_eq!(facets.len(), k.dim(s) + 1);
            }
            for &f in facets {
                prop_assert!(face_of(&k, f, s));
                prop_assert_eq!(k.dim(f) + 1, k.dim(s));
                prop_assert!(k.cofacets(f).contains(&s));
            }
        }
    }

    #[test]
    fn closure_is_idempotent_and_monotone(k in arb_complex(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let b: Vec<usize> = picks.iter().map(|i| i.index(k.len())).collect();
        let a = &b[..b.len().div_ceil(2)];
        let cl_a = k.closure(a).unwrap();
        let cl_b = k.closure(&b).unwrap();
        prop_assert_eq!(k.closure(&cl_a).unwrap(), cl_a.clone());
        prop_assert!(cl_a.iter().all(|s| cl_b.contains(s)));
        for s in 0..k.len() {
            let expected = b.iter().any(|&t| face_of(&k, s, t));
            prop_assert_eq!(cl_b.contains(&s), expected);
        }
    }

    #[test]
    fn homology_matches_dense_oracle(k in arb_complex()) {
        prop_assert_eq!(trim(betti_numbers(&k)), dense_betti(&k));
    }

    #[test]
    fn ids_are_dimension_then_lexicographic(k in arb_complex()) {
        for s in 1..k.len() {
            let key = |x: usize| (k.dim(x), k.vertices(x).to_vec());
            prop_assert!(key(s - 1) < key(s));
        }
    }
}

#[test]
fn annulus_ids() {
    let k = SimplicialComplex::build(&[[0, 1, 2], [2, 3, 0]]).unwrap();
    let expected = [
        "A", "B", "C", "D", "AB", "AC", "AD", "BC", "CD", "ABC", "ACD",
    ];
    for (id, name) in expected.iter().enumerate() {
        assert_eq!(named(&k, name), id);
    }
    assert_eq!(k.count_by_dim(), vec![4, 5, 2]);
    assert_eq!(dense_betti(&k), vec![1]);
}

#[test]
fn dense_oracle_on_known_spaces() {
    let circle = SimplicialComplex::build(&[[0, 1], [1, 2], [0, 2]]).unwrap();
    assert_eq!(dense_betti(&circle), vec![1, 1]);
    let sphere = SimplicialComplex::build(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap();
    assert_eq!(dense_betti(&sphere), vec![1, 0, 1]);
    let two_points = SimplicialComplex::build(&[[0], [1]]).unwrap();
    assert_eq!(dense_betti(&two_points), vec![2]);
}

#[test]
fn bad_input_is_rejected() {
    let empty: Vec<Vec<usize>> = Vec::new();
    assert!(SimplicialComplex::build(&empty).is_err());
    assert!(SimplicialComplex::build(&[vec![0, 1], vec![]]).is_err());
}
