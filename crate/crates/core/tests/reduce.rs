mod common;

use common::{dense_betti, random_instance, rng};
use conley::homology::trim;
use conley::morse::{random_within_orders, FilteredOrder};
use conley::reduce::{
    check_reduced, complete_reduction, conmat, connectmat, morse_fixed_compare,
    with_paired_row_additions, ConnectionMatrix, ReduceOptions, Step,
};
use conley::{FilteredMatrix, MorseDecomposition, MultivectorField, SimplicialComplex};
use proptest::prelude::*;

fn logged() -> ReduceOptions {
    ReduceOptions {
        record_log: true,
        ..ReduceOptions::default()
    }
}

/// Boundary matrix with random linear extension and within-set orders.
fn random_matrix(seed: u64) -> (SimplicialComplex, MorseDecomposition, FilteredMatrix) {
    let (k, field) = random_instance(seed);
    let md = MorseDecomposition::minimum(&k, &field).unwrap();
    let mut r = rng(seed ^ 77);
    let ext = md.random_linear_extension(&mut r);
    let within = random_within_orders(&k, &md, &mut r);
    let order = FilteredOrder::new(&k, &md, &ext, &within).unwrap();
    let a = FilteredMatrix::boundary(&k, &order, true).unwrap();
    (k, md, a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conmat_stages_keep_matrix_invariants(seed in any::<u64>()) {
        let (k, md, a) = random_matrix(seed);
        let red = conmat(a.clone(), &logged()).unwrap();
        prop_assert_eq!(red.stats.row_additions, 0);
        let mut m = a.clone();
        let mut homogeneous: Vec<bool> = (0..m.n()).map(|j| m.is_homogeneous(j)).collect();
        for step in &red.log {
            let Step::Column { source: s, target: j } = *step else {
                prop_assert!(false, "conmat logged a row operation");
                unreachable!();
            };
            prop_assert!(s < j);
            prop_assert!(m.is_homogeneous(s));
            m.add_column(s, j);
            for &i in m.col(j) {
                prop_assert!(i < j);
                prop_assert!(md.leq(m.grading(i), m.grading(j)));
            }
            // A non-homogeneous column never becomes homogeneous.
            let now = m.is_homogeneous(j);
            prop_assert!(!now || homogeneous[j]);
            homogeneous[j] = now;
        }
        prop_assert_eq!(&m, &red.matrix);
        m.check_chains(&k).unwrap();
        prop_assert_eq!(red.stats.homogeneity_violations, 0);
    }

    #[test]
    fn homogeneity_agrees_with_complete_reduction(seed in any::<u64>()) {
        let (_, _, a) = random_matrix(seed);
        let out = conmat(a, &ReduceOptions::default()).unwrap().matrix;
        let (full, _) = complete_reduction(out.clone());
        for j in 0..out.n() {
            prop_assert_eq!(out.is_homogeneous(j), full.is_homogeneous(j), "column {}", j);
        }
        prop_assert!(check_reduced(&out).all());
    }

    #[test]
    fn paired_rows_give_a_boundary_matrix(seed in any::<u64>()) {
        let (_, _, a) = random_matrix(seed);
        let red = conmat(a, &logged()).unwrap();
        let full = with_paired_row_additions(&red.matrix, &red.log);
        full.check_invariants().unwrap();
        let c = ConnectionMatrix::extract(&full);
        prop_assert_eq!(&c.kept, &red.connection.kept);
        prop_assert_eq!(&c.entries, &red.connection.entries);
    }

    #[test]
    fn both_algorithms_give_connection_matrices(seed in any::<u64>()) {
        let (k, md, a) = random_matrix(seed);
        let x = conmat(a.clone(), &ReduceOptions::default()).unwrap();
        let y = connectmat(a, &ReduceOptions::default()).unwrap();
        x.connection.check_invariants(&md).unwrap();
        y.connection.check_invariants(&md).unwrap();
        let expected = dense_betti(&k);
        prop_assert_eq!(trim(x.connection.betti()), expected.clone());
        prop_assert_eq!(trim(y.connection.betti()), expected);
        prop_assert!(check_reduced(&y.matrix).all());
        // Each kept chain contains the simplex standing for it.
        for (idx, chain) in x.connection.basis_chains.iter().enumerate() {
            let s = x.connection.kept[idx];
            prop_assert!(chain.contains(&s));
        }
    }

    #[test]
    fn output_is_independent_of_linear_extension(seed in any::<u64>()) {
        let (k, field) = random_instance(seed);
        let md = MorseDecomposition::minimum(&k, &field).unwrap();
        let mut r = rng(seed ^ 5);
        let within = random_within_orders(&k, &md, &mut r);
        let run = |ext: &[usize]| {
            let order = FilteredOrder::new(&k, &md, ext, &within).unwrap();
            let a = FilteredMatrix::boundary(&k, &order, false).unwrap();
            conmat(a, &ReduceOptions::default()).unwrap().connection
        };
        let base = run(md.linear_ext());
        for _ in 0..3 {
            let ext = md.random_linear_extension(&mut r);
            let cmp = morse_fixed_compare(&base, &run(&ext));
            prop_assert!(cmp.equal, "{:?}", cmp.witness);
        }
    }
}

#[test]
fn singleton_field_keeps_the_boundary_matrix() {
    let k = SimplicialComplex::build(&[[0, 1, 2, 3]]).unwrap();
    let md = MorseDecomposition::minimum(&k, &MultivectorField::singleton(&k)).unwrap();
    let a = FilteredMatrix::boundary(&k, &md.filtered_order(&k), false).unwrap();
    let red = conmat(a.clone(), &ReduceOptions::default()).unwrap();
    assert_eq!(red.matrix, a);
    assert_eq!(red.connection.len(), k.len());
    assert_eq!(red.connection.entries.len(), a.nnz());
}

#[test]
fn whole_complex_in_one_vector_collapses() {
    let k = SimplicialComplex::build(&[[0, 1, 2]]).unwrap();
    let field = MultivectorField::from_vectors(&k, vec![(0..k.len()).collect()]).unwrap();
    let md = MorseDecomposition::minimum(&k, &field).unwrap();
    assert_eq!(md.num_sets(), 1);
    let a = FilteredMatrix::boundary(&k, &md.filtered_order(&k), false).unwrap();
    for c in [
        conmat(a.clone(), &ReduceOptions::default())
            .unwrap()
            .connection,
        connectmat(a, &ReduceOptions::default()).unwrap().connection,
    ] {
        // A contractible Morse set leaves a single vertex.
        assert_eq!(c.len(), 1);
        assert_eq!(c.dims, vec![0]);
        assert!(c.entries.is_empty());
    }
}

#[test]
fn connection_matrix_json_round_trip() {
    let (k, field) = random_instance(11);
    let md = MorseDecomposition::minimum(&k, &field).unwrap();
    let a = FilteredMatrix::boundary(&k, &md.filtered_order(&k), true).unwrap();
    let c = conmat(a, &ReduceOptions::default()).unwrap().connection;
    let text = serde_json::to_string(&c).unwrap();
    assert!(text.contains("\"basis_chains\""));
    let back: ConnectionMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}
