//! End-to-end checks with fixed tolerances. Each check prints one PASS/FAIL
//! line; the process exits nonzero if any check failed.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use common::{ad_db_abd, dense_betti, dense_matrix, name_of, named, rng};
use conley::bench::{annulus, run_instance, BenchOptions, Preset};
use conley::discretize::{discretize_builtin_g, DiscretizeOptions};
use conley::homology::trim;
use conley::morse::{random_within_orders, FilteredOrder};
use conley::persist::{morse_persistence, persistence_equivalence_check, PersistOptions};
use conley::randgen::{build_benchmark_complex, coarsen_to, ComplexKind};
use conley::reduce::{
    check_reduced, conmat, connectmat, morse_fixed_compare, with_paired_row_additions,
    ConnectionMatrix, ReduceOptions,
};
use conley::{
    FilteredMatrix, LyapunovFunction, MorseDecomposition, MultivectorField, SimplicialComplex,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

/// Random instances with at most 500 simplices: mixed complexes of growing
/// size, coarsened to a random connection probability below 0.2.
fn random_instances(count: usize) -> Vec<(SimplicialComplex, MultivectorField)> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        seed += 1;
        let mut r = rng(seed);
        let vertices = r.gen_range(5..=30);
        let kind = ComplexKind::Mixed {
            vertices,
            dims: vec![1, 2, 3],
            count: r.gen_range(3..=5 * vertices),
        };
        let Ok(k) = build_benchmark_complex(&kind, seed) else {
            continue;
        };
        if k.len() > 500 {
            continue;
        }
        let p = r.gen_range(0.0..0.2);
        let field = coarsen_to(&k, &MultivectorField::singleton(&k), p, seed)
            .unwrap()
            .field;
        out.push((k, field));
    }
    out
}

fn matrix_of(k: &SimplicialComplex, md: &MorseDecomposition) -> FilteredMatrix {
    FilteredMatrix::boundary(k, &md.filtered_order(k), false).unwrap()
}

fn upper_triangular(a: &FilteredMatrix) -> bool {
    (0..a.n()).all(|j| a.col(j).iter().all(|&i| i < j))
}

fn annulus_golden() -> Outcome {
    let start = Instant::now();
    let (k, field) = annulus();
    let md = MorseDecomposition::minimum(&k, &field).map_err(|e| e.to_string())?;
    ensure(md.num_sets() == 4, || {
        format!("{} Morse sets", md.num_sets())
    })?;
    let c = conmat(matrix_of(&k, &md), &ReduceOptions::default())
        .unwrap()
        .connection;
    ensure(c.len() == 5, || {
        format!("{}x{} connection matrix", c.len(), c.len())
    })?;
    let cda = c.column_of(named(&k, "ACD")).ok_or("CDA not kept")?;
    ensure(cda.len() == 2, || {
        format!("CDA column has {} nonzeros", cda.len())
    })?;
    let abc = c.column_of(named(&k, "ABC")).ok_or("ABC not kept")?;
    ensure(abc == vec![named(&k, "AC")], || {
        format!(
            "ABC column is {:?}",
            abc.iter().map(|&s| name_of(&k, s)).collect::<Vec<_>>()
        )
    })?;
    let orbit = md.set_of(named(&k, "A"));
    let mut dims: Vec<usize> = (0..c.len())
        .filter(|&i| c.grading[i] == orbit)
        .map(|i| c.dims[i])
        .collect();
    dims.sort_unstable();
    ensure(dims == vec![0, 1], || {
        format!("orbit generators in dimensions {dims:?}")
    })?;
    within_time(start, Duration::from_secs(1))?;
    Ok(format!(
        "4 Morse sets, 5x5, CDA column {{{}}}",
        cda.iter()
            .map(|&s| name_of(&k, s))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn algorithm_equivalence(instances: &[(SimplicialComplex, MultivectorField)]) -> Outcome {
    let start = Instant::now();
    let mut largest = 0;
    for (n, (k, field)) in instances.iter().enumerate() {
        largest = largest.max(k.len());
        let md = MorseDecomposition::minimum(k, field).unwrap();
        let a = matrix_of(k, &md);
        let x = conmat(a.clone(), &ReduceOptions::default())
            .unwrap()
            .connection;
        let y = connectmat(a, &ReduceOptions::default()).unwrap().connection;
        x.check_invariants(&md)
            .map_err(|e| format!("instance {n}, conmat: {e}"))?;
        y.check_invariants(&md)
            .map_err(|e| format!("instance {n}, connectmat: {e}"))?;
        let expected = dense_betti(k);
        let (bx, by) = (trim(x.betti()), trim(y.betti()));
        ensure(bx == expected && by == expected, || {
            format!("instance {n}: Betti {bx:?} / {by:?}, oracle {expected:?}")
        })?;
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} instances, up to {largest} simplices, {:.2?}",
        instances.len(),
        start.elapsed()
    ))
}

fn reducedness(instances: &[(SimplicialComplex, MultivectorField)]) -> Outcome {
    for (n, (k, field)) in instances.iter().enumerate() {
        let md = MorseDecomposition::minimum(k, field).unwrap();
        let out = conmat(matrix_of(k, &md), &ReduceOptions::default())
            .unwrap()
            .matrix;
        let report = check_reduced(&out);
        ensure(report.all(), || format!("instance {n}: {report:?}"))?;
    }
    Ok(format!("{} instances satisfy R1, R2, R3", instances.len()))
}

fn morse_fixed_invariance(instances: &[(SimplicialComplex, MultivectorField)]) -> Outcome {
    let mut runs = 0;
    for (n, (k, field)) in instances.iter().enumerate() {
        let md = MorseDecomposition::minimum(k, field).unwrap();
        let mut r = rng(n as u64 ^ 0x4d);
        let within = random_within_orders(k, &md, &mut r);
        let run = |ext: &[usize]| -> ConnectionMatrix {
            let order = FilteredOrder::new(k, &md, ext, &within).unwrap();
            let a = FilteredMatrix::boundary(k, &order, false).unwrap();
            conmat(a, &ReduceOptions::default()).unwrap().connection
        };
        let base = run(md.linear_ext());
        for _ in 0..5 {
            let ext = md.random_linear_extension(&mut r);
            let cmp = morse_fixed_compare(&base, &run(&ext));
            ensure(cmp.equal, || {
                format!("instance {n}: {}", cmp.witness.unwrap_or_default())
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "{} instances x 5 extensions, {runs} comparisons",
        instances.len()
    ))
}

/// Whether some permutation `pi` gives `t[i][j] == s[pi[i]][pi[j]]`.
fn permutation_similar(s: &ConnectionMatrix, t: &ConnectionMatrix) -> bool {
    let n = s.len();
    if t.len() != n {
        return false;
    }
    let (ms, mt) = (dense_matrix(n, &s.entries), dense_matrix(n, &t.entries));
    common::any_permutation(n, |pi| {
        (0..n).all(|i| (0..n).all(|j| mt[i][j] == ms[pi[i]][pi[j]]))
    })
}

fn within_order_counterexample() -> Outcome {
    let start = Instant::now();
    let (k, field) = ad_db_abd();
    let md = MorseDecomposition::minimum(&k, &field).unwrap();
    let big = md.set_of(named(&k, "ABD"));
    let orders = [["AD", "BD", "ABD"], ["BD", "AD", "ABD"]];
    let mut outputs = Vec::new();
    for names in orders {
        let within: HashMap<_, _> = [(big, names.iter().map(|n| named(&k, n)).collect())]
            .into_iter()
            .collect();
        let order =
            FilteredOrder::new(&k, &md, md.linear_ext(), &within).map_err(|e| e.to_string())?;
        let a = FilteredMatrix::boundary(&k, &order, false).unwrap();
        let c = conmat(a, &ReduceOptions::default()).unwrap().connection;
        c.check_invariants(&md).map_err(|e| e.to_string())?;
        outputs.push(c);
    }
    ensure(!permutation_similar(&outputs[0], &outputs[1]), || {
        "a permutation carries one connection matrix to the other".into()
    })?;
    within_time(start, Duration::from_secs(1))?;
    let n = outputs[0].len();
    Ok(format!(
        "{n}x{n}, none of the {} permutations matches",
        (1..=n).product::<usize>()
    ))
}

fn persistence_equivalence(instances: &[(SimplicialComplex, MultivectorField)]) -> Outcome {
    for (n, (k, field)) in instances.iter().enumerate() {
        let md = MorseDecomposition::minimum(k, field).unwrap();
        let f = LyapunovFunction::random(&md, &mut rng(n as u64 ^ 0x5e));
        let report = persistence_equivalence_check(k, &md, &f).unwrap();
        ensure(report.equal, || {
            format!("instance {n}: unmatched bar {:?}", report.witness)
        })?;
    }
    Ok(format!(
        "{} instances with random Lyapunov functions",
        instances.len()
    ))
}

/// Finite dimension-one bar lengths of the discretized `g`, longest first.
fn loop_bars(resolution: usize) -> Vec<f64> {
    let (k, _, field) = discretize_builtin_g(
        [-3.0, 3.0, -3.0, 3.0],
        resolution,
        DiscretizeOptions::default(),
    )
    .unwrap();
    let md = MorseDecomposition::minimum(&k, &field).unwrap();
    let f = LyapunovFunction::downset(&md);
    let barcode = morse_persistence(&k, &md, &f, PersistOptions::default()).unwrap();
    barcode
        .finite_by_length(1)
        .iter()
        .map(|b| b.length())
        .collect()
}

fn discretization() -> Outcome {
    let start = Instant::now();
    let fine = loop_bars(21);
    ensure(fine.len() >= 2, || {
        format!("21x21: only {} finite dim-1 bars", fine.len())
    })?;
    if let Some(&third) = fine.get(2) {
        ensure(fine[1] >= 2.0 * third, || {
            format!("21x21: second bar {} vs third {third}", fine[1])
        })?;
    }
    let coarse = loop_bars(12);
    ensure(coarse.len() == 3, || {
        format!("12x12: {} finite dim-1 bars {coarse:?}", coarse.len())
    })?;
    ensure(coarse[0] >= 3.0 * coarse[1], || {
        format!("12x12: bars {coarse:?}")
    })?;
    within_time(start, Duration::from_secs(10))?;
    Ok(format!(
        "21x21 top bars {:?} of {}; 12x12 bars {coarse:?}",
        &fine[..2],
        fine.len()
    ))
}

fn performance() -> Outcome {
    let mut parts = Vec::new();
    for (preset, reps, floor) in [(Preset::V2, 3, 50.0), (Preset::V7, 9, 2.0)] {
        let instance = preset.build(None).map_err(|e| e.to_string())?;
        let opts = BenchOptions {
            repetitions: reps,
            timeout: Some(Duration::from_secs(300)),
        };
        let row = run_instance(&instance, &opts).map_err(|e| e.to_string())?;
        let ratio = row
            .speedup()
            .ok_or_else(|| format!("{preset}: timed out"))?;
        ensure(ratio >= floor, || {
            format!("{preset}: speedup {ratio:.1}x below {floor}x")
        })?;
        parts.push(format!(
            "{preset} (|K|={}, p={:.4}) {ratio:.1}x >= {floor}x",
            row.simplices, row.probability
        ));
    }
    Ok(parts.join("; "))
}

fn boundary_invariant(instances: &[(SimplicialComplex, MultivectorField)]) -> Outcome {
    let opts = ReduceOptions {
        record_log: true,
        ..ReduceOptions::default()
    };
    let mut checked = 0;
    let mut all: Vec<(SimplicialComplex, MultivectorField)> = instances.to_vec();
    all.push(annulus());
    all.push(ad_db_abd());
    for (n, (k, field)) in all.iter().enumerate() {
        let md = MorseDecomposition::minimum(k, field).unwrap();
        let mut r = rng(n as u64 ^ 0x99);
        let ext = md.random_linear_extension(&mut r);
        let within = random_within_orders(k, &md, &mut r);
        let shuffled = FilteredOrder::new(k, &md, &ext, &within).unwrap();
        for a in [
            matrix_of(k, &md),
            FilteredMatrix::boundary(k, &shuffled, false).unwrap(),
        ] {
            a.check_invariants()
                .map_err(|e| format!("instance {n}, input: {e}"))?;
            let red = conmat(a.clone(), &opts).unwrap();
            ensure(upper_triangular(&red.matrix), || {
                format!("instance {n}: conmat output not upper-triangular")
            })?;
            with_paired_row_additions(&red.matrix, &red.log)
                .check_invariants()
                .map_err(|e| format!("instance {n}, conmat output in reduced basis: {e}"))?;
            connectmat(a, &ReduceOptions::default())
                .unwrap()
                .matrix
                .check_invariants()
                .map_err(|e| format!("instance {n}, connectmat output: {e}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} matrices before and after reduction"))
}

fn main() {
    let instances = random_instances(120);
    let checks: Vec<Check> = vec![
        ("annulus golden", Box::new(annulus_golden)),
        (
            "algorithm equivalence",
            Box::new(|| algorithm_equivalence(&instances)),
        ),
        ("reducedness", Box::new(|| reducedness(&instances))),
        (
            "Morse-fixed invariance",
            Box::new(|| morse_fixed_invariance(&instances[..60])),
        ),
        (
            "within-order counterexample",
            Box::new(within_order_counterexample),
        ),
        (
            "persistence equivalence",
            Box::new(|| persistence_equivalence(&instances[..60])),
        ),
        ("discretization barcodes", Box::new(discretization)),
        ("performance ratios", Box::new(performance)),
        (
            "boundary invariant",
            Box::new(|| boundary_invariant(&instances)),
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
