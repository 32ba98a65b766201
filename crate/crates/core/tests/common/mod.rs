//! Fixtures and brute-force oracles shared by the integration tests. The
//! oracles work from vertex lists only and never call the library's own face
//! lattice, reduction or SCC code.

#![allow(dead_code)]

use std::collections::HashSet;

use conley::mvf::MultivectorField;
use conley::randgen::coarsen_to;
use conley::{SimplexId, SimplicialComplex};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random complex of at most a few hundred simplices: 4..=9 vertices and a
/// handful of random maximal simplices of dimension 1..=3.
pub fn random_complex(seed: u64) -> SimplicialComplex {
    let mut r = rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0x00c0_ffee);
    let vertices = r.gen_range(4..=9);
    let count = r.gen_range(2..=14);
    let mut tops = Vec::with_capacity(count);
    for _ in 0..count {
        let dim = r.gen_range(1..=3usize).min(vertices - 1);
        let mut s = index::sample(&mut r, vertices, dim + 1).into_vec();
        s.sort_unstable();
        tops.push(s);
    }
    SimplicialComplex::build(&tops).unwrap()
}

/// A random complex with a field coarsened to a random connection
/// probability in `[0, 0.3)`.
pub fn random_instance(seed: u64) -> (SimplicialComplex, MultivectorField) {
    let k = random_complex(seed);
    let p = rng(seed ^ 0xa5a5).gen_range(0.0..0.3);
    let field = coarsen_to(&k, &MultivectorField::singleton(&k), p, seed)
        .unwrap()
        .field;
    (k, field)
}

pub fn subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// `a` is a face of `b`, from vertex lists.
pub fn face_of(k: &SimplicialComplex, a: SimplexId, b: SimplexId) -> bool {
    subset(k.vertices(a), k.vertices(b))
}

/// Rank over ℤ₂ by dense Gaussian elimination.
pub fn dense_rank(mut m: Vec<Vec<bool>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c]) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && m[r][c] {
                let pivot = m[rank].clone();
                for (x, v) in m[r].iter_mut().zip(pivot).skip(c) {
                    *x ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers of `k` by Gaussian elimination on dense boundary matrices
/// built from vertex lists. Trailing zeros are trimmed.
pub fn dense_betti(k: &SimplicialComplex) -> Vec<usize> {
    let top = k.max_dim();
    let by_dim: Vec<Vec<Vec<usize>>> = (0..=top)
        .map(|d| {
            (0..k.len())
                .filter(|&s| k.dim(s) == d)
                .map(|s| k.vertices(s).to_vec())
                .collect()
        })
        .collect();
    let mut ranks = vec![0; top + 2];
    for d in 1..=top {
        let lower = &by_dim[d - 1];
        let m: Vec<Vec<bool>> = lower
            .iter()
            .map(|row| {
                by_dim[d]
                    .iter()
                    .map(|col| row.len() + 1 == col.len() && subset(row, col))
                    .collect()
            })
            .collect();
        ranks[d] = dense_rank(m);
    }
    let mut b: Vec<usize> = (0..=top)
        .map(|d| by_dim[d].len() - ranks[d] - ranks[d + 1])
        .collect();
    while b.len() > 1 && b.last() == Some(&0) {
        b.pop();
    }
    b
}

/// Convexity straight from the definition: every simplex lying between two
/// members is a member.
pub fn brute_convex(k: &SimplicialComplex, set: &[SimplexId]) -> bool {
    let members: HashSet<SimplexId> = set.iter().copied().collect();
    for &a in set {
        for &b in set {
            if !face_of(k, a, b) {
                continue;
            }
            for m in 0..k.len() {
                if face_of(k, a, m) && face_of(k, m, b) && !members.contains(&m) {
                    return false;
                }
            }
        }
    }
    true
}

/// F_V successors of every simplex: its vector plus all of its faces.
pub fn brute_fv(k: &SimplicialComplex, field: &MultivectorField) -> Vec<Vec<SimplexId>> {
    (0..k.len())
        .map(|s| {
            let mut out: Vec<SimplexId> = (0..k.len()).filter(|&t| face_of(k, t, s)).collect();
            out.extend_from_slice(field.vector(field.vector_of(s)));
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect()
}

/// `reach[a][b]`: some F_V path of length ≥ 0 runs from `a` to `b`.
pub fn brute_reach(k: &SimplicialComplex, field: &MultivectorField) -> Vec<Vec<bool>> {
    let succ = brute_fv(k, field);
    (0..k.len())
        .map(|a| {
            let mut seen = vec![false; k.len()];
            let mut stack = vec![a];
            seen[a] = true;
            while let Some(x) = stack.pop() {
                for &y in &succ[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Strongly connected components by mutual reachability, each sorted,
/// listed by smallest member.
pub fn brute_sccs(k: &SimplicialComplex, field: &MultivectorField) -> Vec<Vec<SimplexId>> {
    let reach = brute_reach(k, field);
    let mut done = vec![false; k.len()];
    let mut out = Vec::new();
    for a in 0..k.len() {
        if done[a] {
            continue;
        }
        let comp: Vec<SimplexId> = (0..k.len())
            .filter(|&b| reach[a][b] && reach[b][a])
            .collect();
        for &b in &comp {
            done[b] = true;
        }
        out.push(comp);
    }
    out
}

/// Vertex letters A, B, C, ... to a simplex id.
pub fn named(k: &SimplicialComplex, name: &str) -> SimplexId {
    let v: Vec<usize> = name.bytes().map(|b| (b - b'A') as usize).collect();
    k.find(&v).unwrap_or_else(|| panic!("no simplex {name}"))
}

pub fn name_of(k: &SimplicialComplex, s: SimplexId) -> String {
    k.vertices(s)
        .iter()
        .map(|&v| (b'A' + v as u8) as char)
        .collect()
}

/// The closure of {ABD, CA} with the multivector {AD, DB, ABD}; every other
/// simplex is critical.
pub fn ad_db_abd() -> (SimplicialComplex, MultivectorField) {
    let k = SimplicialComplex::build(&[vec![0, 1, 3], vec![0, 2]]).unwrap();
    let big = vec![named(&k, "AD"), named(&k, "BD"), named(&k, "ABD")];
    let mut vectors = vec![big.clone()];
    vectors.extend((0..k.len()).filter(|s| !big.contains(s)).map(|s| vec![s]));
    let field = MultivectorField::from_vectors(&k, vectors).unwrap();
    (k, field)
}

/// Dense `n × n` matrix of a connection matrix, rows by kept index.
pub fn dense_matrix(n: usize, entries: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(i, j) in entries {
        m[i][j] = true;
    }
    m
}

/// Heap's algorithm over all permutations of `0..n`; stops when `f` returns true.
pub fn any_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    if f(&p) {
        return true;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            if f(&p) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}
