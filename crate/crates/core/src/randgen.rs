//! Random complexes and random coarsening of multivector fields.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::mvf::{Merger, MultivectorField, VectorId};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct Coarsened {
    pub field: MultivectorField,
    pub probability: f64,
    /// Connection probability before the last merge (equal to `probability`
    /// when no merge was needed).
    pub previous_probability: f64,
    pub merges: usize,
}

/// Merges uniformly chosen pairs of distinct vectors until the connection
/// probability reaches `target_p`.
pub fn coarsen_to(
    k: &SimplicialComplex,
    field: &MultivectorField,
    target_p: f64,
    seed: u64,
) -> Result<Coarsened> {
    if !(0.0..=1.0).contains(&target_p) {
        return Err(Error::InvalidProbability(target_p));
    }
    let n = k.len();
    if n < 2 {
        return Err(Error::TooFewSimplices(n));
    }
    let denom = (n as f64) * (n as f64 - 1.0);
    let mut field = field.clone();
    let mut rng = rng_from_seed(seed);
    let mut merger = Merger::new(k);

    let mut live: Vec<VectorId> = field.vector_ids();
    let mut slot = vec![usize::MAX; n];
    let mut size = vec![0u64; n];
    for (i, &v) in live.iter().enumerate() {
        slot[v] = i;
        size[v] = field.vector(v).len() as u64;
    }
    let mut pairs: u64 = field.same_vector_pairs();
    let mut merges = 0;
    let mut previous = pairs;
    while (pairs as f64) / denom < target_p && live.len() > 1 {
        previous = pairs;
        let i = rng.gen_range(0..live.len());
        let mut j = rng.gen_range(0..live.len() - 1);
        if j >= i {
            j += 1;
        }
        let (keep, retired) = merger.merge(k, &mut field, live[i], live[j])?;
        merges += 1;
        pairs -= size[keep] * (size[keep] - 1);
        for r in retired {
            pairs -= size[r] * (size[r].saturating_sub(1));
            size[r] = 0;
            let p = slot[r];
            live.swap_remove(p);
            if p < live.len() {
                slot[live[p]] = p;
            }
            slot[r] = usize::MAX;
        }
        size[keep] = field.vector(keep).len() as u64;
        pairs += size[keep] * (size[keep] - 1);
    }
    Ok(Coarsened {
        probability: pairs as f64 / denom,
        previous_probability: previous as f64 / denom,
        field,
        merges,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComplexKind {
    /// All faces of one `dim`-simplex.
    FullSimplex { dim: usize },
    /// `triangles` distinct random triangles on `vertices` vertices.
    TriangleSoup { vertices: usize, triangles: usize },
    /// `edges` distinct random edges on `vertices` vertices.
    DenseGraph { vertices: usize, edges: usize },
    /// `count` distinct random simplices on `vertices` vertices; the `i`-th
    /// has dimension `dims[i % dims.len()]`.
    Mixed {
        vertices: usize,
        dims: Vec<usize>,
        count: usize,
    },
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `amount` distinct `size`-subsets of `0..vertices`, ascending inside each.
fn distinct_subsets<R: Rng>(
    rng: &mut R,
    vertices: usize,
    size: usize,
    amount: usize,
) -> Result<Vec<Vec<VertexId>>> {
    let total = binomial(vertices, size);
    if (amount as u128) > total {
        return Err(Error::InfeasibleParams(format!(
            "{amount} distinct {size}-subsets requested from {vertices} vertices (at most {total})"
        )));
    }
    // Dense requests: enumerate every subset and sample indices.
    if total <= 4_000_000 && (amount as u128) * 4 >= total {
        let all = all_subsets(vertices, size);
        return Ok(index::sample(rng, all.len(), amount)
            .into_iter()
            .map(|i| all[i].clone())
            .collect());
    }
    let mut seen = HashSet::with_capacity(amount);
    let mut out = Vec::with_capacity(amount);
    while out.len() < amount {
        let mut s: Vec<VertexId> = index::sample(rng, vertices, size).into_vec();
        s.sort_unstable();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    Ok(out)
}

fn all_subsets(vertices: usize, size: usize) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    let mut cur: Vec<VertexId> = (0..size).collect();
    if size == 0 || size > vertices {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = size;
        while i > 0 && cur[i - 1] == vertices - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for t in i..size {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

pub fn build_benchmark_complex(kind: &ComplexKind, seed: u64) -> Result<SimplicialComplex> {
    let mut rng = rng_from_seed(seed);
    match kind {
        ComplexKind::FullSimplex { dim } => {
            if *dim > 20 {
                return Err(Error::InfeasibleParams(format!(
                    "full simplex of dimension {dim} is too large"
                )));
            }
            let top: Vec<VertexId> = (0..=*dim).collect();
            SimplicialComplex::build(&[top])
        }
        ComplexKind::TriangleSoup {
            vertices,
            triangles,
        } => {
            if *triangles == 0 {
                return Err(Error::InfeasibleParams(
                    "triangle soup needs at least one triangle".into(),
                ));
            }
            let tris = distinct_subsets(&mut rng, *vertices, 3, *triangles)?;
            SimplicialComplex::build(&tris)
        }
        ComplexKind::DenseGraph { vertices, edges } => {
            if *vertices == 0 {
                return Err(Error::InfeasibleParams("graph needs a vertex".into()));
            }
            let mut simplices = distinct_subsets(&mut rng, *vertices, 2, *edges)?;
            simplices.extend((0..*vertices).map(|v| vec![v]));
            SimplicialComplex::build(&simplices)
        }
        ComplexKind::Mixed {
            vertices,
            dims,
            count,
        } => {
            if dims.is_empty() || *count == 0 {
                return Err(Error::InfeasibleParams(
                    "mixed complex needs dimensions and a count".into(),
                ));
            }
            let mut simplices = Vec::with_capacity(*count);
            for (i, &d) in dims.iter().enumerate() {
                let amount = count / dims.len() + usize::from(i < count % dims.len());
                simplices.extend(distinct_subsets(&mut rng, *vertices, d + 1, amount)?);
            }
            SimplicialComplex::build(&simplices)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_simplex_counts() {
        let k = build_benchmark_complex(&ComplexKind::FullSimplex { dim: 12 }, 0).unwrap();
        assert_eq!(k.len(), (1 << 13) - 1);
        assert_eq!(k.max_dim(), 12);
    }

    #[test]
    fn small_soup_is_bounded() {
        let k = build_benchmark_complex(
            &ComplexKind::TriangleSoup {
                vertices: 30,
                triangles: 10,
            },
            7,
        )
        .unwrap();
        assert!(k.len() <= 70);
        assert_eq!(k.count_by_dim()[2], 10);
    }

    #[test]
    fn infeasible_graph() {
        let err = build_benchmark_complex(
            &ComplexKind::DenseGraph {
                vertices: 4,
                edges: 7,
            },
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InfeasibleParams(_)));
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(all_subsets(4, 2).len(), 6);
        assert_eq!(binomial(55, 3), 26235);
    }

    #[test]
    fn coarsen_extremes() {
        let k = SimplicialComplex::build(&[[0, 1, 2], [2, 3, 0]]).unwrap();
        let f = MultivectorField::singleton(&k);
        let c = coarsen_to(&k, &f, 0.0, 1).unwrap();
        assert_eq!(c.field, f);
        assert_eq!(c.merges, 0);
        let c = coarsen_to(&k, &f, 1.0, 1).unwrap();
        assert_eq!(c.field.num_vectors(), 1);
        assert_eq!(c.probability, 1.0);
        assert!(coarsen_to(&k, &f, 1.5, 1).is_err());
    }

    #[test]
    fn coarsen_is_reproducible() {
        let k = build_benchmark_complex(&ComplexKind::FullSimplex { dim: 5 }, 0).unwrap();
        let f = MultivectorField::singleton(&k);
        let a = coarsen_to(&k, &f, 0.05, 42).unwrap();
        let b = coarsen_to(&k, &f, 0.05, 42).unwrap();
        assert_eq!(a.field, b.field);
        assert!(a.probability >= 0.05);
        assert!(a.previous_probability < 0.05);
        assert_eq!(a.probability, a.field.connection_probability().unwrap());
    }
}
