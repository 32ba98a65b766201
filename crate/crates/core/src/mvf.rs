//! Combinatorial multivector fields: partitions of a complex into convex sets.

use crate::complex::{SimplexId, SimplicialComplex};
use crate::error::{Error, Result};

pub type VectorId = usize;

/// A partition of a complex into convex multivectors.
///
/// Vector ids are slots; merging keeps the smaller id and empties the other
/// slot, so ids of untouched vectors never change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultivectorField {
    vector_of: Vec<VectorId>,
    vectors: Vec<Vec<SimplexId>>,
    alive: usize,
}

impl MultivectorField {
    /// Every simplex alone in its own vector; vector id = simplex id.
    pub fn singleton(k: &SimplicialComplex) -> Self {
        Self {
            vector_of: (0..k.len()).collect(),
            vectors: (0..k.len()).map(|s| vec![s]).collect(),
            alive: k.len(),
        }
    }

    /// Builds a field from explicit vectors, checking partition and convexity.
    /// Vector `i` of the input receives id `i`.
    pub fn from_vectors(k: &SimplicialComplex, vectors: Vec<Vec<SimplexId>>) -> Result<Self> {
        let mut vector_of = vec![usize::MAX; k.len()];
        let mut sorted = Vec::with_capacity(vectors.len());
        for (vid, mut v) in vectors.into_iter().enumerate() {
            if v.is_empty() {
                return Err(Error::NotPartition(format!("vector {vid} is empty")));
            }
            v.sort_unstable();
            for &s in &v {
                k.check_id(s)?;
                if vector_of[s] != usize::MAX {
                    return Err(Error::NotPartition(format!(
                        "simplex {s} lies in vectors {} and {vid}",
                        vector_of[s]
                    )));
                }
                vector_of[s] = vid;
            }
            sorted.push(v);
        }
        if let Some(s) = vector_of.iter().position(|&v| v == usize::MAX) {
            return Err(Error::NotPartition(format!("simplex {s} is not covered")));
        }
        let field = Self {
            alive: sorted.len(),
            vector_of,
            vectors: sorted,
        };
        for (vid, v) in field.iter() {
            if !is_convex(k, v) {
                return Err(Error::NotConvex(vid));
            }
        }
        Ok(field)
    }

    /// Rechecks partition and convexity against `k`.
    pub fn validate(&self, k: &SimplicialComplex) -> Result<()> {
        if self.vector_of.len() != k.len() {
            return Err(Error::NotPartition(format!(
                "field covers {} simplices, complex has {}",
                self.vector_of.len(),
                k.len()
            )));
        }
        for (vid, v) in self.iter() {
            for &s in v {
                if self.vector_of[s] != vid {
                    return Err(Error::NotPartition(format!("simplex {s} mislabelled")));
                }
            }
            if !is_convex(k, v) {
                return Err(Error::NotConvex(vid));
            }
        }
        Ok(())
    }

    pub fn num_simplices(&self) -> usize {
        self.vector_of.len()
    }

    pub fn num_vectors(&self) -> usize {
        self.alive
    }

    pub fn vector_of(&self, s: SimplexId) -> VectorId {
        self.vector_of[s]
    }

    /// Members of vector `v`, ascending. Empty for retired ids.
    pub fn vector(&self, v: VectorId) -> &[SimplexId] {
        &self.vectors[v]
    }

    /// Live vectors in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (VectorId, &[SimplexId])> {
        self.vectors
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(i, v)| (i, v.as_slice()))
    }

    pub fn vector_ids(&self) -> Vec<VectorId> {
        self.iter().map(|(i, _)| i).collect()
    }

    /// Number of ordered pairs of distinct simplices sharing a vector.
    pub fn same_vector_pairs(&self) -> u64 {
        self.iter()
            .map(|(_, v)| {
                let m = v.len() as u64;
                m * (m - 1)
            })
            .sum()
    }

    /// Probability that two distinct uniformly drawn simplices share a vector.
    pub fn connection_probability(&self) -> Result<f64> {
        let n = self.num_simplices() as u64;
        if n < 2 {
            return Err(Error::TooFewSimplices(n as usize));
        }
        Ok(self.same_vector_pairs() as f64 / (n * (n - 1)) as f64)
    }

    /// `F_V(σ) = [σ]_V ∪ cl(σ)`, ascending.
    pub fn fv(&self, k: &SimplicialComplex, s: SimplexId) -> Result<Vec<SimplexId>> {
        let mut out = k.closure(&[s])?;
        out.extend_from_slice(self.vector(self.vector_of(s)));
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Returns the smallest coarsening in which `v1` and `v2` share a vector.
    pub fn merge_vectors(&self, k: &SimplicialComplex, v1: VectorId, v2: VectorId) -> Result<Self> {
        let mut out = self.clone();
        out.merge_in_place(k, v1, v2)?;
        Ok(out)
    }

    /// In-place variant of [`merge_vectors`](Self::merge_vectors). Returns the
    /// surviving id and the ids retired by the merge (including convexity
    /// repair), ascending.
    pub fn merge_in_place(
        &mut self,
        k: &SimplicialComplex,
        v1: VectorId,
        v2: VectorId,
    ) -> Result<(VectorId, Vec<VectorId>)> {
        Merger::new(k).merge(k, self, v1, v2)
    }

    // Moves every member of `gone` into `keep`; the longer buffer is reused.
    fn absorb(&mut self, keep: VectorId, gone: VectorId, retired: &mut Vec<VectorId>) {
        let mut a = std::mem::take(&mut self.vectors[keep]);
        let mut b = std::mem::take(&mut self.vectors[gone]);
        for &s in &b {
            self.vector_of[s] = keep;
        }
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        a.extend_from_slice(&b);
        a.sort_unstable();
        self.vectors[keep] = a;
        self.alive -= 1;
        retired.push(gone);
    }
}

/// Reusable scratch space for repeated merges on one complex.
pub struct Merger {
    scratch: Saturation,
}

impl Merger {
    pub fn new(k: &SimplicialComplex) -> Self {
        Self {
            scratch: Saturation::new(k.len()),
        }
    }

    /// See [`MultivectorField::merge_in_place`].
    pub fn merge(
        &mut self,
        k: &SimplicialComplex,
        field: &mut MultivectorField,
        v1: VectorId,
        v2: VectorId,
    ) -> Result<(VectorId, Vec<VectorId>)> {
        for v in [v1, v2] {
            if v >= field.vectors.len() || field.vectors[v].is_empty() {
                return Err(Error::UnknownVector(v));
            }
        }
        if v1 == v2 {
            return Err(Error::SelfMerge(v1));
        }
        if self.scratch.stamp.len() < k.len() {
            self.scratch = Saturation::new(k.len());
        }
        let keep = v1.min(v2);
        let mut retired = Vec::new();
        field.absorb(keep, v1.max(v2), &mut retired);
        loop {
            let mut missing = self.scratch.intermediates(k, field, keep);
            if missing.is_empty() {
                break;
            }
            missing.sort_unstable();
            missing.dedup();
            for v in missing {
                if v != keep && !field.vectors[v].is_empty() {
                    field.absorb(keep, v, &mut retired);
                }
            }
        }
        retired.sort_unstable();
        Ok((keep, retired))
    }
}

/// True iff for every σ ≤ τ in `set`, every μ with σ ≤ μ ≤ τ lies in `set`.
pub fn is_convex(k: &SimplicialComplex, set: &[SimplexId]) -> bool {
    let mut member = std::collections::HashSet::with_capacity(set.len());
    member.extend(set.iter().copied());
    let mut scratch = Saturation::new(k.len());
    scratch
        .violations(k, set, |s| member.contains(&s))
        .is_empty()
}

/// Scratch state for finding simplices strictly between members of a set.
///
/// For each member τ without a cofacet in the set, walks `cl(τ)` in
/// ascending dimension and marks μ whose closure meets the set below μ; any
/// such μ outside the set is an intermediate.
struct Saturation {
    stamp: Vec<u32>,
    below: Vec<bool>,
    generation: u32,
    closure: Vec<SimplexId>,
    stack: Vec<SimplexId>,
}

impl Saturation {
    fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            below: vec![false; n],
            generation: 0,
            closure: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn intermediates(
        &mut self,
        k: &SimplicialComplex,
        field: &MultivectorField,
        v: VectorId,
    ) -> Vec<VectorId> {
        let set = field.vector(v).to_vec();
        self.violations(k, &set, |s| field.vector_of(s) == v)
            .into_iter()
            .map(|s| field.vector_of(s))
            .collect()
    }

    fn violations<F: Fn(SimplexId) -> bool>(
        &mut self,
        k: &SimplicialComplex,
        set: &[SimplexId],
        member: F,
    ) -> Vec<SimplexId> {
        let mut out = Vec::new();
        for &top in set {
            if k.cofacets(top).iter().any(|&c| member(c)) {
                continue;
            }
            if k.facets(top).is_empty() {
                continue;
            }
            self.generation = self.generation.wrapping_add(1);
            if self.generation == 0 {
                self.stamp.iter_mut().for_each(|x| *x = 0);
                self.generation = 1;
            }
            let g = self.generation;
            self.closure.clear();
            self.stack.clear();
            self.stack.push(top);
            self.stamp[top] = g;
            while let Some(s) = self.stack.pop() {
                self.closure.push(s);
                for &f in k.facets(s) {
                    if self.stamp[f] != g {
                        self.stamp[f] = g;
                        self.stack.push(f);
                    }
                }
            }
            // Ids are ordered by dimension first, so ascending id is a valid
            // bottom-up order.
            self.closure.sort_unstable();
            for idx in 0..self.closure.len() {
                let mu = self.closure[idx];
                let hit = k.facets(mu).iter().any(|&f| member(f) || self.below[f]);
                self.below[mu] = hit;
                if hit && mu != top && !member(mu) {
                    out.push(mu);
                }
            }
            for &s in &self.closure {
                self.below[s] = false;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
