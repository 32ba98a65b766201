//! Finite simplicial complexes with an explicit face lattice.
//!
//! Simplices are identified by dense ids assigned in `(dimension, lexicographic
//! vertex list)` order, so vertex `v` of a complex whose vertex labels are
//! `0..n` always receives simplex id `v`. Coefficients are ℤ₂ throughout, which
//! makes a boundary chain a plain set of facets.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

pub type SimplexId = usize;
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    pub id: SimplexId,
    pub vertices: Vec<VertexId>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: Vec<Simplex>,
    facets: Vec<Vec<SimplexId>>,
    cofacets: Vec<Vec<SimplexId>>,
    index: HashMap<Vec<VertexId>, SimplexId>,
}

impl SimplicialComplex {
    /// Builds the downward closure of `simplex_list`. Vertex lists are sorted
    /// and deduplicated; repeated simplices collapse silently.
    pub fn build<S: AsRef<[VertexId]>>(simplex_list: &[S]) -> Result<Self> {
        if simplex_list.is_empty() {
            return Err(Error::EmptyComplex);
        }
        let mut all: HashSet<Vec<VertexId>> = HashSet::new();
        let mut maximal: Vec<Vec<VertexId>> = Vec::with_capacity(simplex_list.len());
        for (pos, s) in simplex_list.iter().enumerate() {
            let mut v = s.as_ref().to_vec();
            if v.is_empty() {
                return Err(Error::EmptySimplex(pos));
            }
            v.sort_unstable();
            v.dedup();
            maximal.push(v);
        }
        // Longest first: a simplex already present means all its faces are too.
        maximal.sort_unstable_by_key(|v| std::cmp::Reverse(v.len()));
        for v in maximal {
            if all.contains(&v) {
                continue;
            }
            insert_faces(&v, &mut all);
        }

        let mut sorted: Vec<Vec<VertexId>> = all.into_iter().collect();
        sorted.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

        let index: HashMap<Vec<VertexId>, SimplexId> = sorted
            .iter()
            .enumerate()
            .map(|(id, v)| (v.clone(), id))
            .collect();

        let n = sorted.len();
        let mut facets = vec![Vec::new(); n];
        let mut cofacets = vec![Vec::new(); n];
        let mut face = Vec::new();
        for (id, v) in sorted.iter().enumerate() {
            if v.len() < 2 {
                continue;
            }
            let mut fs = Vec::with_capacity(v.len());
            for skip in 0..v.len() {
                face.clear();
                face.extend(
                    v.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != skip)
                        .map(|(_, &x)| x),
                );
                let f = index[&face];
                fs.push(f);
                cofacets[f].push(id);
            }
            fs.sort_unstable();
            facets[id] = fs;
        }
        // Cofacets are pushed in ascending id order already.

        let simplices = sorted
            .into_iter()
            .enumerate()
            .map(|(id, vertices)| Simplex { id, vertices })
            .collect();
        Ok(Self {
            simplices,
            facets,
            cofacets,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id]
    }

    pub fn vertices(&self, id: SimplexId) -> &[VertexId] {
        &self.simplices[id].vertices
    }

    pub fn dim(&self, id: SimplexId) -> usize {
        self.simplices[id].dim()
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.last().map_or(0, Simplex::dim)
    }

    pub fn avg_dim(&self) -> f64 {
        let total: usize = self.simplices.iter().map(Simplex::dim).sum();
        total as f64 / self.len() as f64
    }

    /// Codimension-1 faces, ascending.
    pub fn facets(&self, id: SimplexId) -> &[SimplexId] {
        &self.facets[id]
    }

    /// Codimension-1 cofaces, ascending.
    pub fn cofacets(&self, id: SimplexId) -> &[SimplexId] {
        &self.cofacets[id]
    }

    pub fn find(&self, vertices: &[VertexId]) -> Option<SimplexId> {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        v.dedup();
        self.index.get(&v).copied()
    }

    pub fn check_id(&self, id: SimplexId) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownSimplex(id))
        }
    }

    /// `a ≤ b` in the face order.
    pub fn is_face(&self, a: SimplexId, b: SimplexId) -> bool {
        is_subset(self.vertices(a), self.vertices(b))
    }

    /// The ℤ₂ boundary of a single simplex.
    pub fn boundary_chain(&self, id: SimplexId) -> Result<Vec<SimplexId>> {
        self.check_id(id)?;
        Ok(self.facets[id].clone())
    }

    /// Smallest closed superset of `ids`, ascending.
    pub fn closure(&self, ids: &[SimplexId]) -> Result<Vec<SimplexId>> {
        let mut seen = vec![false; self.len()];
        let mut stack = Vec::new();
        for &id in ids {
            self.check_id(id)?;
            if !seen[id] {
                seen[id] = true;
                stack.push(id);
            }
        }
        while let Some(s) = stack.pop() {
            for &f in &self.facets[s] {
                if !seen[f] {
                    seen[f] = true;
                    stack.push(f);
                }
            }
        }
        Ok(collect_marked(&seen))
    }

    /// ℤ₂ boundary of an arbitrary chain, ascending.
    pub fn chain_boundary(&self, chain: &[SimplexId]) -> Vec<SimplexId> {
        let mut parity = HashMap::<SimplexId, bool>::new();
        for &s in chain {
            for &f in &self.facets[s] {
                let e = parity.entry(f).or_insert(false);
                *e = !*e;
            }
        }
        let mut out: Vec<SimplexId> = parity
            .into_iter()
            .filter(|&(_, odd)| odd)
            .map(|(f, _)| f)
            .collect();
        out.sort_unstable();
        out
    }

    /// Maximal simplices as vertex lists; enough to rebuild the complex.
    pub fn vertex_lists(&self) -> Vec<Vec<VertexId>> {
        self.simplices.iter().map(|s| s.vertices.clone()).collect()
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim() + 1];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }
}

fn insert_faces(v: &[VertexId], all: &mut HashSet<Vec<VertexId>>) {
    let mut stack = vec![v.to_vec()];
    while let Some(s) = stack.pop() {
        if all.contains(&s) {
            continue;
        }
        if s.len() > 1 {
            for skip in 0..s.len() {
                let f: Vec<VertexId> = s
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &x)| x)
                    .collect();
                if !all.contains(&f) {
                    stack.push(f);
                }
            }
        }
        all.insert(s);
    }
}

pub(crate) fn is_subset(small: &[VertexId], big: &[VertexId]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut it = big.iter();
    'outer: for x in small {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

pub(crate) fn collect_marked(marks: &[bool]) -> Vec<usize> {
    marks
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}
