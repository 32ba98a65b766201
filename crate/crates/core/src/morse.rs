//! Minimum Morse decompositions and P-filtered simplex orders.
//!
//! The F_V digraph has an edge σ → τ whenever τ ∈ [σ]_V ∪ cl(σ). Every vector
//! is strongly connected in it and closure edges factor through facets, so the
//! strongly connected components are computed on the much smaller graph whose
//! nodes are vectors and whose edges follow facets between vectors.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{SimplexId, SimplicialComplex};
use crate::error::{Error, Result};
use crate::mvf::MultivectorField;

pub type MorseSetId = usize;

/// Morse sets indexed by a poset. Set `p` is numbered by ascending smallest
/// member, and `q ≤_P p` whenever some F_V path runs from `M_p` into `M_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseDecomposition {
    sets: Vec<Vec<SimplexId>>,
    set_of: Vec<MorseSetId>,
    /// Direct successors in the flow: `lower[p]` holds the `q` with a path
    /// step from `M_p` into `M_q`, so each `q <_P p`.
    lower: Vec<Vec<MorseSetId>>,
    linear_ext: Vec<MorseSetId>,
}

impl MorseDecomposition {
    /// Strongly connected components of the F_V digraph, with the reachability
    /// order and the default topological linear extension.
    pub fn minimum(k: &SimplicialComplex, field: &MultivectorField) -> Result<Self> {
        if field.num_simplices() != k.len() {
            return Err(Error::NotPartition(format!(
                "field covers {} simplices, complex has {}",
                field.num_simplices(),
                k.len()
            )));
        }
        // Dense node index per live vector.
        let vids = field.vector_ids();
        let mut node_of_vector = HashMap::with_capacity(vids.len());
        for (i, &v) in vids.iter().enumerate() {
            node_of_vector.insert(v, i);
        }
        let node_of = |s: SimplexId| node_of_vector[&field.vector_of(s)];

        let mut stamp = vec![usize::MAX; vids.len()];
        let mut adj: Vec<Vec<usize>> = Vec::with_capacity(vids.len());
        for (i, &v) in vids.iter().enumerate() {
            let mut out = Vec::new();
            stamp[i] = i;
            for &s in field.vector(v) {
                for &f in k.facets(s) {
                    let w = node_of(f);
                    if stamp[w] != i {
                        stamp[w] = i;
                        out.push(w);
                    }
                }
            }
            adj.push(out);
        }

        let comp = tarjan(&adj);
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);

        // Gather members, then renumber components by smallest member.
        let mut members: Vec<Vec<SimplexId>> = vec![Vec::new(); ncomp];
        for (i, &v) in vids.iter().enumerate() {
            members[comp[i]].extend_from_slice(field.vector(v));
        }
        for m in &mut members {
            m.sort_unstable();
        }
        let mut by_min: Vec<usize> = (0..ncomp).collect();
        by_min.sort_unstable_by_key(|&c| members[c][0]);
        let mut rename = vec![0; ncomp];
        for (new, &old) in by_min.iter().enumerate() {
            rename[old] = new;
        }
        let mut sets = vec![Vec::new(); ncomp];
        for (old, m) in members.into_iter().enumerate() {
            sets[rename[old]] = m;
        }
        let mut set_of = vec![0; k.len()];
        for (p, m) in sets.iter().enumerate() {
            for &s in m {
                set_of[s] = p;
            }
        }

        let mut lower = vec![Vec::new(); ncomp];
        for (i, out) in adj.iter().enumerate() {
            let p = rename[comp[i]];
            for &w in out {
                let q = rename[comp[w]];
                if q != p {
                    lower[p].push(q);
                }
            }
        }
        for l in &mut lower {
            l.sort_unstable();
            l.dedup();
        }

        let mut md = Self {
            sets,
            set_of,
            lower,
            linear_ext: Vec::new(),
        };
        md.linear_ext = md.default_linear_extension();
        Ok(md)
    }

    /// Builds a decomposition from explicit parts. Validates that the parts
    /// partition `k`, that each is a Morse set, and that the induced relation
    /// is acyclic.
    pub fn from_sets(
        k: &SimplicialComplex,
        field: &MultivectorField,
        sets: Vec<Vec<SimplexId>>,
    ) -> Result<Self> {
        let mut set_of = vec![usize::MAX; k.len()];
        let mut sets: Vec<Vec<SimplexId>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        if sets.iter().any(Vec::is_empty) {
            return Err(Error::NotMorseDecomposition("empty Morse set".into()));
        }
        sets.sort_unstable_by_key(|s| s[0]);
        for (p, m) in sets.iter().enumerate() {
            for &s in m {
                k.check_id(s)?;
                if set_of[s] != usize::MAX {
                    return Err(Error::NotMorseDecomposition(format!(
                        "simplex {s} in two sets"
                    )));
                }
                set_of[s] = p;
            }
        }
        if let Some(s) = set_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::NotMorseDecomposition(format!(
                "simplex {s} not covered"
            )));
        }
        for (p, m) in sets.iter().enumerate() {
            if !is_morse_set(k, field, m)? {
                return Err(Error::NotMorseDecomposition(format!(
                    "part {p} is not a Morse set"
                )));
            }
        }
        let mut lower = vec![Vec::new(); sets.len()];
        for s in 0..k.len() {
            let p = set_of[s];
            let targets = k.facets(s).iter().chain(field.vector(field.vector_of(s)));
            for &t in targets {
                if set_of[t] != p {
                    lower[p].push(set_of[t]);
                }
            }
        }
        for l in &mut lower {
            l.sort_unstable();
            l.dedup();
        }
        let mut md = Self {
            sets,
            set_of,
            lower,
            linear_ext: Vec::new(),
        };
        let ext = md.default_linear_extension();
        if ext.len() != md.num_sets() {
            return Err(Error::NotMorseDecomposition(
                "Morse sets form a cycle".into(),
            ));
        }
        md.linear_ext = ext;
        Ok(md)
    }

    /// Merges groups of Morse sets into a coarser decomposition.
    pub fn coarsen(
        &self,
        k: &SimplicialComplex,
        field: &MultivectorField,
        groups: &[Vec<MorseSetId>],
    ) -> Result<Self> {
        let mut used = vec![false; self.num_sets()];
        let mut parts = Vec::new();
        for g in groups {
            let mut part = Vec::new();
            for &p in g {
                if p >= self.num_sets() || used[p] {
                    return Err(Error::NotMorseDecomposition(format!(
                        "bad or repeated Morse set {p}"
                    )));
                }
                used[p] = true;
                part.extend_from_slice(&self.sets[p]);
            }
            parts.push(part);
        }
        for (p, u) in used.iter().enumerate() {
            if !u {
                parts.push(self.sets[p].clone());
            }
        }
        Self::from_sets(k, field, parts)
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, p: MorseSetId) -> &[SimplexId] {
        &self.sets[p]
    }

    pub fn sets(&self) -> &[Vec<SimplexId>] {
        &self.sets
    }

    pub fn set_of(&self, s: SimplexId) -> MorseSetId {
        self.set_of[s]
    }

    pub fn num_simplices(&self) -> usize {
        self.set_of.len()
    }

    /// Direct lower neighbours of `p` in the condensation DAG.
    pub fn lower_neighbours(&self, p: MorseSetId) -> &[MorseSetId] {
        &self.lower[p]
    }

    pub fn linear_ext(&self) -> &[MorseSetId] {
        &self.linear_ext
    }

    /// Condensation edges as `(lower, upper)` pairs, i.e. `lower <_P upper`.
    pub fn poset_edges(&self) -> Vec<(MorseSetId, MorseSetId)> {
        let mut out = Vec::new();
        for (p, l) in self.lower.iter().enumerate() {
            for &q in l {
                out.push((q, p));
            }
        }
        out.sort_unstable();
        out
    }

    /// `p ≤_P q`.
    pub fn leq(&self, p: MorseSetId, q: MorseSetId) -> bool {
        if p == q {
            return true;
        }
        let mut seen = vec![false; self.num_sets()];
        let mut stack = vec![q];
        seen[q] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.lower[x] {
                if y == p {
                    return true;
                }
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    /// Down-set of every element as a bitset over Morse sets (`q ≤_P p`).
    pub fn downsets(&self) -> Vec<Vec<u64>> {
        let words = self.num_sets().div_ceil(64);
        let mut down = vec![vec![0u64; words]; self.num_sets()];
        for &p in &self.linear_ext {
            let mut bits = vec![0u64; words];
            bits[p / 64] |= 1 << (p % 64);
            for &q in &self.lower[p] {
                for (b, d) in bits.iter_mut().zip(&down[q]) {
                    *b |= *d;
                }
            }
            down[p] = bits;
        }
        down
    }

    /// Kahn topological order, lower elements first; among available elements
    /// the one with the smallest member simplex goes first.
    fn default_linear_extension(&self) -> Vec<MorseSetId> {
        let m = self.num_sets();
        let mut upper = vec![Vec::new(); m];
        let mut pending = vec![0usize; m];
        for (p, l) in self.lower.iter().enumerate() {
            pending[p] = l.len();
            for &q in l {
                upper[q].push(p);
            }
        }
        let mut heap: BinaryHeap<Reverse<MorseSetId>> =
            (0..m).filter(|&p| pending[p] == 0).map(Reverse).collect();
        let mut out = Vec::with_capacity(m);
        while let Some(Reverse(p)) = heap.pop() {
            out.push(p);
            for &u in &upper[p] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    heap.push(Reverse(u));
                }
            }
        }
        out
    }

    /// A uniformly chosen available element at every Kahn step.
    pub fn random_linear_extension<R: Rng>(&self, rng: &mut R) -> Vec<MorseSetId> {
        let m = self.num_sets();
        let mut upper = vec![Vec::new(); m];
        let mut pending = vec![0usize; m];
        for (p, l) in self.lower.iter().enumerate() {
            pending[p] = l.len();
            for &q in l {
                upper[q].push(p);
            }
        }
        let mut ready: Vec<MorseSetId> = (0..m).filter(|&p| pending[p] == 0).collect();
        let mut out = Vec::with_capacity(m);
        while !ready.is_empty() {
            let pick = rng.gen_range(0..ready.len());
            let p = ready.swap_remove(pick);
            out.push(p);
            for &u in &upper[p] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push(u);
                }
            }
        }
        out
    }

    /// Checks that `ext` lists every Morse set once with lower elements first.
    pub fn check_linear_extension(&self, ext: &[MorseSetId]) -> Result<()> {
        let m = self.num_sets();
        if ext.len() != m {
            return Err(Error::NotLinearExtension(format!(
                "{} entries for {m} Morse sets",
                ext.len()
            )));
        }
        let mut rank = vec![usize::MAX; m];
        for (r, &p) in ext.iter().enumerate() {
            if p >= m || rank[p] != usize::MAX {
                return Err(Error::NotLinearExtension(format!(
                    "bad or repeated Morse set {p}"
                )));
            }
            rank[p] = r;
        }
        for (p, l) in self.lower.iter().enumerate() {
            for &q in l {
                if rank[q] > rank[p] {
                    return Err(Error::NotLinearExtension(format!(
                        "{q} <_P {p} but listed after it"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Replaces the linear extension after validating it.
    pub fn with_linear_extension(mut self, ext: Vec<MorseSetId>) -> Result<Self> {
        self.check_linear_extension(&ext)?;
        self.linear_ext = ext;
        Ok(self)
    }

    /// Morse sets of the default order with simplices in `(dim, id)` order.
    pub fn filtered_order(&self, k: &SimplicialComplex) -> FilteredOrder {
        FilteredOrder::new(k, self, &self.linear_ext, &HashMap::new())
            .expect("default order is admissible")
    }
}

/// Iterative Tarjan; returns the component index of every node.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < adj[v].len() {
                let w = adj[v][*edge];
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// The F_V digraph by definition: σ → τ iff τ ∈ F_V(σ), τ ≠ σ. Quadratic in
/// vector sizes; intended for inspection and small inputs.
pub fn fv_digraph(k: &SimplicialComplex, field: &MultivectorField) -> Result<Vec<Vec<SimplexId>>> {
    (0..k.len())
        .map(|s| {
            let mut out = field.fv(k, s)?;
            out.retain(|&t| t != s);
            Ok(out)
        })
        .collect()
}

/// True iff every F_V path that starts and ends in `set` stays inside it.
pub fn is_morse_set(
    k: &SimplicialComplex,
    field: &MultivectorField,
    set: &[SimplexId],
) -> Result<bool> {
    let n = k.len();
    let mut member = vec![false; n];
    for &s in set {
        k.check_id(s)?;
        member[s] = true;
    }
    let forward = reach(k, field, set, |s| k.facets(s));
    let backward = reach(k, field, set, |s| k.cofacets(s));
    Ok((0..n).all(|s| member[s] || !(forward[s] && backward[s])))
}

// Simplices reachable from `start` along `step` edges plus vector membership.
fn reach<'a, F>(
    k: &'a SimplicialComplex,
    field: &MultivectorField,
    start: &[SimplexId],
    step: F,
) -> Vec<bool>
where
    F: Fn(SimplexId) -> &'a [SimplexId],
{
    let n = k.len();
    let mut seen = vec![false; n];
    let mut expanded = vec![false; n];
    let mut stack: Vec<SimplexId> = Vec::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(s) = stack.pop() {
        let v = field.vector_of(s);
        if !expanded[v] {
            expanded[v] = true;
            for &t in field.vector(v) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        for &t in step(s) {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// A P-filtered ordering of all simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredOrder {
    order: Vec<SimplexId>,
    position: Vec<usize>,
    grading: Vec<MorseSetId>,
    /// Rank of each Morse set in the linear extension used.
    set_rank: Vec<usize>,
    linear_ext: Vec<MorseSetId>,
}

impl FilteredOrder {
    /// Concatenates Morse-set blocks in `linear_ext` order. A block uses the
    /// order in `within` when present, `(dim, id)` otherwise.
    pub fn new(
        k: &SimplicialComplex,
        md: &MorseDecomposition,
        linear_ext: &[MorseSetId],
        within: &HashMap<MorseSetId, Vec<SimplexId>>,
    ) -> Result<Self> {
        md.check_linear_extension(linear_ext)?;
        for (&p, w) in within {
            if p >= md.num_sets() {
                return Err(Error::NonAdmissibleOrder(format!("unknown Morse set {p}")));
            }
            let mut sorted = w.clone();
            sorted.sort_unstable();
            if sorted != md.set(p) {
                return Err(Error::NonAdmissibleOrder(format!(
                    "order for Morse set {p} is not a permutation of its simplices"
                )));
            }
            if w.windows(2).any(|x| k.dim(x[0]) > k.dim(x[1])) {
                return Err(Error::NonAdmissibleOrder(format!(
                    "dimension decreases inside Morse set {p}"
                )));
            }
        }
        let mut order = Vec::with_capacity(k.len());
        let mut set_rank = vec![0; md.num_sets()];
        for (r, &p) in linear_ext.iter().enumerate() {
            set_rank[p] = r;
            match within.get(&p) {
                Some(w) => order.extend_from_slice(w),
                None => {
                    let start = order.len();
                    order.extend_from_slice(md.set(p));
                    order[start..].sort_by_key(|&s| (k.dim(s), s));
                }
            }
        }
        let mut position = vec![0; k.len()];
        for (i, &s) in order.iter().enumerate() {
            position[s] = i;
        }
        let grading = (0..k.len()).map(|s| md.set_of(s)).collect();
        Ok(Self {
            order,
            position,
            grading,
            set_rank,
            linear_ext: linear_ext.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Simplex at position `i`.
    pub fn simplex_at(&self, i: usize) -> SimplexId {
        self.order[i]
    }

    pub fn order(&self) -> &[SimplexId] {
        &self.order
    }

    pub fn position(&self, s: SimplexId) -> usize {
        self.position[s]
    }

    /// Morse set of simplex `s`.
    pub fn grading(&self, s: SimplexId) -> MorseSetId {
        self.grading[s]
    }

    pub fn set_rank(&self, p: MorseSetId) -> usize {
        self.set_rank[p]
    }

    pub fn linear_ext(&self) -> &[MorseSetId] {
        &self.linear_ext
    }

    /// Simplices of Morse set `p` in the order used here.
    pub fn block(&self, p: MorseSetId) -> Vec<SimplexId> {
        self.order
            .iter()
            .copied()
            .filter(|&s| self.grading[s] == p)
            .collect()
    }

    /// Within-set orders, one entry per Morse set.
    pub fn within_orders(&self) -> HashMap<MorseSetId, Vec<SimplexId>> {
        let mut out: HashMap<MorseSetId, Vec<SimplexId>> = HashMap::new();
        for &s in &self.order {
            out.entry(self.grading[s]).or_default().push(s);
        }
        out
    }
}

/// Random within-set orders that keep dimension non-decreasing.
pub fn random_within_orders<R: Rng>(
    k: &SimplicialComplex,
    md: &MorseDecomposition,
    rng: &mut R,
) -> HashMap<MorseSetId, Vec<SimplexId>> {
    let mut out = HashMap::new();
    for p in 0..md.num_sets() {
        let mut block = md.set(p).to_vec();
        block.shuffle(rng);
        block.sort_by_key(|&s| k.dim(s));
        out.insert(p, block);
    }
    out
}
