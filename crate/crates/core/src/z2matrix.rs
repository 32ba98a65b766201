//! Sparse ℤ₂ column matrices over a P-filtered elementary-chain basis.

use std::fmt::Write as _;

use crate::complex::{SimplexId, SimplicialComplex};
use crate::error::{Error, Result};
use crate::morse::{FilteredOrder, MorseSetId};

/// Symmetric difference of two ascending index lists, written to `out`.
pub fn xor_sorted(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    out.clear();
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Boundary matrix of a complex in a P-filtered simplex order.
///
/// Row and column `i` both stand for the simplex at position `i` of the order.
/// Columns are ascending row lists. When chain tracking is on, `chain(j)` is
/// the set of basis positions whose sum column `j` currently represents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredMatrix {
    cols: Vec<Vec<usize>>,
    grading: Vec<MorseSetId>,
    dims: Vec<usize>,
    chains: Option<Vec<Vec<usize>>>,
    order: FilteredOrder,
    scratch: Vec<usize>,
}

impl FilteredMatrix {
    /// Column `j` lists the positions of the facets of the `j`-th simplex.
    pub fn boundary(
        k: &SimplicialComplex,
        order: &FilteredOrder,
        track_chains: bool,
    ) -> Result<Self> {
        if order.len() != k.len() {
            return Err(Error::NotPermutation(format!(
                "order has {} entries, complex has {}",
                order.len(),
                k.len()
            )));
        }
        let mut seen = vec![false; k.len()];
        for &s in order.order() {
            if s >= k.len() || seen[s] {
                return Err(Error::NotPermutation(format!(
                    "simplex {s} repeated or unknown"
                )));
            }
            seen[s] = true;
        }
        let n = k.len();
        let mut cols = Vec::with_capacity(n);
        let mut grading = Vec::with_capacity(n);
        let mut dims = Vec::with_capacity(n);
        for j in 0..n {
            let s = order.simplex_at(j);
            let mut col: Vec<usize> = k.facets(s).iter().map(|&f| order.position(f)).collect();
            col.sort_unstable();
            cols.push(col);
            grading.push(order.grading(s));
            dims.push(k.dim(s));
        }
        let chains = track_chains.then(|| (0..n).map(|j| vec![j]).collect());
        Ok(Self {
            cols,
            grading,
            dims,
            chains,
            order: order.clone(),
            scratch: Vec::new(),
        })
    }

    /// Assembles a matrix from raw parts; used for Conley complexes and tests.
    pub fn from_parts(
        cols: Vec<Vec<usize>>,
        grading: Vec<MorseSetId>,
        dims: Vec<usize>,
        order: FilteredOrder,
    ) -> Self {
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        Self {
            cols,
            grading,
            dims,
            chains: None,
            order,
            scratch: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub(crate) fn cols_mut(&mut self) -> &mut Vec<Vec<usize>> {
        &mut self.cols
    }

    pub fn grading(&self, j: usize) -> MorseSetId {
        self.grading[j]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j]
    }

    pub fn order(&self) -> &FilteredOrder {
        &self.order
    }

    /// Simplex standing for basis position `j`.
    pub fn simplex(&self, j: usize) -> SimplexId {
        self.order.simplex_at(j)
    }

    pub fn tracks_chains(&self) -> bool {
        self.chains.is_some()
    }

    /// Basis positions accumulated into column `j`, ascending.
    pub fn chain(&self, j: usize) -> Option<&[usize]> {
        self.chains.as_ref().map(|c| c[j].as_slice())
    }

    /// Chain of column `j` as simplex ids, ascending.
    pub fn chain_simplices(&self, j: usize) -> Option<Vec<SimplexId>> {
        self.chain(j).map(|c| {
            let mut out: Vec<SimplexId> = c.iter().map(|&i| self.simplex(i)).collect();
            out.sort_unstable();
            out
        })
    }

    pub fn low(&self, j: usize) -> Option<usize> {
        self.cols[j].last().copied()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Adds column `s` into column `j` (and chain `s` into chain `j`).
    pub fn add_column(&mut self, s: usize, j: usize) {
        debug_assert_ne!(s, j);
        xor_sorted(&self.cols[j], &self.cols[s], &mut self.scratch);
        std::mem::swap(&mut self.cols[j], &mut self.scratch);
        if let Some(chains) = self.chains.as_mut() {
            xor_sorted(&chains[j], &chains[s], &mut self.scratch);
            std::mem::swap(&mut chains[j], &mut self.scratch);
        }
    }

    /// `σ_j` and `σ_low(j)` share a Morse set.
    pub fn is_homogeneous(&self, j: usize) -> bool {
        self.low(j)
            .is_some_and(|l| self.grading[l] == self.grading[j])
    }

    /// Homogeneous columns `J_h` and their lows `J_t`, both ascending.
    pub fn targetable_of(&self) -> (Vec<usize>, Vec<usize>) {
        let jh: Vec<usize> = (0..self.n()).filter(|&j| self.is_homogeneous(j)).collect();
        let mut jt: Vec<usize> = jh.iter().map(|&j| self.low(j).unwrap()).collect();
        jt.sort_unstable();
        jt.dedup();
        (jh, jt)
    }

    /// Upper triangular, filtered, boundary-graded and squaring to zero.
    pub fn check_invariants(&self) -> Result<()> {
        for j in 0..self.n() {
            for &i in &self.cols[j] {
                if i >= j {
                    return Err(Error::MatrixInvariant(format!(
                        "entry ({i}, {j}) on or below the diagonal"
                    )));
                }
                if self.order.set_rank(self.grading[i]) > self.order.set_rank(self.grading[j]) {
                    return Err(Error::MatrixInvariant(format!(
                        "entry ({i}, {j}) breaks the filtration"
                    )));
                }
                if self.dims[i] + 1 != self.dims[j] {
                    return Err(Error::MatrixInvariant(format!(
                        "entry ({i}, {j}) is not boundary-graded"
                    )));
                }
            }
        }
        self.check_square_zero()
    }

    /// `A·A = 0`.
    pub fn check_square_zero(&self) -> Result<()> {
        let mut acc = Vec::new();
        let mut tmp = Vec::new();
        for j in 0..self.n() {
            acc.clear();
            for &i in &self.cols[j] {
                xor_sorted(&acc, &self.cols[i], &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
            if !acc.is_empty() {
                return Err(Error::MatrixInvariant(format!(
                    "column {j} of A·A is nonzero"
                )));
            }
        }
        Ok(())
    }

    /// Each column equals the boundary of its accumulated chain.
    pub fn check_chains(&self, k: &SimplicialComplex) -> Result<()> {
        let Some(chains) = &self.chains else {
            return Ok(());
        };
        for (j, chain) in chains.iter().enumerate() {
            if chain.binary_search(&j).is_err() {
                return Err(Error::MatrixInvariant(format!(
                    "chain {j} lost its own simplex"
                )));
            }
            let simplices: Vec<SimplexId> = chain.iter().map(|&i| self.simplex(i)).collect();
            let mut expect: Vec<usize> = k
                .chain_boundary(&simplices)
                .iter()
                .map(|&f| self.order.position(f))
                .collect();
            expect.sort_unstable();
            if expect != self.cols[j] {
                return Err(Error::MatrixInvariant(format!(
                    "column {j} differs from the boundary of its chain"
                )));
            }
        }
        Ok(())
    }

    /// Coordinate-list dump: a JSON header line with order and grading, then
    /// one `i j` line per nonzero entry.
    pub fn dump(&self) -> String {
        let header = serde_json::json!({
            "n": self.n(),
            "order": self.order.order(),
            "grading": self.grading,
            "dims": self.dims,
        });
        let mut out = header.to_string();
        out.push('\n');
        for (j, col) in self.cols.iter().enumerate() {
            for &i in col {
                let _ = writeln!(out, "{i} {j}");
            }
        }
        out
    }
}
