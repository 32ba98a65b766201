//! Connection-matrix reductions and extraction.
//!
//! `conmat` only adds homogeneous columns into columns to their right.
//! `connectmat` additionally lets a homogeneous column on the right act as a
//! source and mirrors every column addition with a row addition; it is kept as
//! a cross-check and as the baseline for timing comparisons.

use std::collections::{BTreeSet, HashSet};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::complex::SimplexId;
use crate::error::{Error, Result};
use crate::homology;
use crate::morse::{MorseDecomposition, MorseSetId};
use crate::z2matrix::{xor_sorted, FilteredMatrix};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    ConMat,
    ConnectMat,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "conmat" => Ok(Self::ConMat),
            "connectmat" => Ok(Self::ConnectMat),
            other => Err(format!(
                "unknown algorithm {other:?} (expected conmat or connectmat)"
            )),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ConMat => "conmat",
            Self::ConnectMat => "connectmat",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ReduceOptions {
    /// Keep every addition in `Reduction::log`.
    pub record_log: bool,
    /// Give up with `Error::Timeout` once this instant has passed.
    pub deadline: Option<Instant>,
    /// Run `FilteredMatrix::check_invariants` before reducing.
    pub check_input: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            record_log: false,
            deadline: None,
            check_input: true,
        }
    }
}

/// One elementary operation, in matrix positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Step {
    Column { source: usize, target: usize },
    Row { source: usize, target: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceStats {
    pub column_additions: usize,
    pub row_additions: usize,
    /// Columns that were not homogeneous in the input but are in the output.
    pub homogeneity_violations: usize,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub matrix: FilteredMatrix,
    pub connection: ConnectionMatrix,
    pub stats: ReduceStats,
    pub log: Vec<Step>,
}

pub fn reduce(a: FilteredMatrix, algorithm: Algorithm, opts: &ReduceOptions) -> Result<Reduction> {
    match algorithm {
        Algorithm::ConMat => conmat(a, opts),
        Algorithm::ConnectMat => connectmat(a, opts),
    }
}

fn check_deadline(opts: &ReduceOptions) -> Result<()> {
    match opts.deadline {
        Some(d) if Instant::now() >= d => Err(Error::Timeout),
        _ => Ok(()),
    }
}

/// Largest entry of `col` strictly below `i`.
fn next_below(col: &[usize], i: usize) -> Option<usize> {
    let p = col.partition_point(|&r| r < i);
    (p > 0).then(|| col[p - 1])
}

pub fn conmat(mut a: FilteredMatrix, opts: &ReduceOptions) -> Result<Reduction> {
    if opts.check_input {
        a.check_invariants()?;
    }
    let n = a.n();
    let mut stats = ReduceStats::default();
    let mut log = Vec::new();
    // owner[i]: the processed homogeneous column whose low is i.
    let mut owner = vec![NONE; n];
    for j in 0..n {
        check_deadline(opts)?;
        let was_homogeneous = a.is_homogeneous(j);
        // Entries at index >= pos are done. A source has its low at the
        // cursor row, so an addition leaves the entries above it untouched.
        let mut pos = a.col(j).len();
        while pos > 0 {
            let i = a.col(j)[pos - 1];
            let s = owner[i];
            if s == NONE {
                pos -= 1;
                continue;
            }
            assert!(s < j, "conmat source {s} is not left of target {j}");
            let above = a.col(j).len() - pos;
            a.add_column(s, j);
            pos = a.col(j).len() - above;
            stats.column_additions += 1;
            if opts.record_log {
                log.push(Step::Column {
                    source: s,
                    target: j,
                });
            }
        }
        if a.is_homogeneous(j) {
            let l = a.low(j).expect("homogeneous column has a low");
            if owner[l] != NONE {
                return Err(Error::MatrixInvariant(format!(
                    "row {l} is the low of homogeneous columns {} and {j}",
                    owner[l]
                )));
            }
            owner[l] = j;
            if !was_homogeneous {
                stats.homogeneity_violations += 1;
            }
        }
    }
    let connection = ConnectionMatrix::extract(&a);
    Ok(Reduction {
        matrix: a,
        connection,
        stats,
        log,
    })
}

/// Column-and-row state for `connectmat`: rows mirror the columns, and
/// `homogeneous_at[i]` holds every homogeneous column whose low is `i`.
struct RowMirror {
    rows: Vec<Vec<usize>>,
    registered: Vec<usize>,
    homogeneous_at: Vec<BTreeSet<usize>>,
}

impl RowMirror {
    fn new(a: &FilteredMatrix) -> Self {
        let n = a.n();
        let mut rows = vec![Vec::new(); n];
        for j in 0..n {
            for &i in a.col(j) {
                rows[i].push(j);
            }
        }
        let mut m = Self {
            rows,
            registered: vec![NONE; n],
            homogeneous_at: vec![BTreeSet::new(); n],
        };
        for j in 0..n {
            m.refresh(a, j);
        }
        m
    }

    fn refresh(&mut self, a: &FilteredMatrix, c: usize) {
        let now = if a.is_homogeneous(c) {
            a.low(c).unwrap()
        } else {
            NONE
        };
        let before = self.registered[c];
        if before == now {
            return;
        }
        if before != NONE {
            self.homogeneous_at[before].remove(&c);
        }
        if now != NONE {
            self.homogeneous_at[now].insert(c);
        }
        self.registered[c] = now;
    }

    /// `min { s ≠ j : low(s) = i, s homogeneous }`.
    fn min_source(&self, i: usize, j: usize) -> Option<usize> {
        self.homogeneous_at[i].iter().copied().find(|&s| s != j)
    }

    fn toggle_row_entry(&mut self, r: usize, c: usize) {
        let row = &mut self.rows[r];
        match row.binary_search(&c) {
            Ok(p) => {
                row.remove(p);
            }
            Err(p) => row.insert(p, c),
        }
    }
}

pub fn connectmat(mut a: FilteredMatrix, opts: &ReduceOptions) -> Result<Reduction> {
    if opts.check_input {
        a.check_invariants()?;
    }
    let n = a.n();
    let mut stats = ReduceStats::default();
    let mut log = Vec::new();
    let initially: Vec<bool> = (0..n).map(|j| a.is_homogeneous(j)).collect();
    let mut mirror = RowMirror::new(&a);
    let mut row_j = Vec::new();
    for j in 0..n {
        check_deadline(opts)?;
        let mut cursor = a.low(j);
        while let Some(i) = cursor {
            if let Some(s) = mirror.min_source(i, j) {
                // Column s into column j.
                for &r in a.col(s) {
                    mirror.toggle_row_entry(r, j);
                }
                a.add_column(s, j);
                mirror.refresh(&a, j);
                stats.column_additions += 1;
                // Row j into row s.
                row_j.clone_from(&mirror.rows[j]);
                for &c in &row_j {
                    toggle_col_entry(&mut a, s, c);
                    mirror.refresh(&a, c);
                }
                let mut merged = Vec::new();
                xor_sorted(&mirror.rows[s], &row_j, &mut merged);
                mirror.rows[s] = merged;
                stats.row_additions += 1;
                if opts.record_log {
                    log.push(Step::Column {
                        source: s,
                        target: j,
                    });
                    log.push(Step::Row {
                        source: j,
                        target: s,
                    });
                }
            }
            cursor = next_below(a.col(j), i);
        }
    }
    stats.homogeneity_violations = (0..n)
        .filter(|&j| !initially[j] && a.is_homogeneous(j))
        .count();
    let connection = ConnectionMatrix::extract(&a);
    Ok(Reduction {
        matrix: a,
        connection,
        stats,
        log,
    })
}

fn toggle_col_entry(a: &mut FilteredMatrix, r: usize, c: usize) {
    let col = &mut a.cols_mut()[c];
    match col.binary_search(&r) {
        Ok(p) => {
            col.remove(p);
        }
        Err(p) => col.insert(p, r),
    }
}

/// Replays the row addition paired with every column addition of a ConMat
/// log (row `j` into row `s` for column `s` into `j`), giving `U·A·V`: the
/// boundary matrix in the reduced basis. `A_out = A·V` alone does not square
/// to zero; this matrix does, and it agrees with `A_out` on the kept indices.
pub fn with_paired_row_additions(a_out: &FilteredMatrix, log: &[Step]) -> FilteredMatrix {
    let mut m = a_out.clone();
    let n = m.n();
    for step in log {
        let Step::Column {
            source: s,
            target: j,
        } = *step
        else {
            continue;
        };
        for k in 0..n {
            if m.col(k).binary_search(&j).is_ok() {
                toggle_col_entry(&mut m, s, k);
            }
        }
    }
    m
}

/// Standard left-to-right persistence reduction that ignores homogeneity.
/// Returns the reduced matrix and the number of column additions.
pub fn complete_reduction(mut a: FilteredMatrix) -> (FilteredMatrix, usize) {
    let n = a.n();
    let mut owner = vec![NONE; n];
    let mut additions = 0;
    for j in 0..n {
        while let Some(l) = a.low(j) {
            let s = owner[l];
            if s == NONE {
                owner[l] = j;
                break;
            }
            a.add_column(s, j);
            additions += 1;
        }
    }
    (a, additions)
}

/// Persistence pairs `(low(j), j)` of a reduced matrix, ordered by `j`.
pub fn pairs(a: &FilteredMatrix) -> Vec<(usize, usize)> {
    (0..a.n())
        .filter_map(|j| a.low(j).map(|l| (l, j)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedReport {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
}

impl ReducedReport {
    pub fn all(&self) -> bool {
        self.r1 && self.r2 && self.r3
    }
}

/// R1: homogeneous columns have distinct lows. R2: no homogeneous column is
/// targetable. R3: no entry of a column sits on the low of a homogeneous
/// column to its left.
pub fn check_reduced(a: &FilteredMatrix) -> ReducedReport {
    let n = a.n();
    let mut first_owner = vec![NONE; n];
    let mut r1 = true;
    for j in 0..n {
        if a.is_homogeneous(j) {
            let l = a.low(j).unwrap();
            if first_owner[l] == NONE {
                first_owner[l] = j;
            } else {
                r1 = false;
            }
        }
    }
    let (jh, jt) = a.targetable_of();
    let targeted: HashSet<usize> = jt.into_iter().collect();
    let r2 = jh.iter().all(|j| !targeted.contains(j));
    let r3 = (0..n).all(|j| {
        a.col(j)
            .iter()
            .all(|&i| first_owner[i] == NONE || first_owner[i] >= j)
    });
    ReducedReport { r1, r2, r3 }
}

/// The submatrix on `J = I_n \ J_h \ J_t` with its chain-labelled basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    /// Simplex standing for each kept basis element, in filtered order.
    pub kept: Vec<SimplexId>,
    pub grading: Vec<MorseSetId>,
    pub dims: Vec<usize>,
    /// Nonzero `(row, column)` pairs as indices into `kept`, sorted.
    pub entries: Vec<(usize, usize)>,
    /// Accumulated chain of each kept column; empty when chains were not tracked.
    #[serde(default)]
    pub basis_chains: Vec<Vec<SimplexId>>,
}

impl ConnectionMatrix {
    pub fn extract(a: &FilteredMatrix) -> Self {
        let n = a.n();
        let (jh, jt) = a.targetable_of();
        let mut dropped = vec![false; n];
        for j in jh.into_iter().chain(jt) {
            dropped[j] = true;
        }
        let mut index = vec![NONE; n];
        let mut kept_pos = Vec::new();
        for j in 0..n {
            if !dropped[j] {
                index[j] = kept_pos.len();
                kept_pos.push(j);
            }
        }
        let mut entries = Vec::new();
        for (cj, &j) in kept_pos.iter().enumerate() {
            for &i in a.col(j) {
                if index[i] != NONE {
                    entries.push((index[i], cj));
                }
            }
        }
        entries.sort_unstable();
        let basis_chains = if a.tracks_chains() {
            kept_pos
                .iter()
                .map(|&j| a.chain_simplices(j).unwrap())
                .collect()
        } else {
            Vec::new()
        };
        Self {
            kept: kept_pos.iter().map(|&j| a.simplex(j)).collect(),
            grading: kept_pos.iter().map(|&j| a.grading(j)).collect(),
            dims: kept_pos.iter().map(|&j| a.dim(j)).collect(),
            entries,
            basis_chains,
        }
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    /// Column-major row lists.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.len()];
        for &(i, j) in &self.entries {
            cols[j].push(i);
        }
        cols
    }

    /// Nonzero rows of the column standing for simplex `s`, as simplex ids.
    pub fn column_of(&self, s: SimplexId) -> Option<Vec<SimplexId>> {
        let j = self.kept.iter().position(|&x| x == s)?;
        Some(
            self.entries
                .iter()
                .filter(|e| e.1 == j)
                .map(|e| self.kept[e.0])
                .collect(),
        )
    }

    pub fn betti(&self) -> Vec<usize> {
        homology::betti_from_boundary(&self.dims, &self.columns())
    }

    /// Squares to zero, strictly filtered with zero diagonal blocks, graded.
    pub fn check_invariants(&self, md: &MorseDecomposition) -> Result<()> {
        let cols = self.columns();
        let mut acc = Vec::new();
        let mut tmp = Vec::new();
        for (j, col) in cols.iter().enumerate() {
            acc.clear();
            for &i in col {
                xor_sorted(&acc, &cols[i], &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
            if !acc.is_empty() {
                return Err(Error::MatrixInvariant(format!(
                    "connection matrix squared is nonzero in column {j}"
                )));
            }
        }
        let mut checked = HashSet::new();
        for &(i, j) in &self.entries {
            let (gi, gj) = (self.grading[i], self.grading[j]);
            if gi == gj {
                return Err(Error::MatrixInvariant(format!(
                    "entry ({i}, {j}) lies in the diagonal block of Morse set {gi}"
                )));
            }
            if checked.insert((gi, gj)) && !md.leq(gi, gj) {
                return Err(Error::MatrixInvariant(format!(
                    "entry ({i}, {j}) runs from Morse set {gj} to {gi}, which is not below it"
                )));
            }
            if self.dims[i] + 1 != self.dims[j] {
                return Err(Error::MatrixInvariant(format!(
                    "entry ({i}, {j}) is not boundary-graded"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedComparison {
    pub equal: bool,
    pub witness: Option<String>,
}

/// Compares two connection matrices through the correspondence that matches
/// basis elements standing for the same simplex.
pub fn morse_fixed_compare(a: &ConnectionMatrix, b: &ConnectionMatrix) -> FixedComparison {
    let fail = |w: String| FixedComparison {
        equal: false,
        witness: Some(w),
    };
    let sa: BTreeSet<SimplexId> = a.kept.iter().copied().collect();
    let sb: BTreeSet<SimplexId> = b.kept.iter().copied().collect();
    if sa.len() != a.kept.len() || sb.len() != b.kept.len() {
        return fail("kept simplices repeat".into());
    }
    if let Some(s) = sa.symmetric_difference(&sb).next() {
        return fail(format!("simplex {s} is kept on one side only"));
    }
    let ea: BTreeSet<(SimplexId, SimplexId)> = a
        .entries
        .iter()
        .map(|&(i, j)| (a.kept[i], a.kept[j]))
        .collect();
    let eb: BTreeSet<(SimplexId, SimplexId)> = b
        .entries
        .iter()
        .map(|&(i, j)| (b.kept[i], b.kept[j]))
        .collect();
    if let Some((r, c)) = ea.symmetric_difference(&eb).next() {
        return fail(format!(
            "entry (row simplex {r}, column simplex {c}) differs"
        ));
    }
    FixedComparison {
        equal: true,
        witness: None,
    }
}
