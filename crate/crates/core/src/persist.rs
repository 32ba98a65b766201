//! Lyapunov functions on Morse decompositions and their persistence barcodes.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex::{SimplexId, SimplicialComplex};
use crate::error::{Error, Result};
use crate::homology;
use crate::morse::{FilteredOrder, MorseDecomposition, MorseSetId};
use crate::reduce::{complete_reduction, conmat, ReduceOptions};
use crate::z2matrix::FilteredMatrix;

/// One value per Morse set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovFunction {
    pub values: Vec<f64>,
}

impl LyapunovFunction {
    /// `f(p) = |⋃_{q ≤_P p} M_q|`.
    pub fn downset(md: &MorseDecomposition) -> Self {
        let down = md.downsets();
        let values = down
            .iter()
            .map(|bits| {
                let mut total = 0usize;
                for (w, &word) in bits.iter().enumerate() {
                    let mut word = word;
                    while word != 0 {
                        let b = word.trailing_zeros() as usize;
                        total += md.set(w * 64 + b).len();
                        word &= word - 1;
                    }
                }
                total as f64
            })
            .collect();
        Self { values }
    }

    pub fn constant(md: &MorseDecomposition, value: f64) -> Self {
        Self {
            values: vec![value; md.num_sets()],
        }
    }

    /// Values keyed by Morse-set id; every set needs a value.
    pub fn from_map(md: &MorseDecomposition, map: &HashMap<MorseSetId, f64>) -> Result<Self> {
        let m = md.num_sets();
        if map.len() != m || map.keys().any(|&p| p >= m) {
            return Err(Error::LyapunovArity {
                expected: m,
                got: map.len(),
            });
        }
        let values = (0..m).map(|p| map[&p]).collect();
        let f = Self { values };
        f.validate(md)?;
        Ok(f)
    }

    /// A random monotone assignment: each set gets the maximum of its lower
    /// neighbours plus a random step in `{0, 1, 2}`. Ties are deliberate.
    pub fn random<R: Rng>(md: &MorseDecomposition, rng: &mut R) -> Self {
        let mut values = vec![0.0; md.num_sets()];
        for &p in md.linear_ext() {
            let base = md
                .lower_neighbours(p)
                .iter()
                .map(|&q| values[q])
                .fold(0.0, f64::max);
            values[p] = base + rng.gen_range(0..3) as f64;
        }
        Self { values }
    }

    pub fn value(&self, p: MorseSetId) -> f64 {
        self.values[p]
    }

    /// Monotone along every condensation edge, hence along `≤_P`.
    pub fn validate(&self, md: &MorseDecomposition) -> Result<()> {
        if self.values.len() != md.num_sets() {
            return Err(Error::LyapunovArity {
                expected: md.num_sets(),
                got: self.values.len(),
            });
        }
        for (lower, upper) in md.poset_edges() {
            let (a, b) = (self.values[lower], self.values[upper]);
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::NotLyapunov {
                    lower,
                    upper,
                    lower_value: a,
                    upper_value: b,
                });
            }
        }
        Ok(())
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Linear extension sorted by `f`, ties broken by the default extension.
pub fn f_compatible_order(
    md: &MorseDecomposition,
    f: &LyapunovFunction,
) -> Result<Vec<MorseSetId>> {
    f.validate(md)?;
    let mut rank = vec![0; md.num_sets()];
    for (r, &p) in md.linear_ext().iter().enumerate() {
        rank[p] = r;
    }
    let mut ext: Vec<MorseSetId> = md.linear_ext().to_vec();
    ext.sort_by(|&p, &q| {
        f.values[p]
            .total_cmp(&f.values[q])
            .then(rank[p].cmp(&rank[q]))
    });
    Ok(ext)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    #[serde(serialize_with = "ser_death", deserialize_with = "de_death")]
    pub death: f64,
}

fn ser_death<S: Serializer>(d: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if d.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*d)
    }
}

fn de_death<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Death {
        Num(f64),
        Text(String),
    }
    match Death::deserialize(d)? {
        Death::Num(x) => Ok(x),
        Death::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Death::Text(t) => Err(serde::de::Error::custom(format!("bad death value {t:?}"))),
    }
}

impl Bar {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// Bars sorted by `(dim, birth, death)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    pub bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(mut bars: Vec<Bar>) -> Self {
        bars.sort_by(Bar::cmp_key);
        Self { bars }
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == dim)
    }

    /// Finite bars of `dim`, longest first.
    pub fn finite_by_length(&self, dim: usize) -> Vec<Bar> {
        let mut out: Vec<Bar> = self
            .in_dim(dim)
            .filter(|b| !b.is_infinite())
            .copied()
            .collect();
        out.sort_by(|a, b| b.length().total_cmp(&a.length()).then(a.cmp_key(b)));
        out
    }

    /// Number of infinite bars per dimension.
    pub fn infinite_counts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for b in self.bars.iter().filter(|b| b.is_infinite()) {
            if out.len() <= b.dim {
                out.resize(b.dim + 1, 0);
            }
            out[b.dim] += 1;
        }
        out
    }

    pub fn without_zero_length(&self) -> Self {
        Self {
            bars: self
                .bars
                .iter()
                .filter(|b| b.length() != 0.0)
                .copied()
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for b in &self.bars {
            if b.is_infinite() {
                let _ = writeln!(out, "{},{},inf", b.dim, b.birth);
            } else {
                let _ = writeln!(out, "{},{},{}", b.dim, b.birth, b.death);
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "dim,birth,death" => {}
            _ => return Err("line 1: expected header dim,birth,death".into()),
        }
        let mut bars = Vec::new();
        for (no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(format!("line {}: expected 3 fields", no + 1));
            }
            let dim = fields[0]
                .parse()
                .map_err(|e| format!("line {}: dim: {e}", no + 1))?;
            let birth = fields[1]
                .parse()
                .map_err(|e| format!("line {}: birth: {e}", no + 1))?;
            let death = if fields[2] == "inf" {
                f64::INFINITY
            } else {
                fields[2]
                    .parse()
                    .map_err(|e| format!("line {}: death: {e}", no + 1))?
            };
            bars.push(Bar { dim, birth, death });
        }
        Ok(Self::new(bars))
    }

    /// Horizontal bars, one row each, sorted by `(dim, birth)`. With `log`,
    /// positions are `log10(1 + value)`.
    pub fn to_svg(&self, log: bool) -> String {
        const WIDTH: f64 = 640.0;
        const LEFT: f64 = 60.0;
        const ROW: f64 = 14.0;
        let scale = |v: f64| if log { (1.0 + v.max(0.0)).log10() } else { v };
        let finite_max = self
            .bars
            .iter()
            .flat_map(|b| [b.birth, b.death])
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        let top = scale(finite_max).max(1e-12) * 1.1;
        let x = |v: f64| {
            if v.is_infinite() {
                LEFT + WIDTH
            } else {
                LEFT + WIDTH * scale(v) / top
            }
        };
        let height = ROW * (self.bars.len() as f64 + 2.0);
        let colours = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{height}" viewBox="0 0 {} {height}">"#,
            LEFT + WIDTH + 20.0,
            LEFT + WIDTH + 20.0
        );
        for (row, b) in self.bars.iter().enumerate() {
            let y = ROW * (row as f64 + 1.0);
            let colour = colours[b.dim % colours.len()];
            let _ = writeln!(
                out,
                r#"  <line x1="{:.2}" y1="{y}" x2="{:.2}" y2="{y}" stroke="{colour}" stroke-width="6"><title>dim {} [{}, {})</title></line>"#,
                x(b.birth),
                x(b.death),
                b.dim,
                b.birth,
                if b.is_infinite() {
                    "inf".to_string()
                } else {
                    b.death.to_string()
                }
            );
            let _ = writeln!(
                out,
                r#"  <text x="4" y="{:.1}" font-size="10" font-family="monospace">H{}</text>"#,
                y + 3.0,
                b.dim
            );
        }
        let axis = if log { "log10(1 + f)" } else { "f" };
        let _ = writeln!(
            out,
            r#"  <text x="{LEFT}" y="{:.1}" font-size="10" font-family="monospace">{axis}: 0 .. {finite_max}</text>"#,
            height - 2.0
        );
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PersistOptions {
    pub keep_zero_length: bool,
}

fn bars_from_lows(
    lows: &[Option<usize>],
    dims: &[usize],
    value: impl Fn(usize) -> f64,
    opts: PersistOptions,
) -> Barcode {
    let n = lows.len();
    let mut targeted = vec![false; n];
    for l in lows.iter().flatten() {
        targeted[*l] = true;
    }
    let mut bars = Vec::new();
    for j in 0..n {
        match lows[j] {
            Some(i) => {
                let bar = Bar {
                    dim: dims[i],
                    birth: value(i),
                    death: value(j),
                };
                if opts.keep_zero_length || bar.length() != 0.0 {
                    bars.push(bar);
                }
            }
            None if !targeted[j] => bars.push(Bar {
                dim: dims[j],
                birth: value(j),
                death: f64::INFINITY,
            }),
            None => {}
        }
    }
    Barcode::new(bars)
}

/// Persistence of `md` under `f` from the full boundary matrix of `K` in the
/// f-compatible order. `within` fixes simplex orders inside Morse sets.
pub fn morse_persistence_with(
    k: &SimplicialComplex,
    md: &MorseDecomposition,
    f: &LyapunovFunction,
    within: &HashMap<MorseSetId, Vec<SimplexId>>,
    opts: PersistOptions,
) -> Result<Barcode> {
    let ext = f_compatible_order(md, f)?;
    let order = FilteredOrder::new(k, md, &ext, within)?;
    let a = FilteredMatrix::boundary(k, &order, false)?;
    let (r, _) = complete_reduction(a);
    let lows: Vec<Option<usize>> = (0..r.n()).map(|j| r.low(j)).collect();
    let dims: Vec<usize> = (0..r.n()).map(|j| r.dim(j)).collect();
    Ok(bars_from_lows(
        &lows,
        &dims,
        |j| f.values[r.grading(j)],
        opts,
    ))
}

pub fn morse_persistence(
    k: &SimplicialComplex,
    md: &MorseDecomposition,
    f: &LyapunovFunction,
    opts: PersistOptions,
) -> Result<Barcode> {
    morse_persistence_with(k, md, f, &HashMap::new(), opts)
}

/// Persistence of a Conley complex of `md` (computed by `conmat` in the
/// default order) filtered by the f-compatible order.
pub fn conley_persistence(
    k: &SimplicialComplex,
    md: &MorseDecomposition,
    f: &LyapunovFunction,
    opts: PersistOptions,
) -> Result<Barcode> {
    let ext = f_compatible_order(md, f)?;
    let a = FilteredMatrix::boundary(k, &md.filtered_order(k), false)?;
    let c = conmat(a, &ReduceOptions::default())?.connection;
    let mut rank = vec![0; md.num_sets()];
    for (r, &p) in ext.iter().enumerate() {
        rank[p] = r;
    }
    // Stable: keeps the dimension order inside each Morse set.
    let mut perm: Vec<usize> = (0..c.len()).collect();
    perm.sort_by_key(|&i| rank[c.grading[i]]);
    let mut new_index = vec![0; c.len()];
    for (ni, &i) in perm.iter().enumerate() {
        new_index[i] = ni;
    }
    let old_cols = c.columns();
    let mut cols: Vec<Vec<usize>> = perm
        .iter()
        .map(|&i| {
            let mut col: Vec<usize> = old_cols[i].iter().map(|&r| new_index[r]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let lows = homology::reduce_lows(&mut cols);
    let dims: Vec<usize> = perm.iter().map(|&i| c.dims[i]).collect();
    Ok(bars_from_lows(
        &lows,
        &dims,
        |j| f.values[c.grading[perm[j]]],
        opts,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub equal: bool,
    pub full: Barcode,
    pub conley: Barcode,
    /// A bar whose multiplicity differs between the two barcodes.
    pub witness: Option<Bar>,
}

/// Compares the full-filtration and Conley-complex barcodes after dropping
/// zero-length bars.
pub fn persistence_equivalence_check(
    k: &SimplicialComplex,
    md: &MorseDecomposition,
    f: &LyapunovFunction,
) -> Result<EquivalenceReport> {
    let opts = PersistOptions::default();
    let full = morse_persistence(k, md, f, opts)?;
    let conley = conley_persistence(k, md, f, opts)?;
    let witness = multiset_difference(&full.bars, &conley.bars);
    Ok(EquivalenceReport {
        equal: witness.is_none(),
        full,
        conley,
        witness,
    })
}

fn multiset_difference(a: &[Bar], b: &[Bar]) -> Option<Bar> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp_key(&b[j]) {
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
            Ordering::Less => return Some(a[i]),
            Ordering::Greater => return Some(b[j]),
        }
    }
    a.get(i).or(b.get(j)).copied()
}

/// Exact bottleneck distance, the maximum over dimensions.
pub fn bottleneck(a: &Barcode, b: &Barcode) -> f64 {
    let top = a.bars.iter().chain(&b.bars).map(|x| x.dim).max();
    let Some(top) = top else { return 0.0 };
    (0..=top)
        .map(|d| {
            let pa: Vec<Bar> = a.in_dim(d).copied().collect();
            let pb: Vec<Bar> = b.in_dim(d).copied().collect();
            bottleneck_points(&pa, &pb)
        })
        .fold(0.0, f64::max)
}

fn point_distance(x: &Bar, y: &Bar) -> f64 {
    match (x.is_infinite(), y.is_infinite()) {
        (true, true) => (x.birth - y.birth).abs(),
        (false, false) => (x.birth - y.birth).abs().max((x.death - y.death).abs()),
        _ => f64::INFINITY,
    }
}

fn diagonal_distance(x: &Bar) -> f64 {
    x.length() / 2.0
}

fn bottleneck_points(a: &[Bar], b: &[Bar]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut candidates = vec![0.0];
    for x in a {
        candidates.push(diagonal_distance(x));
        for y in b {
            candidates.push(point_distance(x, y));
        }
    }
    candidates.extend(b.iter().map(diagonal_distance));
    candidates.retain(|c| c.is_finite());
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Left: a's points then diagonal slots for b. Right: b's points then
    // diagonal slots for a.
    let feasible = |delta: f64| {
        let size = n + m;
        let mut adj = vec![Vec::new(); size];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if point_distance(x, y) <= delta {
                    adj[i].push(j);
                }
            }
            if diagonal_distance(x) <= delta {
                adj[i].push(m + i);
            }
        }
        for (j, y) in b.iter().enumerate() {
            if diagonal_distance(y) <= delta {
                adj[n + j].push(j);
            }
            adj[n + j].extend(m..m + n);
        }
        perfect_matching(&adj, size)
    };
    let (mut lo, mut hi) = (0usize, candidates.len());
    // Smallest candidate index that is feasible; `hi == len` means none.
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates.get(lo).copied().unwrap_or(f64::INFINITY)
}

/// Kuhn's augmenting-path matching; true iff every left vertex is matched.
fn perfect_matching(adj: &[Vec<usize>], right: usize) -> bool {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v] == usize::MAX || augment(owner[v], adj, seen, owner) {
                owner[v] = u;
                return true;
            }
        }
        false
    }
    let mut owner = vec![usize::MAX; right];
    for u in 0..adj.len() {
        let mut seen = vec![false; right];
        if !augment(u, adj, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}
