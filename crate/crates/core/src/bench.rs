//! Wall-clock comparison of ConMat and ConnectMat on the same filtered
//! boundary matrix.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::discretize::{discretize_builtin_g, DiscretizeOptions};
use crate::error::{Error, Result};
use crate::homology::trim;
use crate::morse::MorseDecomposition;
use crate::mvf::MultivectorField;
use crate::randgen::{build_benchmark_complex, coarsen_to, ComplexKind};
use crate::reduce::{conmat, connectmat, ConnectionMatrix, ReduceOptions, Reduction};
use crate::sweep;
use crate::z2matrix::FilteredMatrix;

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub complex: SimplicialComplex,
    pub field: MultivectorField,
}

/// Named instances at the scale of the reference benchmark table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Annulus,
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    V7,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Annulus,
        Preset::V1,
        Preset::V2,
        Preset::V3,
        Preset::V4,
        Preset::V5,
        Preset::V6,
        Preset::V7,
    ];

    /// `(complex family, target connection probability, complex seed, coarsening seed)`.
    /// `None` for the two presets that are not random. Coarsening overshoots
    /// the target by a seed-dependent jump; each coarsening seed is the one in
    /// `0..16` whose achieved probability lies closest to the target.
    pub fn recipe(self) -> Option<(ComplexKind, f64, u64, u64)> {
        let soup = ComplexKind::TriangleSoup {
            vertices: 55,
            triangles: 25_001,
        };
        let mixed = ComplexKind::Mixed {
            vertices: 57,
            dims: vec![3, 4, 5],
            count: 3_450,
        };
        match self {
            Preset::Annulus | Preset::V7 => None,
            Preset::V1 => Some((ComplexKind::FullSimplex { dim: 12 }, 0.4597, 1, 1)),
            Preset::V2 => Some((soup, 0.0636, 2, 12)),
            Preset::V3 => Some((soup, 0.0967, 2, 11)),
            Preset::V4 => Some((
                ComplexKind::DenseGraph {
                    vertices: 1_010,
                    edges: 100_046,
                },
                0.0309,
                4,
                3,
            )),
            Preset::V5 => Some((mixed, 0.000_01, 5, 0)),
            Preset::V6 => Some((mixed, 0.000_03, 5, 2)),
        }
    }

    /// Builds the instance. `seed` replaces both default seeds of a random preset.
    pub fn build(self, seed: Option<u64>) -> Result<Instance> {
        let name = self.to_string();
        match self {
            Preset::Annulus => {
                let (complex, field) = annulus();
                Ok(Instance {
                    name,
                    complex,
                    field,
                })
            }
            Preset::V7 => {
                let (complex, _, field) =
                    discretize_builtin_g([-3.0, 3.0, -3.0, 3.0], 21, DiscretizeOptions::default())?;
                Ok(Instance {
                    name,
                    complex,
                    field,
                })
            }
            _ => {
                let (kind, p, cs, fs) = self.recipe().unwrap();
                let complex = build_benchmark_complex(&kind, seed.unwrap_or(cs))?;
                let field = coarsen_to(
                    &complex,
                    &MultivectorField::singleton(&complex),
                    p,
                    seed.unwrap_or(fs),
                )?
                .field;
                Ok(Instance {
                    name,
                    complex,
                    field,
                })
            }
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Preset::Annulus => "annulus",
            Preset::V1 => "v1",
            Preset::V2 => "v2",
            Preset::V3 => "v3",
            Preset::V4 => "v4",
            Preset::V5 => "v5",
            Preset::V6 => "v6",
            Preset::V7 => "v7",
        };
        f.write_str(s)
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InfeasibleParams(format!("unknown preset {s:?}")))
    }
}

/// The two-triangle annulus with its orbit field.
pub fn annulus() -> (SimplicialComplex, MultivectorField) {
    let k = SimplicialComplex::build(&[[0, 1, 2], [2, 3, 0]]).expect("annulus builds");
    let id = |v: &[usize]| k.find(v).expect("annulus simplex");
    let vectors = vec![
        vec![id(&[0]), id(&[0, 1])],
        vec![id(&[1]), id(&[1, 2])],
        vec![id(&[2]), id(&[2, 3])],
        vec![id(&[3]), id(&[0, 3])],
        vec![id(&[0, 2])],
        vec![id(&[0, 1, 2])],
        vec![id(&[0, 2, 3])],
    ];
    let field = MultivectorField::from_vectors(&k, vectors).expect("annulus field is valid");
    (k, field)
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Timed runs per algorithm; the median is reported.
    pub repetitions: usize,
    /// Per-run limit; a run that exceeds it marks the row as timed out.
    pub timeout: Option<Duration>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            repetitions: 3,
            timeout: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Timeout,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub simplices: usize,
    pub max_dim: usize,
    pub avg_dim: f64,
    pub probability: f64,
    pub morse_sets: usize,
    /// Median wall-clock seconds, `None` after a timeout.
    pub connectmat_secs: Option<f64>,
    pub conmat_secs: Option<f64>,
    /// Size of the connection matrix.
    pub kept: usize,
    pub status: RowStatus,
}

impl BenchRow {
    pub fn speedup(&self) -> Option<f64> {
        Some(self.connectmat_secs? / self.conmat_secs?)
    }

    /// Speedup rounded to the nearest integer.
    pub fn speedup_rounded(&self) -> Option<u64> {
        self.speedup().map(|r| r.round() as u64)
    }
}

/// Everything the timing loop needs, built once per instance.
pub struct Prepared {
    pub decomposition: MorseDecomposition,
    pub matrix: FilteredMatrix,
}

pub fn prepare(instance: &Instance) -> Result<Prepared> {
    let decomposition = MorseDecomposition::minimum(&instance.complex, &instance.field)?;
    let order = decomposition.filtered_order(&instance.complex);
    let matrix = FilteredMatrix::boundary(&instance.complex, &order, false)?;
    matrix.check_invariants()?;
    Ok(Prepared {
        decomposition,
        matrix,
    })
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    }
}

type Reducer = fn(FilteredMatrix, &ReduceOptions) -> Result<Reduction>;

/// Median time of `reps` runs on fresh copies, plus the output of the first run.
fn time_runs(
    a: &FilteredMatrix,
    reducer: Reducer,
    opts: &BenchOptions,
) -> Result<Option<(Duration, Reduction)>> {
    let mut times = Vec::with_capacity(opts.repetitions);
    let mut first = None;
    for _ in 0..opts.repetitions.max(1) {
        let copy = a.clone();
        let start = Instant::now();
        let ropts = ReduceOptions {
            record_log: false,
            deadline: opts.timeout.map(|t| start + t),
            check_input: false,
        };
        match reducer(copy, &ropts) {
            Ok(r) => {
                times.push(start.elapsed());
                first.get_or_insert(r);
            }
            Err(Error::Timeout) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some((median(times), first.unwrap())))
}

/// Both connection matrices satisfy the invariant suite and have equal Betti numbers.
pub fn cross_check(
    md: &MorseDecomposition,
    a: &ConnectionMatrix,
    b: &ConnectionMatrix,
) -> Result<()> {
    a.check_invariants(md)?;
    b.check_invariants(md)?;
    let (ba, bb) = (trim(a.betti()), trim(b.betti()));
    if ba != bb {
        return Err(Error::MatrixInvariant(format!(
            "Betti numbers differ between algorithms: {ba:?} vs {bb:?}"
        )));
    }
    Ok(())
}

pub fn run_instance(instance: &Instance, opts: &BenchOptions) -> Result<BenchRow> {
    let k = &instance.complex;
    let prepared = prepare(instance)?;
    let a = &prepared.matrix;
    let con = time_runs(a, conmat, opts)?;
    let legacy = time_runs(a, connectmat, opts)?;
    let kept = con
        .as_ref()
        .or(legacy.as_ref())
        .map_or(0, |(_, r)| r.connection.len());
    match (&con, &legacy) {
        (Some((_, x)), Some((_, y))) => {
            cross_check(&prepared.decomposition, &x.connection, &y.connection)
                .map_err(|e| Error::MatrixInvariant(format!("instance {}: {e}", instance.name)))?
        }
        (Some((_, x)), None) | (None, Some((_, x))) => {
            x.connection.check_invariants(&prepared.decomposition)?
        }
        (None, None) => {}
    }
    let status = if con.is_some() && legacy.is_some() {
        RowStatus::Ok
    } else {
        RowStatus::Timeout
    };
    Ok(BenchRow {
        name: instance.name.clone(),
        simplices: k.len(),
        max_dim: k.max_dim(),
        avg_dim: k.avg_dim(),
        probability: instance.field.connection_probability()?,
        morse_sets: prepared.decomposition.num_sets(),
        connectmat_secs: legacy.map(|(t, _)| t.as_secs_f64()),
        conmat_secs: con.map(|(t, _)| t.as_secs_f64()),
        kept,
        status,
    })
}

/// Times every instance in turn. Instances never run concurrently.
pub fn run_benchmark(instances: &[Instance], opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    instances.iter().map(|i| run_instance(i, opts)).collect()
}

/// Cross-validates both algorithms on every instance without timing,
/// spreading instances over threads when available.
pub fn validate_instances(instances: &[Instance]) -> Vec<Result<()>> {
    sweep::map(instances, |inst| {
        let p = prepare(inst)?;
        let opts = ReduceOptions::default();
        let x = conmat(p.matrix.clone(), &opts)?;
        let y = connectmat(p.matrix, &opts)?;
        cross_check(&p.decomposition, &x.connection, &y.connection)
    })
}

pub fn format_duration(secs: f64) -> String {
    if secs >= 60.0 {
        let total = secs.round() as u64;
        format!("{}h{:02}m{:02}s", total / 3600, total / 60 % 60, total % 60)
    } else if secs >= 1.0 {
        format!("{secs:.3}s")
    } else if secs >= 1e-3 {
        format!("{:.3}ms", secs * 1e3)
    } else {
        format!("{:.1}µs", secs * 1e6)
    }
}

fn time_cell(t: Option<f64>) -> String {
    t.map_or_else(|| "timeout".to_string(), format_duration)
}

pub fn to_markdown(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    s.push_str(
        "| Field | \\|K\\| | Max / Avg Dim | Probability | ConnectMat / ConMat | Speed Up |\n",
    );
    s.push_str("|---|---:|---|---:|---|---:|\n");
    for r in rows {
        let speed = r
            .speedup_rounded()
            .map_or_else(|| "timeout".to_string(), |x| format!("≈ {x}"));
        let _ = writeln!(
            s,
            "| {} | {} | {} / {:.3} | {:.6} | {} / {} | {} |",
            r.name,
            r.simplices,
            r.max_dim,
            r.avg_dim,
            r.probability,
            time_cell(r.connectmat_secs),
            time_cell(r.conmat_secs),
            speed
        );
    }
    s
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("field,simplices,max_dim,avg_dim,probability,morse_sets,connectmat_secs,conmat_secs,speedup,status\n");
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.9}"));
    for r in rows {
        let status = match r.status {
            RowStatus::Ok => "ok",
            RowStatus::Timeout => "timeout",
        };
        let _ = writeln!(
            s,
            "{},{},{},{:.6},{:.6},{},{},{},{},{}",
            r.name,
            r.simplices,
            r.max_dim,
            r.avg_dim,
            r.probability,
            r.morse_sets,
            opt(r.connectmat_secs),
            opt(r.conmat_secs),
            r.speedup_rounded().map_or(String::new(), |x| x.to_string()),
            status
        );
    }
    s
}
