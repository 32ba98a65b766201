use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use conley::bench::{self, BenchOptions, Instance, Preset};
use conley::discretize::{discretize_field, triangulate_grid, DiscretizeOptions, SampledField};
use conley::io::{self, ComplexJson, DecompositionJson, FieldJson, OrderJson};
use conley::persist::{conley_persistence, morse_persistence, PersistOptions};
use conley::randgen::{build_benchmark_complex, coarsen_to, ComplexKind};
use conley::reduce::{reduce, ReduceOptions};
use conley::{
    Algorithm, FilteredMatrix, LyapunovFunction, MorseDecomposition, MultivectorField,
    SimplicialComplex,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "conley",
    version,
    about = "Connection matrices and persistence of Morse decompositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum Morse decomposition of a field, as JSON.
    Morse {
        complex: PathBuf,
        field: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Connection matrix of the minimum Morse decomposition.
    Connect(ConnectArgs),
    /// Barcode of the minimum Morse decomposition under a Lyapunov function.
    Persist(PersistArgs),
    /// Multivector field from a sampled planar vector field.
    Discretize(DiscretizeArgs),
    /// Random complex and field coarsened to a connection probability.
    Gen(GenArgs),
    /// Times ConMat against ConnectMat on benchmark instances.
    Bench(BenchArgs),
    /// Checks that a field is a partition into convex vectors.
    Validate {
        field: PathBuf,
        /// Complex file; needed unless the field embeds its simplices.
        #[arg(long)]
        complex: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConnectArgs {
    complex: PathBuf,
    field: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Conmat)]
    algorithm: AlgorithmArg,
    /// Linear extension and within-set orders, `{"linear_ext": [...], "within": {"p": [...]}}`.
    #[arg(long)]
    order: Option<PathBuf>,
    /// Also write the reduced boundary matrix here.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Leave out the basis chains of the kept columns.
    #[arg(long)]
    no_chains: bool,
    /// Give up after this many seconds (exit code 3).
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Conmat,
    Connectmat,
}

#[derive(Args)]
struct GridArgs {
    /// Analytic field to sample instead of reading files; only `g` is built in.
    #[arg(long, value_name = "NAME")]
    builtin_field: Option<String>,
    /// Sampling region `x0,x1,y0,y1`.
    #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [-3.0, 3.0, -3.0, 3.0], allow_negative_numbers = true)]
    region: Vec<f64>,
    /// Samples per axis.
    #[arg(long, default_value_t = 21)]
    resolution: usize,
    /// Angle and length tolerance of the discretization.
    #[arg(long, default_value_t = DiscretizeOptions::default().eps)]
    eps: f64,
}

#[derive(Args)]
struct PersistArgs {
    /// Complex file, unless `--builtin-field` is given.
    complex: Option<PathBuf>,
    /// Field file, unless `--builtin-field` is given.
    field: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Lyapunov values keyed by Morse set id, `{"0": 1.0, ...}`.
    #[arg(long, conflicts_with = "downset")]
    lyapunov: Option<PathBuf>,
    /// Use the downset-size function (the default).
    #[arg(long)]
    downset: bool,
    /// Compute from the Conley complex instead of the full filtration.
    #[arg(long)]
    conley: bool,
    #[arg(long)]
    keep_zero_length: bool,
    /// Barcode CSV; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Linear instead of logarithmic axis in the SVG.
    #[arg(long)]
    linear: bool,
}

#[derive(Args)]
struct DiscretizeArgs {
    /// CSV with rows `x,y,vx,vy`, unless `--builtin-field` is given.
    samples: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    complex_out: PathBuf,
    #[arg(long)]
    field_out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// `full-simplex`, `triangle-soup`, `dense-graph` or `mixed`.
    #[arg(long)]
    kind: String,
    /// Comma-separated `key=value`; lists use `:`, e.g. `vertices=57,dims=3:4:5,count=3450`.
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long, default_value_t = 0.0)]
    target_p: f64,
    /// Seeds both the complex and the coarsening.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    complex_out: PathBuf,
    #[arg(long)]
    field_out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Presets to run (`annulus`, `v1` … `v7`); all when omitted.
    #[arg(long, value_delimiter = ',')]
    preset: Vec<Preset>,
    /// Replaces the preset seeds.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    /// Per-run limit in seconds; slower rows are marked as timed out.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    format: Format,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Only cross-validate the two algorithms, with instances in parallel; no timings.
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Csv,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_complex(path: &Path) -> Result<SimplicialComplex> {
    let json: ComplexJson = io::parse(&read(path)?).with_context(|| path.display().to_string())?;
    Ok(json.build()?)
}

fn load_field(path: &Path, k: &SimplicialComplex) -> Result<MultivectorField> {
    let json: FieldJson = io::parse(&read(path)?).with_context(|| path.display().to_string())?;
    Ok(json.build(k)?)
}

fn load_pair(complex: &Path, field: &Path) -> Result<(SimplicialComplex, MultivectorField)> {
    let k = load_complex(complex)?;
    let f = load_field(field, &k)?;
    Ok((k, f))
}

fn grid_samples(grid: &GridArgs) -> Result<SampledField> {
    match grid.builtin_field.as_deref() {
        Some("g") => {
            let region = [
                grid.region[0],
                grid.region[1],
                grid.region[2],
                grid.region[3],
            ];
            Ok(SampledField::builtin_g(
                region,
                grid.resolution,
                grid.resolution,
            )?)
        }
        Some(other) => bail!("unknown built-in field {other:?}; only \"g\" is available"),
        None => unreachable!("caller checks for a built-in field"),
    }
}

fn discretized(samples: &SampledField, eps: f64) -> Result<(SimplicialComplex, MultivectorField)> {
    let (k, geometry) = triangulate_grid(samples)?;
    let field = discretize_field(&k, &geometry, samples, DiscretizeOptions { eps })?;
    Ok((k, field))
}

fn morse(complex: &Path, field: &Path, out: Option<&Path>) -> Result<()> {
    let (k, f) = load_pair(complex, field)?;
    let md = MorseDecomposition::minimum(&k, &f)?;
    emit(
        out,
        &io::to_pretty(&DecompositionJson::from_decomposition(&md)),
    )
}

/// The reduced boundary matrix in filtered order.
#[derive(Serialize)]
struct MatrixDump {
    simplices: Vec<usize>,
    grading: Vec<usize>,
    dims: Vec<usize>,
    columns: Vec<Vec<usize>>,
}

impl MatrixDump {
    fn new(a: &FilteredMatrix) -> Self {
        let n = a.n();
        Self {
            simplices: (0..n).map(|j| a.simplex(j)).collect(),
            grading: (0..n).map(|j| a.grading(j)).collect(),
            dims: (0..n).map(|j| a.dim(j)).collect(),
            columns: a.cols().to_vec(),
        }
    }
}

fn connect(args: &ConnectArgs) -> Result<()> {
    let (k, f) = load_pair(&args.complex, &args.field)?;
    let md = MorseDecomposition::minimum(&k, &f)?;
    let order = match &args.order {
        Some(p) => {
            let json: OrderJson = io::parse(&read(p)?).with_context(|| p.display().to_string())?;
            json.build(&k, &md)?
        }
        None => md.filtered_order(&k),
    };
    let a = FilteredMatrix::boundary(&k, &order, !args.no_chains)?;
    let opts = ReduceOptions {
        deadline: args
            .timeout
            .map(|s| Instant::now() + Duration::from_secs_f64(s)),
        ..ReduceOptions::default()
    };
    let algorithm = match args.algorithm {
        AlgorithmArg::Conmat => Algorithm::ConMat,
        AlgorithmArg::Connectmat => Algorithm::ConnectMat,
    };
    let red = reduce(a, algorithm, &opts)?;
    red.connection.check_invariants(&md)?;
    if let Some(p) = &args.dump_matrix {
        write(p, &io::to_pretty(&MatrixDump::new(&red.matrix)))?;
    }
    emit(args.out.as_deref(), &io::to_pretty(&red.connection))
}

fn persist(args: &PersistArgs) -> Result<()> {
    let (k, f) = if args.grid.builtin_field.is_some() {
        if args.complex.is_some() || args.field.is_some() {
            bail!("give either complex and field files or --builtin-field, not both");
        }
        discretized(&grid_samples(&args.grid)?, args.grid.eps)?
    } else {
        match (&args.complex, &args.field) {
            (Some(c), Some(fl)) => load_pair(c, fl)?,
            _ => bail!("persist needs complex and field files, or --builtin-field g"),
        }
    };
    let md = MorseDecomposition::minimum(&k, &f)?;
    let lyapunov = match &args.lyapunov {
        Some(p) => io::lyapunov_from_json(&md, &read(p)?)?,
        None => LyapunovFunction::downset(&md),
    };
    let opts = PersistOptions {
        keep_zero_length: args.keep_zero_length,
    };
    let barcode = if args.conley {
        conley_persistence(&k, &md, &lyapunov, opts)?
    } else {
        morse_persistence(&k, &md, &lyapunov, opts)?
    };
    if let Some(p) = &args.svg {
        write(p, &barcode.to_svg(!args.linear))?;
    }
    emit(args.csv.as_deref(), &barcode.to_csv())
}

fn discretize(args: &DiscretizeArgs) -> Result<()> {
    let samples = match (&args.samples, args.grid.builtin_field.is_some()) {
        (Some(_), true) => bail!("give either a samples file or --builtin-field, not both"),
        (Some(p), false) => {
            SampledField::from_csv(&read(p)?).with_context(|| p.display().to_string())?
        }
        (None, true) => grid_samples(&args.grid)?,
        (None, false) => bail!("discretize needs a samples file or --builtin-field g"),
    };
    let (k, field) = discretized(&samples, args.grid.eps)?;
    write(
        &args.complex_out,
        &io::to_pretty(&ComplexJson::from_complex(&k)),
    )?;
    write(
        &args.field_out,
        &io::to_pretty(&FieldJson::from_field(&field, None)),
    )?;
    eprintln!("{} simplices, {} vectors", k.len(), field.num_vectors());
    Ok(())
}

/// `key=value` pairs as a tagged JSON object for [`ComplexKind`].
fn complex_kind(kind: &str, params: &str) -> Result<ComplexKind> {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), kind.into());
    for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter {pair:?} is not key=value"))?;
        let number = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| anyhow!("parameter {key}: {v:?} is not a count"))
        };
        let value = if value.contains(':') {
            serde_json::Value::from(value.split(':').map(number).collect::<Result<Vec<_>>>()?)
        } else {
            serde_json::Value::from(number(value)?)
        };
        obj.insert(key.trim().into(), value);
    }
    serde_json::from_value(obj.into())
        .map_err(|e| anyhow!("--kind {kind} --params {params:?}: {e}"))
}

const DEFAULT_SEED: u64 = 0;

fn gen(args: &GenArgs) -> Result<()> {
    let kind = complex_kind(&args.kind, &args.params)?;
    let seed = args.seed.unwrap_or_else(|| {
        eprintln!("seed: {DEFAULT_SEED} (default)");
        DEFAULT_SEED
    });
    let k = build_benchmark_complex(&kind, seed)?;
    let c = coarsen_to(&k, &MultivectorField::singleton(&k), args.target_p, seed)?;
    write(
        &args.complex_out,
        &io::to_pretty(&ComplexJson::from_complex(&k)),
    )?;
    write(
        &args.field_out,
        &io::to_pretty(&FieldJson::from_field(&c.field, None)),
    )?;
    eprintln!(
        "{} simplices, {} vectors, connection probability {:.6} after {} merges",
        k.len(),
        c.field.num_vectors(),
        c.probability,
        c.merges
    );
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let presets = if args.preset.is_empty() {
        Preset::ALL.to_vec()
    } else {
        args.preset.clone()
    };
    let instances: Vec<Instance> = presets
        .iter()
        .map(|p| p.build(args.seed))
        .collect::<conley::Result<_>>()?;
    if args.parallel {
        let results = bench::validate_instances(&instances);
        let mut first_error = None;
        for (instance, result) in instances.iter().zip(results) {
            match result {
                Ok(()) => println!("{}: ok", instance.name),
                Err(e) => {
                    println!("{}: {e}", instance.name);
                    first_error.get_or_insert(e);
                }
            }
        }
        return first_error.map_or(Ok(()), |e| Err(e.into()));
    }
    let opts = BenchOptions {
        repetitions: args.repetitions,
        timeout: args.timeout.map(Duration::from_secs_f64),
    };
    let rows = bench::run_benchmark(&instances, &opts)?;
    let text = match args.format {
        Format::Md => bench::to_markdown(&rows),
        Format::Csv => bench::to_csv(&rows),
    };
    emit(args.out.as_deref(), &text)
}

fn validate(field: &Path, complex: Option<&Path>) -> Result<()> {
    let json: FieldJson = io::parse(&read(field)?).with_context(|| field.display().to_string())?;
    let k = match (complex, json.embedded_complex()) {
        (Some(p), _) => load_complex(p)?,
        (None, Some(k)) => k?,
        (None, None) => bail!("{} has no simplices; pass --complex", field.display()),
    };
    let f = json.build(&k)?;
    println!(
        "ok: {} vectors covering {} simplices",
        f.num_vectors(),
        k.len()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Morse {
            complex,
            field,
            out,
        } => morse(&complex, &field, out.as_deref()),
        Command::Connect(args) => connect(&args),
        Command::Persist(args) => persist(&args),
        Command::Discretize(args) => discretize(&args),
        Command::Gen(args) => gen(&args),
        Command::Bench(args) => run_bench(&args),
        Command::Validate { field, complex } => validate(&field, complex.as_deref()),
    }
}

/// 1 for a broken invariant, 2 for unreadable input or usage, 3 for a timeout.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<conley::Error>() {
            return match e {
                conley::Error::Timeout => 3,
                e if e.is_validation() => 1,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
