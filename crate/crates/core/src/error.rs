use thiserror::Error;

use crate::complex::SimplexId;

/// Errors raised by the library. Variants that describe a broken invariant of
/// an input (as opposed to unreadable input or a resource problem) answer
/// `true` from [`Error::is_validation`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty complex")]
    EmptyComplex,
    #[error("empty simplex at input position {0}")]
    EmptySimplex(usize),
    #[error("unknown simplex id {0}")]
    UnknownSimplex(SimplexId),
    #[error("unknown vector id {0}")]
    UnknownVector(usize),
    #[error("cannot merge vector {0} with itself")]
    SelfMerge(usize),
    #[error("connection probability needs at least two simplices, got {0}")]
    TooFewSimplices(usize),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("not a partition: {0}")]
    NotPartition(String),
    #[error("convexity violated in vector {0}")]
    NotConvex(usize),
    #[error("not a Morse decomposition: {0}")]
    NotMorseDecomposition(String),
    #[error("non-admissible within-set order: {0}")]
    NonAdmissibleOrder(String),
    #[error("not a linear extension: {0}")]
    NotLinearExtension(String),
    #[error("order is not a permutation of the complex: {0}")]
    NotPermutation(String),
    #[error("matrix invariant violated: {0}")]
    MatrixInvariant(String),
    #[error("function is not Lyapunov: Morse set {lower} <= {upper} but f = {lower_value} > {upper_value}")]
    NotLyapunov {
        lower: usize,
        upper: usize,
        lower_value: f64,
        upper_value: f64,
    },
    #[error("Lyapunov function has {got} values for {expected} Morse sets")]
    LyapunovArity { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("timed out")]
    Timeout,
}

impl Error {
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Timeout | Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
