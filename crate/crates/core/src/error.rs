use num_complex::Complex64;
use thiserror::Error;

use crate::spectrum::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("the uniformization map is singular at z = 0")]
    ZeroSpectralPoint,

    #[error("background amplitude must be positive and finite, got {0}")]
    InvalidBackground(f64),

    #[error("eigenvalue {0} lies on the continuous spectrum (real axis or background circle)")]
    ContourEigenvalue(Complex64),

    #[error("eigenvalues {first} and {second} coincide after canonicalization; {hint}")]
    DuplicateEigenvalue {
        first: usize,
        second: usize,
        hint: &'static str,
    },

    #[error("invalid spectral configuration: {}", format_diagnostics(.0))]
    InvalidConfig(Vec<Diagnostic>),

    #[error("operation requires a {expected} orbit table")]
    PoleOrderMismatch { expected: &'static str },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix is singular (pivot underflow in column {column})")]
    SingularMatrix { column: usize },

    #[error("reconstruction system is singular at (x = {x}, t = {t})")]
    SingularAt { x: f64, t: f64 },

    #[error("second derivative {0:e} is too small for a double-pole Laurent expansion")]
    DegenerateZero(f64),

    #[error("trace formula evaluated at a pole ({0})")]
    EvaluationAtPole(Complex64),

    #[error("residual stencil failed at (x = {x}, t = {t}): {source}")]
    StencilEvaluationFailure {
        x: f64,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("field is not periodic on the evolution window (|q(L) - q(-L)| = {mismatch:e})")]
    PeriodicIncompatible { mismatch: f64 },

    #[error("evolution grid size {0} is not a power of two")]
    NonPowerOfTwo(usize),

    #[error("invalid evolution setup: {0}")]
    InvalidSetup(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported config schema {0} (expected 1)")]
    UnsupportedSchema(u32),

    #[error("no bundled preset named `{0}`")]
    UnknownPreset(String),

    #[error("pixel range is degenerate (lo = hi = {0})")]
    DegenerateRange(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
