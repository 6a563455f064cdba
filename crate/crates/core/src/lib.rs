//! Exact reflectionless soliton and breather solutions of the Kundu-NLS
//! equation with nonzero boundary conditions, built from discrete spectral
//! data, plus independent verification of the constructed fields.

pub mod double_pole;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod scaling;
pub mod scattering;
pub mod simple_pole;
pub mod solution;
pub mod spectrum;
pub mod uniformization;
pub mod verification;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use grid::{FieldGrid, PointFlag};
pub use io::RunConfig;
pub use linalg::{DenseComplexMatrix, LuFactorization};
pub use scaling::PointValue;
pub use solution::{FieldEvaluator, Solution};
pub use spectrum::{Diagnostic, EigenEntry, OrbitTable, PoleOrder, SignConvention, SpectralConfig};
pub use uniformization::{Region, SpectralPoint};
pub use verification::{
    verify, ConventionChoice, EvolutionSetup, VerificationPlan, VerificationReport, Window,
};
