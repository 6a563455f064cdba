//! Pass thresholds of the verification gates.

/// Max `|R(q)|` over the residual sweep.
pub const RESIDUAL: f64 = 1e-6;
/// `|q(+-L, 0) - q+-|`.
pub const BOUNDARY: f64 = 1e-8;
/// L-infinity error of the split-step cross-check.
pub const EVOLUTION: f64 = 1e-5;
/// Relative drift of the renormalized mass over the evolution.
pub const MASS: f64 = 1e-8;
/// Far-field phase difference against the theta condition.
pub const THETA_FAR_FIELD: f64 = 1e-6;
/// Linear-system versus bordered-determinant evaluation.
pub const FORM_SIMPLE: f64 = 1e-9;
pub const FORM_DOUBLE: f64 = 1e-8;
/// `|q(L, t0) - q(-L, t0)|` required before evolving.
pub const PERIODIC_GATE: f64 = 1e-8;

pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_BOUNDARY_L: f64 = 30.0;
pub const DEFAULT_RESIDUAL_POINTS: usize = 21;
