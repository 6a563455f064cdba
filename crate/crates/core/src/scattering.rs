//! Reflectionless trace formulae and audits of the orbit table that do not
//! go through field reconstruction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{wrap_phase, OrbitTable, PoleOrder};

/// Tolerance of the by-construction audits.
pub const AUDIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEvaluation {
    pub z: Complex64,
    pub s11: Complex64,
    pub s22: Complex64,
    /// `|s11 s22 - 1|`.
    pub product_error: f64,
}

fn exponent(order: PoleOrder) -> i32 {
    match order {
        PoleOrder::Simple => 1,
        PoleOrder::Double => 2,
    }
}

fn near(z: Complex64, p: Complex64) -> bool {
    (z - p).norm() <= 1e-14 * p.norm().max(1.0)
}

/// Product over `n` of `(z - z_n)(z + Q0^2/conj z_n) / ((z - conj z_n)(z + Q0^2/z_n))`,
/// raised to the pole order.
pub fn trace_s11(orbit: &OrbitTable, z: Complex64) -> Result<Complex64> {
    trace(orbit, z, false)
}

/// Reciprocal product of [`trace_s11`], evaluated factor by factor.
pub fn trace_s22(orbit: &OrbitTable, z: Complex64) -> Result<Complex64> {
    trace(orbit, z, true)
}

fn trace(orbit: &OrbitTable, z: Complex64, inverse: bool) -> Result<Complex64> {
    let q02 = orbit.q0 * orbit.q0;
    let mut acc = Complex64::new(1.0, 0.0);
    for &zn in orbit.eigenvalues() {
        let zeros = [zn, -q02 / zn.conj()];
        let poles = [zn.conj(), -q02 / zn];
        let (num, den) = if inverse {
            (poles, zeros)
        } else {
            (zeros, poles)
        };
        if den.iter().any(|p| near(z, *p)) {
            return Err(Error::EvaluationAtPole(z));
        }
        acc *= (z - num[0]) * (z - num[1]) / ((z - den[0]) * (z - den[1]));
    }
    Ok(acc.powi(exponent(orbit.order)))
}

pub fn evaluate_trace(orbit: &OrbitTable, z: Complex64) -> Result<TraceEvaluation> {
    let s11 = trace_s11(orbit, z)?;
    let s22 = trace_s22(orbit, z)?;
    Ok(TraceEvaluation {
        z,
        s11,
        s22,
        product_error: (s11 * s22 - 1.0).norm(),
    })
}

/// Numerical order of the zero of `s11` at `z_n`:
/// `log(|s11(z_n(1+h1))| / |s11(z_n(1+h2))|) / log(h1/h2)`.
pub fn zero_order(orbit: &OrbitTable, n: usize, h1: f64, h2: f64) -> Result<f64> {
    let zn = *orbit.eigenvalues().get(n).ok_or(Error::DimensionMismatch {
        expected: orbit.n(),
        found: n,
    })?;
    let a = trace_s11(orbit, zn * (1.0 + h1))?.norm();
    let b = trace_s11(orbit, zn * (1.0 + h2))?.norm();
    Ok((a / b).ln() / (h1 / h2).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaCheck {
    /// `m * sum(arg z_n)` wrapped to `(-pi, pi]`.
    pub expected_phase: f64,
    /// `arg(q+/q-)`.
    pub observed_phase: f64,
    /// Wrapped difference, in radians.
    pub discrepancy: f64,
    pub pass: bool,
}

/// Confirms `arg(q+/q-) = m sum(arg z_n) (mod 2 pi)` on the stored table.
pub fn check_theta_condition(orbit: &OrbitTable) -> ThetaCheck {
    let sum: f64 = orbit.eigenvalues().iter().map(|z| z.arg()).sum();
    let expected = wrap_phase(orbit.order.theta_multiplier() * sum);
    let observed = (orbit.q_plus / orbit.q_minus).arg();
    let discrepancy = wrap_phase(observed - expected).abs();
    ThetaCheck {
        expected_phase: expected,
        observed_phase: observed,
        discrepancy,
        pass: discrepancy <= AUDIT_TOL * PI.max(1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub name: &'static str,
    /// Largest `|lhs - rhs| / |rhs|` over the orbit.
    pub max_rel_error: f64,
    pub pass: bool,
}

fn rel_error(lhs: Complex64, rhs: Complex64) -> f64 {
    let d = (lhs - rhs).norm();
    if d == 0.0 {
        return 0.0;
    }
    let scale = if rhs.norm() > 0.0 {
        rhs.norm()
    } else {
        lhs.norm()
    };
    d / scale
}

fn collect(name: &'static str, errors: impl Iterator<Item = f64>) -> SymmetryCheck {
    let max_rel_error = errors.fold(
        0.0,
        |a: f64, e| if e.is_nan() { f64::NAN } else { a.max(e) },
    );
    SymmetryCheck {
        name,
        max_rel_error,
        pass: max_rel_error <= AUDIT_TOL,
    }
}

/// Evaluates every chained symmetry of the norming constants on the stored
/// table, under the table's sign convention.
pub fn check_symmetries(orbit: &OrbitTable) -> Vec<SymmetryCheck> {
    let n = orbit.n();
    let m = 2 * n;
    let q02 = orbit.q0 * orbit.q0;
    let mut out = vec![
        collect(
            "inversion: A-[-Q0^2/xi] = f(xi) A+[xi]",
            (0..m).map(|j| {
                rel_error(
                    orbit.a_minus_xihat[j],
                    orbit.inversion_factor(orbit.xi[j]) * orbit.a_plus_xi[j],
                )
            }),
        ),
        collect(
            "conjugation: A-[conj z] = -conj(A+[z])",
            (0..n).map(|j| rel_error(orbit.a_minus_xihat[n + j], -orbit.a_plus_xi[j].conj())),
        ),
        collect(
            "composite: A+[z] = -conj(A+[-Q0^2/conj z]) / f(z)",
            (0..n).map(|j| {
                let f = orbit.inversion_factor(orbit.xi[j]);
                rel_error(orbit.a_plus_xi[j], -orbit.a_plus_xi[n + j].conj() / f)
            }),
        ),
    ];
    if orbit.order == PoleOrder::Double {
        let inv = |z: Complex64, b: Complex64| z * z / q02 * (b - 2.0 / z);
        out.push(collect(
            "inversion: B-[-Q0^2/xi] = (xi^2/Q0^2)(B+[xi] - 2/xi)",
            (0..m).map(|j| rel_error(orbit.b_minus_xihat[j], inv(orbit.xi[j], orbit.b_plus_xi[j]))),
        ));
        out.push(collect(
            "conjugation: B-[conj z] = conj(B+[z])",
            (0..n).map(|j| rel_error(orbit.b_minus_xihat[n + j], orbit.b_plus_xi[j].conj())),
        ));
        out.push(collect(
            "composite: B+[-Q0^2/conj z] = conj((z^2/Q0^2)(B+[z] - 2/z))",
            (0..n).map(|j| {
                rel_error(
                    orbit.b_plus_xi[n + j],
                    inv(orbit.xi[j], orbit.b_plus_xi[j]).conj(),
                )
            }),
        ));
    }
    out
}

/// Step pair for [`zero_order`] used by [`audit`].
pub const ZERO_ORDER_STEPS: (f64, f64) = (1e-4, 1e-5);
pub const ZERO_ORDER_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroOrder {
    pub index: usize,
    pub z: Complex64,
    pub measured: f64,
    pub expected: f64,
    pub pass: bool,
}

/// Everything checkable on the orbit table alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub theta: ThetaCheck,
    pub symmetries: Vec<SymmetryCheck>,
    pub trace_points: usize,
    /// Points skipped because they hit a pole of the trace formula.
    pub trace_skipped: usize,
    pub trace_max_product_error: f64,
    pub trace_pass: bool,
    pub zero_orders: Vec<ZeroOrder>,
    pub passed: bool,
}

/// Runs the theta, symmetry, trace-product and zero-order audits. `probes`
/// are the off-contour points for `s11 s22 = 1`.
pub fn audit(orbit: &OrbitTable, probes: &[Complex64]) -> AuditReport {
    let theta = check_theta_condition(orbit);
    let symmetries = check_symmetries(orbit);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for &z in probes {
        match evaluate_trace(orbit, z) {
            Ok(t) => {
                worst = if t.product_error.is_nan() {
                    f64::NAN
                } else {
                    worst.max(t.product_error)
                }
            }
            Err(_) => skipped += 1,
        }
    }
    let trace_pass = worst <= AUDIT_TOL;
    let expected = exponent(orbit.order) as f64;
    let zero_orders: Vec<ZeroOrder> = orbit
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(index, &z)| {
            let measured = zero_order(orbit, index, ZERO_ORDER_STEPS.0, ZERO_ORDER_STEPS.1)
                .unwrap_or(f64::NAN);
            ZeroOrder {
                index,
                z,
                measured,
                expected,
                pass: (measured - expected).abs() < ZERO_ORDER_TOL,
            }
        })
        .collect();
    let passed = theta.pass
        && trace_pass
        && symmetries.iter().all(|s| s.pass)
        && zero_orders.iter().all(|z| z.pass);
    AuditReport {
        theta,
        symmetries,
        trace_points: probes.len(),
        trace_skipped: skipped,
        trace_max_product_error: worst,
        trace_pass,
        zero_orders,
        passed,
    }
}
