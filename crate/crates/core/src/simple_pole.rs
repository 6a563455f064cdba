//! Reflectionless potential with simple poles.
//!
//! The unknowns `y_j = mu_{-,11}(x, t, xi_hat_j)` solve `G y = v` with
//!
//! ```text
//! g_sj = w_j / (xi_s - xi_hat_j) + v_s delta_sj,
//! w_j  = A-[xi_hat_j] exp(2 i theta(x, t, xi_hat_j)),
//! v_s  = -i q- / xi_s,
//! ```
//!
//! and the field is `q = q- - i w^T y`, which equals the bordered
//! determinant ratio `q- + i det([[G, v], [w^T, 0]]) / det G`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, FieldGrid};
use crate::linalg::DenseComplexMatrix;
use crate::scaling::{self, PointValue};
use crate::solution::Solution;
use crate::spectrum::{OrbitTable, PoleOrder, SpectralConfig};
use crate::uniformization::theta_raw;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The unscaled system at one `(x, t)`.
#[derive(Debug, Clone)]
pub struct SimplePoleSystem {
    pub g: DenseComplexMatrix,
    pub w: Vec<Complex64>,
    pub v: Vec<Complex64>,
    /// Filled by [`SimplePoleSystem::solve`].
    pub mu: Option<Vec<Complex64>>,
    rhs_sign: f64,
    q_minus: Complex64,
}

impl SimplePoleSystem {
    /// Solves for `mu` without rescaling; adequate where the exponentials
    /// stay moderate.
    pub fn solve(&mut self) -> Result<&[Complex64]> {
        let rhs: Vec<Complex64> = self.v.iter().map(|v| v * self.rhs_sign).collect();
        let mu = self.g.lu()?.solve(&rhs)?;
        Ok(self.mu.insert(mu))
    }

    /// `q- - i w^T mu`, once solved.
    pub fn q(&self) -> Option<Complex64> {
        let mu = self.mu.as_ref()?;
        let s: Complex64 = self.w.iter().zip(mu).map(|(w, m)| w * m).sum();
        Some(self.q_minus - I * s)
    }
}

fn require_simple(orbit: &OrbitTable) -> Result<()> {
    if orbit.order != PoleOrder::Simple {
        return Err(Error::PoleOrderMismatch { expected: "simple" });
    }
    Ok(())
}

/// `log w_j = log A-[xi_hat_j] + 2 i theta(x, t, xi_hat_j)`.
fn log_weights(orbit: &OrbitTable, x: f64, t: f64) -> Vec<Complex64> {
    orbit
        .xi_hat
        .iter()
        .zip(&orbit.a_minus_xihat)
        .map(|(h, a)| a.ln() + 2.0 * I * theta_raw(x, t, *h, orbit.q0))
        .collect()
}

fn v_vector(orbit: &OrbitTable) -> Vec<Complex64> {
    orbit.xi.iter().map(|x| -I * orbit.q_minus / x).collect()
}

pub fn assemble(orbit: &OrbitTable, x: f64, t: f64) -> Result<SimplePoleSystem> {
    require_simple(orbit)?;
    let m = orbit.xi.len();
    let w: Vec<Complex64> = orbit
        .xi_hat
        .iter()
        .zip(&orbit.a_minus_xihat)
        .map(|(h, a)| a * (2.0 * I * theta_raw(x, t, *h, orbit.q0)).exp())
        .collect();
    let v = v_vector(orbit);
    let mut g = DenseComplexMatrix::zeros(m, m);
    for s in 0..m {
        for j in 0..m {
            g[(s, j)] = w[j] / (orbit.xi[s] - orbit.xi_hat[j]);
        }
        g[(s, s)] += v[s];
    }
    Ok(SimplePoleSystem {
        g,
        w,
        v,
        mu: None,
        rhs_sign: orbit.convention.sign(),
        q_minus: orbit.q_minus,
    })
}

/// Column-scaled system: column `j` is divided by `exp(sigma_j)` with
/// `sigma_j = max(0, Re log w_j)`, so no entry overflows.
fn scaled(
    orbit: &OrbitTable,
    x: f64,
    t: f64,
) -> (DenseComplexMatrix, Vec<Complex64>, Vec<Complex64>) {
    let m = orbit.xi.len();
    let logw = log_weights(orbit, x, t);
    let v = v_vector(orbit);
    let mut g = DenseComplexMatrix::zeros(m, m);
    let mut w_scaled = Vec::with_capacity(m);
    for (j, lw) in logw.iter().enumerate() {
        let sigma = lw.re.max(0.0);
        let ws = (lw - sigma).exp();
        let diag_scale = (-sigma).exp();
        for s in 0..m {
            g[(s, j)] = ws / (orbit.xi[s] - orbit.xi_hat[j]);
        }
        g[(j, j)] += v[j] * diag_scale;
        w_scaled.push(ws);
    }
    let rhs: Vec<Complex64> = v.iter().map(|v| v * orbit.convention.sign()).collect();
    (g, w_scaled, rhs)
}

/// Linear-system evaluation with scaling and a conditioning flag.
pub fn evaluate_q_detailed(orbit: &OrbitTable, x: f64, t: f64) -> Result<PointValue> {
    require_simple(orbit)?;
    if orbit.xi.is_empty() {
        return Ok(PointValue::exact(orbit.q_minus));
    }
    let (mut g, w, mut rhs) = scaled(orbit, x, t);
    scaling::equilibrate_rows(&mut g, &mut [&mut rhs]);
    let (y, cond) = scaling::solve_with_cond(&g, &rhs).map_err(|e| scaling::at(e, x, t))?;
    let s: Complex64 = w.iter().zip(&y).map(|(w, y)| w * y).sum();
    Ok(PointValue::new(orbit.q_minus - I * s, cond))
}

pub fn evaluate_q(orbit: &OrbitTable, x: f64, t: f64) -> Result<Complex64> {
    evaluate_q_detailed(orbit, x, t).map(|p| p.q)
}

/// Bordered-determinant form `q- + i det([[G, v], [w^T, 0]]) / det G`
/// (with the right-hand side sign of the active convention).
pub fn evaluate_q_determinant(orbit: &OrbitTable, x: f64, t: f64) -> Result<Complex64> {
    require_simple(orbit)?;
    if orbit.xi.is_empty() {
        return Ok(orbit.q_minus);
    }
    let (mut g, w, mut rhs) = scaled(orbit, x, t);
    scaling::equilibrate_rows(&mut g, &mut [&mut rhs]);
    scaling::bordered_ratio(&g, &rhs, &w)
        .map(|r| orbit.q_minus + I * r)
        .map_err(|e| scaling::at(e, x, t))
}

pub fn evaluate_u(cfg: &SpectralConfig, orbit: &OrbitTable, x: f64, t: f64) -> Result<Complex64> {
    let q = evaluate_q(orbit, x, t)?;
    Ok(q * Complex64::from_polar(1.0, -cfg.gamma0) / cfg.epsilon)
}

pub fn evaluate_grid(
    cfg: &SpectralConfig,
    orbit: &OrbitTable,
    xs: &[f64],
    ts: &[f64],
) -> Result<FieldGrid> {
    require_simple(orbit)?;
    let sol = Solution::from_parts(cfg.clone(), orbit.clone())?;
    grid::evaluate_grid(&sol, xs, ts)
}
