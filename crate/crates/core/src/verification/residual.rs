//! Pointwise PDE residual `R(q) = i q_t + q_xx + 2 (|q|^2 - Q0^2) q` with
//! fourth-order central differences.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solution::FieldEvaluator;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const H_RANGE: (f64, f64) = (1e-4, 1e-2);

fn sample<F: FieldEvaluator + ?Sized>(f: &F, x: f64, t: f64) -> Result<Complex64> {
    f.q(x, t).map_err(|e| Error::StencilEvaluationFailure {
        x,
        t,
        source: Box::new(e),
    })
}

pub fn pde_residual<F: FieldEvaluator + ?Sized>(
    f: &F,
    x: f64,
    t: f64,
    h: f64,
) -> Result<Complex64> {
    if !(H_RANGE.0..=H_RANGE.1).contains(&h) {
        return Err(Error::InvalidSetup(format!(
            "stencil step {h} outside [{}, {}]",
            H_RANGE.0, H_RANGE.1
        )));
    }
    let q = sample(f, x, t)?;
    let tp1 = sample(f, x, t + h)?;
    let tp2 = sample(f, x, t + 2.0 * h)?;
    let tm1 = sample(f, x, t - h)?;
    let tm2 = sample(f, x, t - 2.0 * h)?;
    let xp1 = sample(f, x + h, t)?;
    let xp2 = sample(f, x + 2.0 * h, t)?;
    let xm1 = sample(f, x - h, t)?;
    let xm2 = sample(f, x - 2.0 * h, t)?;
    let q_t = (8.0 * (tp1 - tm1) - (tp2 - tm2)) / (12.0 * h);
    // Differences against the centre keep a constant field exactly stationary.
    let q_xx = (-(xp2 - q) + 16.0 * (xp1 - q) + 16.0 * (xm1 - q) - (xm2 - q)) / (12.0 * h * h);
    let q02 = f.q0() * f.q0();
    Ok(I * q_t + q_xx + 2.0 * (q.norm_sqr() - q02) * q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSweep {
    pub max: f64,
    /// `(x, t)` of the maximum.
    pub at: [f64; 2],
    pub points: usize,
    pub h: f64,
}

/// Max `|R|` over the tensor grid `xs x ts`. The reduction runs in index
/// order, so the result does not depend on the thread count.
pub fn residual_sweep<F: FieldEvaluator + ?Sized>(
    f: &F,
    xs: &[f64],
    ts: &[f64],
    h: f64,
) -> Result<ResidualSweep> {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
        .collect();
    let values: Vec<f64> = pts
        .par_iter()
        .map(|&(x, t)| pde_residual(f, x, t, h).map(|r| r.norm()))
        .collect::<Result<_>>()?;
    let mut best = ResidualSweep {
        max: 0.0,
        at: [f64::NAN, f64::NAN],
        points: pts.len(),
        h,
    };
    for (v, (x, t)) in values.iter().zip(&pts) {
        if *v > best.max || best.at[0].is_nan() {
            best.max = *v;
            best.at = [*x, *t];
        }
    }
    Ok(best)
}
