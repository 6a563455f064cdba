//! Strang split-step Fourier integration of
//! `i q_t + q_xx + 2 (|q|^2 - Q0^2) q = 0` on a periodic window.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solution::FieldEvaluator;

use super::tolerances;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSetup {
    /// Half-width of the window `[-L, L)`.
    pub l: f64,
    /// Number of grid points, a power of two.
    pub m: usize,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Default for EvolutionSetup {
    /// `[-40, 40)` with 4096 points, `dt = 1e-4`, `t` from -2 to 2.
    fn default() -> Self {
        Self {
            l: 40.0,
            m: 4096,
            dt: 1e-4,
            t0: -2.0,
            t1: 2.0,
        }
    }
}

impl EvolutionSetup {
    pub fn validate(&self) -> Result<()> {
        if !self.m.is_power_of_two() || self.m < 2 {
            return Err(Error::NonPowerOfTwo(self.m));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidSetup(format!(
                "half-width {} must be positive",
                self.l
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidSetup(format!(
                "time step {} must be positive",
                self.dt
            )));
        }
        if !(self.t1 >= self.t0) || !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(Error::InvalidSetup(format!(
                "bad time span [{}, {}]",
                self.t0, self.t1
            )));
        }
        let steps = (self.t1 - self.t0) / self.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return Err(Error::InvalidSetup(format!(
                "span {} is not a whole number of steps {}",
                self.t1 - self.t0,
                self.dt
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).round() as usize
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.m as f64
    }

    /// `x_j = -L + j 2L/M`, `j = 0..M`.
    pub fn xs(&self) -> Vec<f64> {
        (0..self.m)
            .map(|j| -self.l + j as f64 * self.dx())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitStepMode {
    #[default]
    Full,
    /// Free Schrodinger flow only (nonlinear substep disabled).
    LinearOnly,
}

pub fn split_step_evolve(
    samples: &[Complex64],
    setup: &EvolutionSetup,
    q0: f64,
) -> Result<Vec<Complex64>> {
    split_step_evolve_with(samples, setup, q0, SplitStepMode::Full)
}

pub fn split_step_evolve_with(
    samples: &[Complex64],
    setup: &EvolutionSetup,
    q0: f64,
    mode: SplitStepMode,
) -> Result<Vec<Complex64>> {
    setup.validate()?;
    let m = setup.m;
    if samples.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: samples.len(),
        });
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut scratch = vec![
        Complex64::new(0.0, 0.0);
        fwd.get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len())
    ];

    let dt = setup.dt;
    let norm = 1.0 / m as f64;
    let dk = PI / setup.l;
    let linear: Vec<Complex64> = (0..m)
        .map(|j| {
            let k = if j <= m / 2 {
                j as f64
            } else {
                j as f64 - m as f64
            } * dk;
            Complex64::from_polar(norm, -k * k * dt)
        })
        .collect();
    let q02 = q0 * q0;
    let nonlinear = |q: &mut [Complex64], tau: f64| {
        if mode == SplitStepMode::Full {
            for v in q.iter_mut() {
                *v *= (2.0 * I * (v.norm_sqr() - q02) * tau).exp();
            }
        }
    };

    let mut q = samples.to_vec();
    let steps = setup.steps();
    for step in 0..steps {
        // Adjacent half steps are fused into full ones.
        nonlinear(&mut q, if step == 0 { 0.5 * dt } else { dt });
        fwd.process_with_scratch(&mut q, &mut scratch);
        for (v, l) in q.iter_mut().zip(&linear) {
            *v *= l;
        }
        inv.process_with_scratch(&mut q, &mut scratch);
    }
    if steps > 0 {
        nonlinear(&mut q, 0.5 * dt);
    }
    Ok(q)
}

/// `sum (|q_j|^2 - Q0^2) dx`, the trapezoid rule on the periodic grid.
pub fn renormalized_mass(samples: &[Complex64], dx: f64, q0: f64) -> f64 {
    samples.iter().map(|v| v.norm_sqr() - q0 * q0).sum::<f64>() * dx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionOutcome {
    pub setup: EvolutionSetup,
    pub steps: usize,
    /// `max_j |q_evolved(x_j) - q_exact(x_j, t1)|`.
    pub linf_error: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
    pub mass_rel_drift: f64,
    pub periodic_mismatch: f64,
}

/// `|q(L, t0) - q(-L, t0)|`.
pub fn periodic_mismatch<F: FieldEvaluator + ?Sized>(f: &F, setup: &EvolutionSetup) -> Result<f64> {
    Ok((f.q(setup.l, setup.t0)? - f.q(-setup.l, setup.t0)?).norm())
}

/// An evolved slice next to the exact field at `t1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun {
    pub xs: Vec<f64>,
    pub evolved: Vec<Complex64>,
    pub exact: Vec<Complex64>,
    pub outcome: EvolutionOutcome,
}

/// Samples the exact field at `t0`, evolves it to `t1` and compares with the
/// exact field there.
pub fn evolution_run<F: FieldEvaluator + ?Sized>(
    f: &F,
    setup: &EvolutionSetup,
) -> Result<EvolutionRun> {
    setup.validate()?;
    let mismatch = periodic_mismatch(f, setup)?;
    if !(mismatch < tolerances::PERIODIC_GATE) {
        return Err(Error::PeriodicIncompatible { mismatch });
    }
    let xs = setup.xs();
    let start: Vec<Complex64> = xs
        .iter()
        .map(|&x| f.q(x, setup.t0))
        .collect::<Result<_>>()?;
    let evolved = split_step_evolve(&start, setup, f.q0())?;
    let exact: Vec<Complex64> = xs
        .iter()
        .map(|&x| f.q(x, setup.t1))
        .collect::<Result<_>>()?;
    let linf = evolved
        .iter()
        .zip(&exact)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let dx = setup.dx();
    let m0 = renormalized_mass(&start, dx, f.q0());
    let m1 = renormalized_mass(&evolved, dx, f.q0());
    let outcome = EvolutionOutcome {
        setup: *setup,
        steps: setup.steps(),
        linf_error: linf,
        mass_initial: m0,
        mass_final: m1,
        mass_rel_drift: (m1 - m0).abs() / m0.abs().max(f64::MIN_POSITIVE),
        periodic_mismatch: mismatch,
    };
    Ok(EvolutionRun {
        xs,
        evolved,
        exact,
        outcome,
    })
}

pub fn evolution_check<F: FieldEvaluator + ?Sized>(
    f: &F,
    setup: &EvolutionSetup,
) -> Result<EvolutionOutcome> {
    evolution_run(f, setup).map(|r| r.outcome)
}
