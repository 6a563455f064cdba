//! Independent adjudication of constructed fields: PDE residuals,
//! split-step cross-checks, boundary asymptotics and orbit audits.

pub mod evolution;
pub mod residual;
pub mod tolerances;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::linspace;
use crate::scattering::{self, SymmetryCheck, ThetaCheck};
use crate::solution::{FieldEvaluator, Solution};
use crate::spectrum::{wrap_phase, PoleOrder, SignConvention, SpectralConfig};

pub use evolution::{
    evolution_check, evolution_run, renormalized_mass, split_step_evolve, split_step_evolve_with,
    EvolutionOutcome, EvolutionRun, EvolutionSetup, SplitStepMode,
};
pub use residual::{pde_residual, residual_sweep, ResidualSweep};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConventionChoice {
    Fixed(SignConvention),
    /// Probe both conventions and keep the one with the smaller residual.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationPlan {
    pub window: Window,
    pub residual: bool,
    pub residual_points: usize,
    pub h: f64,
    pub forms: bool,
    pub boundary: bool,
    pub boundary_l: f64,
    pub theta: bool,
    pub symmetries: bool,
    pub evolution: Option<EvolutionSetup>,
}

impl VerificationPlan {
    pub fn new(window: Window) -> Self {
        Self {
            window,
            residual: true,
            residual_points: tolerances::DEFAULT_RESIDUAL_POINTS,
            h: tolerances::DEFAULT_H,
            forms: true,
            boundary: true,
            boundary_l: tolerances::DEFAULT_BOUNDARY_L,
            theta: true,
            symmetries: true,
            evolution: None,
        }
    }

    fn axes(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let w = &self.window;
        (linspace(w.x_min, w.x_max, n), linspace(w.t_min, w.t_max, n))
    }
}

/// One thresholded measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Gate {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NotApplicable {
    pub check: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionProbe {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub pole_order: PoleOrder,
    pub n: usize,
    pub convention_sign: SignConvention,
    pub convention_probe: Option<ConventionProbe>,
    pub residual_max: Option<f64>,
    pub residual_at: Option<[f64; 2]>,
    pub residual_grid_spec: String,
    pub form_max_rel_error: Option<f64>,
    pub boundary_l: f64,
    /// `(|q(-L,0) - q-|, |q(L,0) - q+|)`.
    pub boundary_errors: Option<[f64; 2]>,
    pub far_field_phase_error: Option<f64>,
    pub theta: Option<ThetaCheck>,
    pub symmetries: Vec<SymmetryCheck>,
    pub evolution: Option<EvolutionOutcome>,
    pub evolution_linf_error: Option<f64>,
    pub near_singular_points: usize,
    pub gates: Vec<Gate>,
    pub not_applicable: Vec<NotApplicable>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn failed_gates(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| !g.pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(
                f,
                "{} {}: {:e} (tol {:e})",
                if g.pass { "PASS" } else { "FAIL" },
                g.name,
                g.value,
                g.tolerance
            )?;
        }
        for na in &self.not_applicable {
            writeln!(f, "N/A  {}: {}", na.check, na.reason)?;
        }
        Ok(())
    }
}

fn probe_residual(sol: &Solution, plan: &VerificationPlan) -> f64 {
    let (xs, ts) = plan.axes(5);
    residual_sweep(sol, &xs, &ts, plan.h).map_or(f64::INFINITY, |r| r.max)
}

/// Picks the sign convention by residual on a coarse probe grid.
pub fn select_convention(
    cfg: &SpectralConfig,
    plan: &VerificationPlan,
) -> Result<(Solution, ConventionProbe)> {
    let a = Solution::new(cfg.clone(), SignConvention::A)?;
    let b = Solution::new(cfg.clone(), SignConvention::B)?;
    let probe = ConventionProbe {
        a: probe_residual(&a, plan),
        b: probe_residual(&b, plan),
    };
    Ok(if probe.b < probe.a {
        (b, probe)
    } else {
        (a, probe)
    })
}

/// Runs every enabled check. Only invalid configurations are errors; failed
/// checks are recorded in the report.
pub fn verify(
    cfg: &SpectralConfig,
    plan: &VerificationPlan,
    choice: ConventionChoice,
) -> Result<VerificationReport> {
    let (sol, probe) = match choice {
        ConventionChoice::Fixed(c) => (Solution::new(cfg.clone(), c)?, None),
        ConventionChoice::Auto => {
            let (s, p) = select_convention(cfg, plan)?;
            (s, Some(p))
        }
    };
    verify_solution(&sol, plan, probe)
}

pub fn verify_solution(
    sol: &Solution,
    plan: &VerificationPlan,
    convention_probe: Option<ConventionProbe>,
) -> Result<VerificationReport> {
    let orbit = sol.orbit();
    let mut gates = Vec::new();
    let mut not_applicable = Vec::new();
    let mut warnings = Vec::new();
    let mut na = |check: &str, reason: String| {
        not_applicable.push(NotApplicable {
            check: check.into(),
            reason,
        })
    };

    let (xs, ts) = plan.axes(plan.residual_points);
    let w = &plan.window;
    let residual_grid_spec = format!(
        "{}x{} on x in [{}, {}], t in [{}, {}], h = {}",
        xs.len(),
        ts.len(),
        w.x_min,
        w.x_max,
        w.t_min,
        w.t_max,
        plan.h
    );

    let mut near_singular_points = 0;
    for &t in &ts {
        for &x in &xs {
            if matches!(sol.q_detailed(x, t), Ok(p) if p.near_singular) {
                near_singular_points += 1;
            }
        }
    }
    if near_singular_points > 0 {
        warnings.push(format!(
            "{near_singular_points} sample points have condition estimates above {:e}",
            crate::scaling::NEAR_SINGULAR_COND
        ));
    }

    let (mut residual_max, mut residual_at) = (None, None);
    if plan.residual {
        match residual_sweep(sol, &xs, &ts, plan.h) {
            Ok(r) => {
                gates.push(Gate::below("pde_residual", r.max, tolerances::RESIDUAL));
                residual_max = Some(r.max);
                residual_at = Some(r.at);
            }
            Err(e) => {
                gates.push(Gate::below(
                    "pde_residual",
                    f64::INFINITY,
                    tolerances::RESIDUAL,
                ));
                warnings.push(format!("residual sweep failed: {e}"));
            }
        }
    } else {
        na("pde_residual", "disabled".into());
    }

    let mut form_max_rel_error = None;
    if plan.forms && orbit.n() > 0 {
        let tol = match orbit.order {
            PoleOrder::Simple => tolerances::FORM_SIMPLE,
            PoleOrder::Double => tolerances::FORM_DOUBLE,
        };
        let mut worst: f64 = 0.0;
        for &t in &ts {
            for &x in &xs {
                let e = match (sol.q(x, t), sol.q_determinant(x, t)) {
                    (Ok(a), Ok(b)) => (a - b).norm() / (1.0 + a.norm()),
                    _ => f64::INFINITY,
                };
                worst = worst.max(e);
            }
        }
        gates.push(Gate::below("form_equivalence", worst, tol));
        form_max_rel_error = Some(worst);
    }

    let mut boundary_errors = None;
    let mut far_field_phase_error = None;
    if plan.boundary {
        let l = plan.boundary_l;
        match (sol.q(-l, 0.0), sol.q(l, 0.0)) {
            (Ok(left), Ok(right)) => {
                let errs = [(left - sol.q_minus()).norm(), (right - sol.q_plus()).norm()];
                gates.push(Gate::below("boundary_minus", errs[0], tolerances::BOUNDARY));
                gates.push(Gate::below("boundary_plus", errs[1], tolerances::BOUNDARY));
                boundary_errors = Some(errs);
                if errs.iter().all(|e| *e < tolerances::BOUNDARY) {
                    let sum: f64 = orbit.eigenvalues().iter().map(|z| z.arg()).sum();
                    let expected = orbit.order.theta_multiplier() * sum;
                    let measured = right.arg() - left.arg();
                    let e = wrap_phase(measured - expected).abs();
                    gates.push(Gate::below(
                        "far_field_phase",
                        e,
                        tolerances::THETA_FAR_FIELD,
                    ));
                    far_field_phase_error = Some(e);
                } else {
                    na("far_field_phase", "tails not flat at the boundary".into());
                }
            }
            _ => {
                gates.push(Gate::below(
                    "boundary_minus",
                    f64::INFINITY,
                    tolerances::BOUNDARY,
                ));
                warnings.push("field evaluation failed at the boundary".into());
            }
        }
    } else {
        na("boundary", "disabled".into());
    }

    let theta = plan.theta.then(|| scattering::check_theta_condition(orbit));
    if let Some(t) = &theta {
        gates.push(Gate {
            name: "theta_condition".into(),
            value: t.discrepancy,
            tolerance: scattering::AUDIT_TOL,
            pass: t.pass,
        });
    }
    let symmetries = if plan.symmetries {
        scattering::check_symmetries(orbit)
    } else {
        Vec::new()
    };
    for s in &symmetries {
        gates.push(Gate {
            name: format!("symmetry {}", s.name),
            value: s.max_rel_error,
            tolerance: scattering::AUDIT_TOL,
            pass: s.pass,
        });
    }

    let mut evolution = None;
    match &plan.evolution {
        None => na("evolution", "disabled".into()),
        Some(setup) => {
            let jump = (sol.q_plus() - sol.q_minus()).norm();
            if jump > tolerances::PERIODIC_GATE * sol.q0().max(1.0) {
                na(
                    "evolution",
                    format!("PeriodicIncompatible: q+ differs from q- by {jump:e}"),
                );
            } else {
                match evolution_check(sol, setup) {
                    Ok(out) => {
                        gates.push(Gate::below(
                            "evolution_linf",
                            out.linf_error,
                            tolerances::EVOLUTION,
                        ));
                        gates.push(Gate::below(
                            "evolution_mass",
                            out.mass_rel_drift,
                            tolerances::MASS,
                        ));
                        evolution = Some(out);
                    }
                    Err(crate::Error::PeriodicIncompatible { mismatch }) => na(
                        "evolution",
                        format!("PeriodicIncompatible: |q(L) - q(-L)| = {mismatch:e}"),
                    ),
                    Err(e) => {
                        gates.push(Gate::below(
                            "evolution_linf",
                            f64::INFINITY,
                            tolerances::EVOLUTION,
                        ));
                        warnings.push(format!("evolution failed: {e}"));
                    }
                }
            }
        }
    }

    let passed = gates.iter().all(|g| g.pass);
    Ok(VerificationReport {
        pole_order: orbit.order,
        n: orbit.n(),
        convention_sign: orbit.convention,
        convention_probe,
        residual_max,
        residual_at,
        residual_grid_spec,
        form_max_rel_error,
        boundary_l: plan.boundary_l,
        boundary_errors,
        far_field_phase_error,
        theta,
        symmetries,
        evolution_linf_error: evolution.as_ref().map(|e| e.linf_error),
        evolution,
        near_singular_points,
        gates,
        not_applicable,
        warnings,
        passed,
    })
}

/// `|q(L, 0) - q(-L, 0)|`-style boundary error at several `L`, used to check
/// exponential flattening of the tails.
pub fn boundary_profile<F: FieldEvaluator + ?Sized>(
    f: &F,
    q_minus: Complex64,
    q_plus: Complex64,
    ls: &[f64],
) -> Result<Vec<[f64; 2]>> {
    ls.iter()
        .map(|&l| {
            Ok([
                (f.q(-l, 0.0)? - q_minus).norm(),
                (f.q(l, 0.0)? - q_plus).norm(),
            ])
        })
        .collect()
}
