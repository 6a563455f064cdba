//! Reflectionless potential with double poles.
//!
//! With `M = 2N`, `C_n(z) = A-[xi_hat_n] exp(2 i theta(xi_hat_n)) / (z - xi_hat_n)`,
//! `D_n = B-[xi_hat_n] + 2 i theta'(xi_hat_n)` and `d = xi_s - xi_hat_n`, the
//! unknowns `(mu_n, mu'_n)` (values of `mu_{-,11}` and its derivative at
//! `xi_hat_n`) solve the `2M x 2M` system
//!
//! ```text
//! row s    : sum_n C_n(xi_s) [(D_n + 1/d) mu_n + mu'_n] - (i q-/xi_s) mu_s
//!          = -i q- / xi_s
//! row M + s: sum_n C_n(xi_s)/d [(D_n + 2/d) mu_n + mu'_n]
//!            - (i q-/xi_s^2) mu_s + (i q- Q0^2/xi_s^3) mu'_s
//!          = -i q- / xi_s^2
//! ```
//!
//! and `q = q- - i sum_n A-[xi_hat_n] exp(2 i theta(xi_hat_n)) (mu'_n + D_n mu_n)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, FieldGrid};
use crate::linalg::DenseComplexMatrix;
use crate::scaling::{self, PointValue};
use crate::solution::Solution;
use crate::spectrum::{OrbitTable, PoleOrder, SpectralConfig};
use crate::uniformization::{theta_prime_raw, theta_raw};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `|g''|` the Laurent expansion is treated as degenerate.
pub const DEGENERATE_G2: f64 = 1e-14;

/// Coefficients of `f/g` at a double zero `z0` of `g`:
/// `P_{-2} = 2 f / g''` and `Res = 2 (f'/g'' - f g''' / (3 g''^2))`.
pub fn laurent_coefficients(
    f: Complex64,
    fprime: Complex64,
    g2: Complex64,
    g3: Complex64,
) -> Result<(Complex64, Complex64)> {
    if g2.norm() < DEGENERATE_G2 {
        return Err(Error::DegenerateZero(g2.norm()));
    }
    let p = 2.0 * f / g2;
    let res = 2.0 * (fprime / g2 - f * g3 / (3.0 * g2 * g2));
    Ok((p, res))
}

/// The unscaled system at one `(x, t)`.
#[derive(Debug, Clone)]
pub struct DoublePoleSystem {
    pub h: DenseComplexMatrix,
    pub rhs: Vec<Complex64>,
    /// `(mu_1..mu_M, mu'_1..mu'_M)`, filled by [`DoublePoleSystem::solve`].
    pub unknowns: Option<Vec<Complex64>>,
    /// `C_n(xi_s)` as an `M x M` row-major table.
    pub c_hat: DenseComplexMatrix,
    pub d_hat: Vec<Complex64>,
    /// `A-[xi_hat_n] exp(2 i theta(xi_hat_n))`.
    pub weights: Vec<Complex64>,
    q_minus: Complex64,
}

impl DoublePoleSystem {
    pub fn solve(&mut self) -> Result<&[Complex64]> {
        let y = self.h.lu()?.solve(&self.rhs)?;
        Ok(self.unknowns.insert(y))
    }

    pub fn q(&self) -> Option<Complex64> {
        let y = self.unknowns.as_ref()?;
        let m = self.weights.len();
        let s: Complex64 = (0..m)
            .map(|n| self.weights[n] * (y[m + n] + self.d_hat[n] * y[n]))
            .sum();
        Some(self.q_minus - I * s)
    }
}

fn require_double(orbit: &OrbitTable) -> Result<()> {
    if orbit.order != PoleOrder::Double {
        return Err(Error::PoleOrderMismatch { expected: "double" });
    }
    Ok(())
}

struct Parts {
    h: DenseComplexMatrix,
    rhs: Vec<Complex64>,
    c_hat: DenseComplexMatrix,
    d_hat: Vec<Complex64>,
    /// Weights after dividing by `exp(sigma_n)`.
    weights: Vec<Complex64>,
}

/// Builds the system with column pairs `(n, M + n)` divided by
/// `exp(sigma_n)`; `scale = false` gives the plain entries.
fn build(orbit: &OrbitTable, x: f64, t: f64, scale: bool) -> Parts {
    let m = orbit.xi.len();
    let q0 = orbit.q0;
    let qm = orbit.q_minus;
    let sign = orbit.convention.sign();
    let mut weights = Vec::with_capacity(m);
    let mut diag_scale = Vec::with_capacity(m);
    let mut d_hat = Vec::with_capacity(m);
    for n in 0..m {
        let h = orbit.xi_hat[n];
        let lw = orbit.a_minus_xihat[n].ln() + 2.0 * I * theta_raw(x, t, h, q0);
        let sigma = if scale { lw.re.max(0.0) } else { 0.0 };
        weights.push((lw - sigma).exp());
        diag_scale.push((-sigma).exp());
        d_hat.push(orbit.b_minus_xihat[n] + 2.0 * I * theta_prime_raw(x, t, h, q0));
    }
    let mut c_hat = DenseComplexMatrix::zeros(m, m);
    let mut hm = DenseComplexMatrix::zeros(2 * m, 2 * m);
    for s in 0..m {
        let xs = orbit.xi[s];
        for n in 0..m {
            let d = xs - orbit.xi_hat[n];
            let c = weights[n] / d;
            c_hat[(s, n)] = c;
            hm[(s, n)] = c * (d_hat[n] + 1.0 / d);
            hm[(s, m + n)] = c;
            hm[(m + s, n)] = c / d * (d_hat[n] + 2.0 / d);
            hm[(m + s, m + n)] = c / d;
        }
        let e = diag_scale[s];
        hm[(s, s)] -= I * qm / xs * e;
        hm[(m + s, s)] -= I * qm / (xs * xs) * e;
        hm[(m + s, m + s)] += I * qm * q0 * q0 / (xs * xs * xs) * e;
    }
    let mut rhs = vec![Complex64::new(0.0, 0.0); 2 * m];
    for s in 0..m {
        let xs = orbit.xi[s];
        rhs[s] = -sign * I * qm / xs;
        rhs[m + s] = -sign * I * qm / (xs * xs);
    }
    Parts {
        h: hm,
        rhs,
        c_hat,
        d_hat,
        weights,
    }
}

pub fn assemble(orbit: &OrbitTable, x: f64, t: f64) -> Result<DoublePoleSystem> {
    require_double(orbit)?;
    let p = build(orbit, x, t, false);
    Ok(DoublePoleSystem {
        h: p.h,
        rhs: p.rhs,
        unknowns: None,
        c_hat: p.c_hat,
        d_hat: p.d_hat,
        weights: p.weights,
        q_minus: orbit.q_minus,
    })
}

pub fn evaluate_q_detailed(orbit: &OrbitTable, x: f64, t: f64) -> Result<PointValue> {
    require_double(orbit)?;
    if orbit.xi.is_empty() {
        return Ok(PointValue::exact(orbit.q_minus));
    }
    let Parts {
        mut h,
        mut rhs,
        d_hat,
        weights,
        ..
    } = build(orbit, x, t, true);
    scaling::equilibrate_rows(&mut h, &mut [&mut rhs]);
    let (y, cond) = scaling::solve_with_cond(&h, &rhs).map_err(|e| scaling::at(e, x, t))?;
    let m = weights.len();
    let s: Complex64 = (0..m)
        .map(|n| weights[n] * (y[m + n] + d_hat[n] * y[n]))
        .sum();
    Ok(PointValue::new(orbit.q_minus - I * s, cond))
}

pub fn evaluate_q(orbit: &OrbitTable, x: f64, t: f64) -> Result<Complex64> {
    evaluate_q_detailed(orbit, x, t).map(|p| p.q)
}

/// Bordered-determinant form `q- + i det([[H, r], [w1^T w2^T, 0]]) / det H`
/// with `w1_n = A-[xi_hat_n] e^{2 i theta(xi_hat_n)} D_n` and
/// `w2_n = A-[xi_hat_n] e^{2 i theta(xi_hat_n)}`.
pub fn evaluate_q_determinant(orbit: &OrbitTable, x: f64, t: f64) -> Result<Complex64> {
    require_double(orbit)?;
    if orbit.xi.is_empty() {
        return Ok(orbit.q_minus);
    }
    let Parts {
        mut h,
        mut rhs,
        d_hat,
        weights,
        ..
    } = build(orbit, x, t, true);
    scaling::equilibrate_rows(&mut h, &mut [&mut rhs]);
    let mut w: Vec<Complex64> = weights.iter().zip(&d_hat).map(|(a, d)| a * d).collect();
    w.extend_from_slice(&weights);
    scaling::bordered_ratio(&h, &rhs, &w)
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
    require_double(orbit)?;
    let sol = Solution::from_parts(cfg.clone(), orbit.clone())?;
    grid::evaluate_grid(&sol, xs, ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{derive_orbit, EigenEntry, SignConvention};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn fig7a() -> OrbitTable {
        let cfg = SpectralConfig::new(c(1.0, 0.0), 0.5, PoleOrder::Double)
            .with_eigenvalue(EigenEntry::new(c(0.0, 1.5), c(1.0, 0.0)).with_b(c(1.0, 0.0)));
        derive_orbit(&cfg, SignConvention::A).unwrap()
    }

    #[test]
    fn laurent_examples() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert_eq!(
            laurent_coefficients(one, zero, c(2.0, 0.0), zero).unwrap(),
            (one, zero)
        );
        assert_eq!(
            laurent_coefficients(zero, one, c(2.0, 0.0), c(6.0, 0.0)).unwrap(),
            (zero, one)
        );
        assert!(matches!(
            laurent_coefficients(one, one, c(1e-15, 0.0), one),
            Err(Error::DegenerateZero(_))
        ));
    }

    // f = e^z, g = (z - 1)^2 e^z at z0 = 1: f/g = (z - 1)^-2 exactly.
    #[test]
    fn laurent_series_oracle() {
        let e = c(std::f64::consts::E, 0.0);
        let (p, r) = laurent_coefficients(e, e, 2.0 * e, 6.0 * e).unwrap();
        assert!(close(p, c(1.0, 0.0), 1e-15));
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn assembly_at_origin() {
        let o = fig7a();
        let sys = assemble(&o, 0.0, 0.0).unwrap();
        assert_eq!(sys.h.rows(), 4);
        for s in 0..2 {
            for n in 0..2 {
                let expected = o.a_minus_xihat[n] / (o.xi[s] - o.xi_hat[n]);
                assert!(close(sys.c_hat[(s, n)], expected, 1e-15));
            }
        }
    }

    // Frozen from the 40-digit oracle implementing the derivation directly.
    #[test]
    fn assembly_matches_oracle() {
        let sys = assemble(&fig7a(), 1.0, 0.5).unwrap();
        let expected = [
            [
                c(-1.7547775278935416, -0.19854088920798255),
                c(-0.048416012079217636, -1.0473502004201437),
                c(-0.42817954535195575, -0.33784825523293424),
                c(-0.60212748565118777, 0.47509910892131378),
            ],
            [
                c(0.26831672720165821, 0.64593187665268516),
                c(2.8080115763493155, -1.8918229662808114),
                c(0.26761221584497234, 0.2111551595205839),
                c(-2.167658948344276, 1.7103567921167296),
            ],
            [
                c(0.37832947825723722, 2.2366789654521196),
                c(-0.28221367951213814, -0.03665011918707343),
                c(-0.70171420257581738, 0.5138154544223469),
                c(0.15836636964043793, 0.20070916188372926),
            ],
            [
                c(-0.63498077890231082, 0.082462768170915217),
                c(0.85124132607878374, -1.7825276722672692),
                c(-0.15836636964043793, 0.20070916188372926),
                c(5.4274281505400755, 2.6011907380131312),
            ],
        ];
        for (s, row) in expected.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!(
                    close(sys.h[(s, j)], *e, 1e-13),
                    "H[{s}][{j}] = {}",
                    sys.h[(s, j)]
                );
            }
        }
    }

    #[test]
    fn golden_field_values() {
        let o = fig7a();
        assert!(close(
            evaluate_q(&o, 0.0, 0.0).unwrap(),
            c(0.30864303513483424, 0.59636400027073438),
            1e-13
        ));
        assert!(close(
            evaluate_q(&o, 1.0, 0.5).unwrap(),
            c(0.46894716881901326, -1.8483889561537271),
            1e-13
        ));
    }

    #[test]
    fn forms_agree() {
        let o = fig7a();
        for (x, t) in [(0.3, 0.7), (-2.0, 1.1), (4.0, -3.0)] {
            let mut sys = assemble(&o, x, t).unwrap();
            sys.solve().unwrap();
            let q = evaluate_q(&o, x, t).unwrap();
            assert!(close(sys.q().unwrap(), q, 1e-11));
            assert!(close(evaluate_q_determinant(&o, x, t).unwrap(), q, 1e-10));
        }
    }

    #[test]
    fn background_recovery() {
        let cfg = SpectralConfig::new(c(1.0, 0.0), 0.5, PoleOrder::Double)
            .with_eigenvalue(EigenEntry::new(c(0.0, 1.5), c(1e-30, 0.0)));
        let o = derive_orbit(&cfg, SignConvention::A).unwrap();
        for (x, t) in [(0.0, 0.0), (1.0, -2.0)] {
            assert!(close(evaluate_q(&o, x, t).unwrap(), c(1.0, 0.0), 1e-12));
        }
    }

    #[test]
    fn far_field_does_not_overflow() {
        let o = fig7a();
        for x in [-300.0, 300.0] {
            let q = evaluate_q(&o, x, 0.5).unwrap();
            assert!(close(q, c(1.0, 0.0), 1e-10), "{x}: {q}");
        }
    }
}
