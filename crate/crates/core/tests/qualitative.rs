mod common;

use std::f64::consts::PI;

use common::{argmax, local_maxima};
use nzbc_core::grid::{evaluate_grid, linspace};
use nzbc_core::{Complex64, FieldEvaluator, Solution};

fn k_lambda(z: Complex64, q0: f64) -> (Complex64, Complex64) {
    let w = q0 * q0 / z;
    ((z - w) / 2.0, (z + w) / 2.0)
}

/// Maxima of `f` above `frac` of the largest one.
fn principal_maxima(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, frac: f64) -> Vec<f64> {
    let m = local_maxima(f, a, b, 4000);
    let top = m.iter().map(|&s| f(s)).fold(0.0, f64::max);
    m.into_iter().filter(|&s| f(s) > frac * top).collect()
}

fn max_abs_u(sol: &Solution) -> f64 {
    let g = evaluate_grid(sol, &linspace(-10.0, 10.0, 201), &linspace(-5.0, 5.0, 101)).unwrap();
    g.u.iter().map(|u| u.norm()).fold(0.0, f64::max)
}

#[test]
fn fig2a_is_time_periodic() {
    let sol = common::solution("fig2a");
    let f = |t: f64| sol.u(0.0, t).unwrap().norm();
    let peaks = principal_maxima(f, -6.0, 6.0, 0.9);
    assert!(peaks.len() >= 3, "{peaks:?}");
    let p1 = peaks[1] - peaks[0];
    let p2 = peaks[2] - peaks[1];
    let (k, l) = k_lambda(Complex64::new(0.0, 1.5), 1.0);
    let expected = PI / (2.0 * l * k).norm();
    println!("periods {p1:.12} {p2:.12}, expected {expected:.12}");
    assert!((p1 - p2).abs() < 1e-6);
    assert!((p1 - expected).abs() < 1e-6);
}

#[test]
fn fig3a_is_space_periodic_and_even_in_time() {
    let sol = common::solution("fig3a");
    let z = sol.config().eigenvalues[0].z;
    let (_, l) = k_lambda(z, 1.0);
    let expected = PI / l.re.abs();
    let f = |x: f64| sol.u(x, 0.0).unwrap().norm();
    let peaks = principal_maxima(f, -10.0, 10.0, 0.9);
    assert!(peaks.len() >= 3, "{peaks:?}");
    for w in peaks.windows(2) {
        assert!(
            (w[1] - w[0] - expected).abs() < 1e-6,
            "{} vs {expected}",
            w[1] - w[0]
        );
    }
    let mut asym = 0.0f64;
    for &x in &linspace(-10.0, 10.0, 41) {
        for &t in &linspace(0.0, 5.0, 21) {
            asym = asym.max((sol.u(x, t).unwrap().norm() - sol.u(x, -t).unwrap().norm()).abs());
        }
    }
    println!("t-asymmetry {asym:e}");
    assert!(asym < 1e-10);
}

#[test]
fn peak_amplitude_decreases_with_background() {
    let peaks: Vec<f64> = ["fig2a", "fig2b", "fig2c", "fig2d"]
        .iter()
        .map(|n| max_abs_u(&common::solution(n)))
        .collect();
    println!("{peaks:?}");
    assert!(peaks.windows(2).all(|w| w[0] > w[1]), "{peaks:?}");
}

#[test]
fn vanishing_background_gives_bright_pulse() {
    let sol = common::solution("fig2d");
    let z = sol.config().eigenvalues[0].z;
    let (k, _) = k_lambda(z, sol.config().q0());
    let amplitude = 2.0 * k.im;

    let f = |x: f64| sol.q(x, 0.0).unwrap().norm();
    let coarse = linspace(-10.0, 10.0, 401);
    let i = (0..coarse.len())
        .max_by(|&a, &b| f(coarse[a]).total_cmp(&f(coarse[b])))
        .unwrap();
    let x0 = argmax(f, coarse[i] - 0.05, coarse[i] + 0.05);
    let peak = f(x0);
    println!("max|q| {peak:.16} at x = {x0}, expected {amplitude}");
    assert!((peak - amplitude).abs() < 1e-3 * amplitude);

    let umax = sol.u(x0, 0.0).unwrap().norm();
    for x in [-20.0, 20.0] {
        let tail = sol.u(x, 0.0).unwrap().norm();
        assert!(tail < 1e-6 * umax, "|u({x}, 0)| = {tail:e}");
    }
}
