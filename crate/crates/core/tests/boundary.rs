mod common;

use nzbc_core::spectrum::wrap_phase;
use nzbc_core::verification::boundary_profile;
use nzbc_core::FieldEvaluator;

#[test]
fn tails_reach_the_boundary_values() {
    for name in ["fig2a", "fig7a"] {
        let sol = common::solution(name);
        let [em, ep] = boundary_profile(&sol, sol.q_minus(), sol.q_plus(), &[30.0]).unwrap()[0];
        println!("{name}: {em:e} {ep:e}");
        assert!(em < 1e-8 && ep < 1e-8);
    }
}

#[test]
fn far_field_phase_matches_eigenvalue_arguments() {
    for name in ["fig2a", "fig4a", "fig7a", "fig7b"] {
        let sol = common::solution(name);
        let cfg = sol.config();
        let sum: f64 = cfg.eigenvalues.iter().map(|e| e.z.arg()).sum();
        let expected = cfg.pole_order.theta_multiplier() * sum;
        let measured = (sol.q(60.0, 0.0).unwrap() / sol.q(-60.0, 0.0).unwrap()).arg();
        let d = wrap_phase(measured - expected).abs();
        println!("{name}: measured {measured}, expected {expected}");
        assert!(d < 1e-6, "{name}: {d:e}");
    }
}

#[test]
fn tails_flatten_exponentially() {
    let sol = common::solution("fig2a");
    let ls = [20.0, 25.0, 30.0];
    let errs = boundary_profile(&sol, sol.q_minus(), sol.q_plus(), &ls).unwrap();
    println!("{errs:?}");
    for side in 0..2 {
        let e: Vec<f64> = errs.iter().map(|p| p[side]).collect();
        assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
        // Equal L steps give equal log decrements.
        let r1 = (e[0] / e[1]).ln();
        let r2 = (e[1] / e[2]).ln();
        assert!((r1 - r2).abs() < 0.1 * r1, "{r1} {r2}");
    }
}
