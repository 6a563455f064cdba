use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nzbc_core::grid::{evaluate_grid, linspace};
use nzbc_core::io::presets;
use nzbc_core::verification::{pde_residual, split_step_evolve, EvolutionSetup};
use nzbc_core::{Complex64, DenseComplexMatrix, FieldEvaluator, SignConvention, Solution};

fn solution(name: &str) -> Solution {
    Solution::new(presets::preset(name).unwrap().spectral(), SignConvention::A).unwrap()
}

fn point_evaluation(c: &mut Criterion) {
    let mut g = c.benchmark_group("q");
    for name in ["fig2a", "fig4a", "fig7a", "fig8a"] {
        let sol = solution(name);
        g.bench_function(name, |b| {
            b.iter(|| sol.q(black_box(0.4), black_box(0.3)).unwrap())
        });
    }
    let sol = solution("fig4a");
    g.bench_function("fig4a determinant form", |b| {
        b.iter(|| sol.q_determinant(black_box(0.4), black_box(0.3)).unwrap())
    });
    g.finish();
}

fn lu(c: &mut Criterion) {
    for n in [4, 8, 16] {
        let data: Vec<Complex64> = (0..n * n)
            .map(|k| {
                Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())
                    + if k % (n + 1) == 0 { 3.0 } else { 0.0 }
            })
            .collect();
        let a = DenseComplexMatrix::from_row_major(n, n, data).unwrap();
        let rhs = vec![Complex64::new(1.0, 0.5); n];
        c.bench_function(&format!("lu solve {n}x{n}"), |b| {
            b.iter(|| black_box(&a).lu().unwrap().solve(&rhs).unwrap())
        });
    }
}

fn grid(c: &mut Criterion) {
    let sol = solution("fig4a");
    let xs = linspace(-10.0, 10.0, 101);
    let ts = linspace(-5.0, 5.0, 51);
    c.bench_function("grid 101x51 fig4a", |b| {
        b.iter(|| evaluate_grid(&sol, &xs, &ts).unwrap())
    });
    let double = solution("fig7a");
    c.bench_function("residual fig7a", |b| {
        b.iter(|| pde_residual(&double, black_box(0.4), black_box(0.3), 1e-3).unwrap())
    });
}

fn evolution(c: &mut Criterion) {
    let sol = solution("fig2a");
    let setup = EvolutionSetup {
        l: 40.0,
        m: 1024,
        dt: 1e-3,
        t0: 0.0,
        t1: 0.1,
    };
    let start: Vec<Complex64> = setup.xs().iter().map(|&x| sol.q(x, 0.0).unwrap()).collect();
    c.bench_function("split-step 1024 x 100 steps", |b| {
        b.iter(|| split_step_evolve(black_box(&start), &setup, 1.0).unwrap())
    });
}

criterion_group!(benches, point_evaluation, lu, grid, evolution);
criterion_main!(benches);
