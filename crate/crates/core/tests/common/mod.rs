#![allow(dead_code)]

use nzbc_core::io::presets;
use nzbc_core::{Complex64, RunConfig, SignConvention, Solution};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn config(name: &str) -> RunConfig {
    presets::preset(name).unwrap()
}

pub fn solution(name: &str) -> Solution {
    Solution::new(config(name).spectral(), SignConvention::A).unwrap()
}

/// Valid presets (every bundled one except the deliberately singular input).
pub fn valid_presets() -> Vec<&'static str> {
    presets::names()
        .filter(|n| config(n).validate().is_ok())
        .collect()
}

/// Maximizer of a unimodal `f` on `[a, b]` by golden-section search.
pub fn argmax(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-11 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Local maxima of `f` on `[a, b]`, bracketed on a uniform scan and refined.
pub fn local_maxima(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let v: Vec<f64> = (0..=n).map(|i| f(a + i as f64 * h)).collect();
    (1..n)
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
        .map(|i| argmax(f, a + (i - 1) as f64 * h, a + (i + 1) as f64 * h))
        .collect()
}
