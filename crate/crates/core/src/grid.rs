//! Sampled fields on rectangular `(x, t)` lattices.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::solution::Solution;
use crate::spectrum::SpectralConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    Ok,
    NearSingular,
    Error,
}

impl PointFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            PointFlag::Ok => "ok",
            PointFlag::NearSingular => "near_singular",
            PointFlag::Error => "error",
        }
    }
}

/// Field samples stored t-major: entry `(it, ix)` lives at `it * nx + ix`.
/// Points whose evaluation failed hold NaN and the `Error` flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    #[serde(with = "nan_complex")]
    pub q: Vec<Complex64>,
    #[serde(with = "nan_complex")]
    pub u: Vec<Complex64>,
    pub flags: Vec<PointFlag>,
    pub config_digest: String,
}

impl FieldGrid {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn index(&self, it: usize, ix: usize) -> usize {
        it * self.xs.len() + ix
    }

    pub fn q_at(&self, it: usize, ix: usize) -> Complex64 {
        self.q[self.index(it, ix)]
    }

    pub fn u_at(&self, it: usize, ix: usize) -> Complex64 {
        self.u[self.index(it, ix)]
    }

    pub fn count(&self, flag: PointFlag) -> usize {
        self.flags.iter().filter(|f| **f == flag).count()
    }

    /// Checks axis monotonicity and matrix sizes.
    pub fn validate(&self) -> Result<()> {
        check_axis("xs", &self.xs)?;
        check_axis("ts", &self.ts)?;
        let n = self.xs.len() * self.ts.len();
        for (name, len) in [
            ("q", self.q.len()),
            ("u", self.u.len()),
            ("flags", self.flags.len()),
        ] {
            if len != n {
                return Err(Error::InvalidGrid(format!(
                    "{name} has {len} entries, expected {n}"
                )));
            }
        }
        Ok(())
    }
}

fn check_axis(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} is empty")));
    }
    if v.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} has a non-finite entry")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "{name} is not strictly increasing"
        )));
    }
    Ok(())
}

/// `n` equispaced points from `a` to `b` inclusive; the endpoints are exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * (i as f64) / ((n - 1) as f64)
                }
            })
            .collect(),
    }
}

/// SHA-256 (hex) of the canonical JSON form of a configuration.
pub fn config_digest(cfg: &SpectralConfig) -> String {
    let json = serde_json::to_vec(cfg).expect("configuration serializes");
    let digest = Sha256::digest(&json);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Evaluates `q` and `u` at every lattice point. Rows are distributed over
/// the current rayon pool; output order and values do not depend on the
/// number of workers. Per-point failures are recorded, not propagated.
pub fn evaluate_grid(sol: &Solution, xs: &[f64], ts: &[f64]) -> Result<FieldGrid> {
    check_axis("xs", xs)?;
    check_axis("ts", ts)?;
    let rows: Vec<Vec<(Complex64, Complex64, PointFlag)>> = ts
        .par_iter()
        .map(|&t| {
            xs.iter()
                .map(|&x| match sol.q_detailed(x, t) {
                    Ok(p) => {
                        let flag = if p.near_singular {
                            PointFlag::NearSingular
                        } else {
                            PointFlag::Ok
                        };
                        (p.q, sol.u_from_q(p.q), flag)
                    }
                    Err(e) => {
                        log::debug!("grid point ({x}, {t}) failed: {e}");
                        let nan = Complex64::new(f64::NAN, f64::NAN);
                        (nan, nan, PointFlag::Error)
                    }
                })
                .collect()
        })
        .collect();
    let n = xs.len() * ts.len();
    let mut q = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for (qv, uv, f) in rows.into_iter().flatten() {
        q.push(qv);
        u.push(uv);
        flags.push(f);
    }
    Ok(FieldGrid {
        xs: xs.to_vec(),
        ts: ts.to_vec(),
        q,
        u,
        flags,
        config_digest: config_digest(sol.config()),
    })
}

/// Complex vectors as `[[re, im], ...]` with NaN written as `null`.
mod nan_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    fn enc(v: f64) -> Option<f64> {
        v.is_finite().then_some(v)
    }

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|c| [enc(c.re), enc(c.im)])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw: Vec<[Option<f64>; 2]> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|[re, im]| Complex64::new(re.unwrap_or(f64::NAN), im.unwrap_or(f64::NAN)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{EigenEntry, PoleOrder, SignConvention};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-10.0, 10.0, 401);
        assert_eq!(v.len(), 401);
        assert_eq!(v[0], -10.0);
        assert_eq!(v[200], 0.0);
        assert_eq!(v[400], 10.0);
        assert_eq!(linspace(3.0, 4.0, 1), vec![3.0]);
    }

    #[test]
    fn background_grid() {
        let cfg = SpectralConfig::new(c(1.0, 0.0), 0.5, PoleOrder::Simple).with_gamma0(0.3);
        let s = Solution::new(cfg, SignConvention::A).unwrap();
        let g = evaluate_grid(&s, &[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]).unwrap();
        let expected = c(1.0, 0.0) * Complex64::from_polar(1.0, -0.3) / 0.5;
        assert!(g.u.iter().all(|u| (u - expected).norm() < 1e-15));
        assert_eq!(g.count(PointFlag::Ok), 9);
        g.validate().unwrap();
    }

    #[test]
    fn layout_is_t_major() {
        let cfg = SpectralConfig::new(c(1.0, 0.0), 0.5, PoleOrder::Simple)
            .with_eigenvalue(EigenEntry::new(c(0.0, 1.5), c(1.0, 0.0)));
        let s = Solution::new(cfg, SignConvention::A).unwrap();
        let xs = [-1.0, 0.0, 2.0];
        let ts = [-0.5, 0.25];
        let g = evaluate_grid(&s, &xs, &ts).unwrap();
        for (it, t) in ts.iter().enumerate() {
            for (ix, x) in xs.iter().enumerate() {
                assert_eq!(g.q_at(it, ix), s.q_detailed(*x, *t).unwrap().q);
            }
        }
    }

    #[test]
    fn rejects_bad_axes() {
        let cfg = SpectralConfig::new(c(1.0, 0.0), 0.5, PoleOrder::Simple);
        let s = Solution::new(cfg, SignConvention::A).unwrap();
        assert!(matches!(
            evaluate_grid(&s, &[1.0, 1.0], &[0.0]),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            evaluate_grid(&s, &[], &[0.0]),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn json_round_trip_keeps_nan() {
        let g = FieldGrid {
            xs: vec![0.0, 0.1],
            ts: vec![0.0],
            q: vec![c(0.1, -1e-300), c(f64::NAN, f64::NAN)],
            u: vec![c(1.0 / 3.0, 2.0), c(f64::NAN, f64::NAN)],
            flags: vec![PointFlag::Ok, PointFlag::Error],
            config_digest: "abc".into(),
        };
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("null"));
        let back: FieldGrid = serde_json::from_str(&s).unwrap();
        assert_eq!(back.q[0], g.q[0]);
        assert_eq!(back.u[0], g.u[0]);
        assert!(back.q[1].re.is_nan());
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = SpectralConfig::new(c(1.0, 0.0), 0.5, PoleOrder::Simple);
        let mut b = a.clone();
        assert_eq!(config_digest(&a), config_digest(&b));
        b.epsilon = 0.25;
        assert_ne!(config_digest(&a), config_digest(&b));
        assert_eq!(config_digest(&a).len(), 64);
    }
}
