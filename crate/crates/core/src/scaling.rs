//! Shared numerics for the reconstruction systems: row equilibration,
//! conditioned solves and the bordered-determinant ratio.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseComplexMatrix;

/// Condition estimates above this flag a point as near-singular.
pub const NEAR_SINGULAR_COND: f64 = 1e8;

/// A reconstructed field value with its conditioning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointValue {
    pub q: Complex64,
    /// 1-norm condition estimate of the equilibrated system.
    pub cond: f64,
    pub near_singular: bool,
}

impl PointValue {
    pub fn new(q: Complex64, cond: f64) -> Self {
        Self {
            q,
            cond,
            near_singular: !(cond <= NEAR_SINGULAR_COND),
        }
    }

    pub fn exact(q: Complex64) -> Self {
        Self::new(q, 1.0)
    }
}

/// Scales every row of `g` (and the matching entries of each vector) to unit
/// max-modulus.
pub(crate) fn equilibrate_rows(g: &mut DenseComplexMatrix, vecs: &mut [&mut Vec<Complex64>]) {
    for i in 0..g.rows() {
        let m = g.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if m > 0.0 && m.is_finite() {
            let inv = 1.0 / m;
            for j in 0..g.cols() {
                g[(i, j)] *= inv;
            }
            for v in vecs.iter_mut() {
                v[i] *= inv;
            }
        }
    }
}

pub(crate) fn solve_with_cond(
    g: &DenseComplexMatrix,
    rhs: &[Complex64],
) -> Result<(Vec<Complex64>, f64)> {
    let lu = g.lu()?;
    let y = lu.solve(rhs)?;
    let cond = lu.cond_estimate()?;
    Ok((y, cond))
}

/// `det([[G, v], [w^T, 0]]) / det G`.
pub(crate) fn bordered_ratio(
    g: &DenseComplexMatrix,
    v: &[Complex64],
    w: &[Complex64],
) -> Result<Complex64> {
    let n = g.rows();
    let mut b = DenseComplexMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] = g[(i, j)];
        }
        b[(i, n)] = v[i];
        b[(n, i)] = w[i];
    }
    let lu = g.lu()?;
    if lu.is_singular() {
        return Err(Error::SingularMatrix { column: n });
    }
    Ok(b.lu()?.det() / lu.det())
}

/// Attaches the evaluation point to a singular-system error.
pub(crate) fn at(e: Error, x: f64, t: f64) -> Error {
    match e {
        Error::SingularMatrix { .. } => Error::SingularAt { x, t },
        other => other,
    }
}
