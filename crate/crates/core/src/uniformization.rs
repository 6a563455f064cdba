//! Spectral-plane geometry in the uniformization variable `z`.
//!
//! The two-sheeted `k`-surface is replaced by the single `z`-plane through
//! `k(z) = (z - Q0^2/z)/2` and `lambda(z) = (z + Q0^2/z)/2`, so that
//! `lambda^2 = k^2 + Q0^2` holds identically. All formulas downstream are
//! evaluated on the `z`-plane only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the uniformization plane together with the background
/// amplitude `Q0 = |q_-|` that fixes the map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    z: Complex64,
    q0: f64,
}

impl SpectralPoint {
    pub fn new(z: Complex64, q0: f64) -> Result<Self> {
        if !(q0 > 0.0 && q0.is_finite()) {
            return Err(Error::InvalidBackground(q0));
        }
        Ok(Self { z, q0 })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    fn nonzero(&self) -> Result<Complex64> {
        if self.z == Complex64::new(0.0, 0.0) {
            Err(Error::ZeroSpectralPoint)
        } else {
            Ok(self.z)
        }
    }
}

/// Regions of the `z`-plane separated by the continuous spectrum
/// (the real axis and the circle `|z| = Q0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    DPlus,
    DMinus,
    Contour,
}

pub fn k_of_z(p: SpectralPoint) -> Result<Complex64> {
    let z = p.nonzero()?;
    Ok(k_raw(z, p.q0))
}

pub fn lambda_of_z(p: SpectralPoint) -> Result<Complex64> {
    let z = p.nonzero()?;
    Ok(lambda_raw(z, p.q0))
}

/// `theta(x, t, z) = lambda(z) (x - 2 k(z) t)`.
pub fn theta(x: f64, t: f64, p: SpectralPoint) -> Result<Complex64> {
    let z = p.nonzero()?;
    Ok(theta_raw(x, t, z, p.q0))
}

/// Analytic `z`-derivative of [`theta`] at fixed `(x, t)`.
pub fn theta_prime(x: f64, t: f64, p: SpectralPoint) -> Result<Complex64> {
    let z = p.nonzero()?;
    Ok(theta_prime_raw(x, t, z, p.q0))
}

/// Classifies by the sign of `(|z|^2 - Q0^2) Im z`, with no tolerance band.
pub fn region_of(p: SpectralPoint) -> Region {
    let product = (p.z.norm_sqr() - p.q0 * p.q0) * p.z.im;
    if product > 0.0 {
        Region::DPlus
    } else if product < 0.0 {
        Region::DMinus
    } else {
        Region::Contour
    }
}

// Unchecked kernels shared by the solvers; callers guarantee z != 0.

#[inline]
pub(crate) fn k_raw(z: Complex64, q0: f64) -> Complex64 {
    (z - q0 * q0 / z) * 0.5
}

#[inline]
pub(crate) fn lambda_raw(z: Complex64, q0: f64) -> Complex64 {
    (z + q0 * q0 / z) * 0.5
}

#[inline]
pub(crate) fn theta_raw(x: f64, t: f64, z: Complex64, q0: f64) -> Complex64 {
    lambda_raw(z, q0) * (x - 2.0 * t * k_raw(z, q0))
}

#[inline]
pub(crate) fn theta_prime_raw(x: f64, t: f64, z: Complex64, q0: f64) -> Complex64 {
    let r = q0 * q0 / (z * z);
    let dlambda = (1.0 - r) * 0.5;
    let dk = (1.0 + r) * 0.5;
    dlambda * (x - 2.0 * t * k_raw(z, q0)) - 2.0 * t * lambda_raw(z, q0) * dk
}
