//! A validated configuration paired with its orbit, dispatching point
//! evaluation to the simple- or double-pole solver.

use num_complex::Complex64;

use crate::double_pole;
use crate::error::{Error, Result};
use crate::scaling::PointValue;
use crate::simple_pole;
use crate::spectrum::{derive_orbit, OrbitTable, PoleOrder, SignConvention, SpectralConfig};

/// Anything that can be sampled as a scattering field `q(x, t)` solving
/// `i q_t + q_xx + 2 (|q|^2 - Q0^2) q = 0`.
pub trait FieldEvaluator: Sync {
    fn q(&self, x: f64, t: f64) -> Result<Complex64>;

    fn q0(&self) -> f64;
}

#[derive(Debug, Clone)]
pub struct Solution {
    config: SpectralConfig,
    orbit: OrbitTable,
}

impl Solution {
    pub fn new(config: SpectralConfig, convention: SignConvention) -> Result<Self> {
        let orbit = derive_orbit(&config, convention)?;
        Ok(Self { config, orbit })
    }

    /// Pairs a configuration with an externally supplied (possibly altered)
    /// orbit table. Used for fault injection.
    pub fn from_parts(config: SpectralConfig, orbit: OrbitTable) -> Result<Self> {
        if config.pole_order != orbit.order {
            return Err(Error::PoleOrderMismatch {
                expected: config.pole_order.as_str(),
            });
        }
        Ok(Self { config, orbit })
    }

    pub fn config(&self) -> &SpectralConfig {
        &self.config
    }

    pub fn orbit(&self) -> &OrbitTable {
        &self.orbit
    }

    pub fn convention(&self) -> SignConvention {
        self.orbit.convention
    }

    pub fn q_minus(&self) -> Complex64 {
        self.orbit.q_minus
    }

    pub fn q_plus(&self) -> Complex64 {
        self.orbit.q_plus
    }

    pub fn q_detailed(&self, x: f64, t: f64) -> Result<PointValue> {
        match self.orbit.order {
            PoleOrder::Simple => simple_pole::evaluate_q_detailed(&self.orbit, x, t),
            PoleOrder::Double => double_pole::evaluate_q_detailed(&self.orbit, x, t),
        }
    }

    pub fn q_determinant(&self, x: f64, t: f64) -> Result<Complex64> {
        match self.orbit.order {
            PoleOrder::Simple => simple_pole::evaluate_q_determinant(&self.orbit, x, t),
            PoleOrder::Double => double_pole::evaluate_q_determinant(&self.orbit, x, t),
        }
    }

    /// `u = q e^{-i gamma0} / epsilon`.
    pub fn u_from_q(&self, q: Complex64) -> Complex64 {
        q * Complex64::from_polar(1.0, -self.config.gamma0) / self.config.epsilon
    }

    pub fn u(&self, x: f64, t: f64) -> Result<Complex64> {
        self.q(x, t).map(|q| self.u_from_q(q))
    }
}

impl FieldEvaluator for Solution {
    fn q(&self, x: f64, t: f64) -> Result<Complex64> {
        self.q_detailed(x, t).map(|p| p.q)
    }

    fn q0(&self) -> f64 {
        self.orbit.q0
    }
}
