//! The versioned JSON run configuration.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::spectrum::{self, EigenEntry, PoleOrder, SignConvention, SpectralConfig};
use crate::verification::{tolerances, ConventionChoice, EvolutionSetup, VerificationPlan, Window};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionSetting {
    A,
    B,
    #[default]
    Auto,
}

impl ConventionSetting {
    pub fn choice(self) -> ConventionChoice {
        match self {
            ConventionSetting::A => ConventionChoice::Fixed(SignConvention::A),
            ConventionSetting::B => ConventionChoice::Fixed(SignConvention::B),
            ConventionSetting::Auto => ConventionChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.nt)
    }

    pub fn window(&self) -> Window {
        Window {
            x_min: self.x_min,
            x_max: self.x_max,
            t_min: self.t_min,
            t_max: self.t_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (axis, lo, hi, n) in [
            ("x", self.x_min, self.x_max, self.nx),
            ("t", self.t_min, self.t_max, self.nt),
        ] {
            if n == 0 {
                return Err(Error::InvalidGrid(format!("n{axis} must be at least 1")));
            }
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidGrid(format!("{axis} range must be finite")));
            }
            if n > 1 && hi <= lo {
                return Err(Error::InvalidGrid(format!(
                    "{axis}_max must exceed {axis}_min"
                )));
            }
        }
        Ok(())
    }
}

fn yes() -> bool {
    true
}

fn default_points() -> usize {
    tolerances::DEFAULT_RESIDUAL_POINTS
}

fn default_h() -> f64 {
    tolerances::DEFAULT_H
}

fn default_l() -> f64 {
    tolerances::DEFAULT_BOUNDARY_L
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationToggles {
    #[serde(default = "yes")]
    pub residual: bool,
    #[serde(default = "default_points")]
    pub residual_points: usize,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "yes")]
    pub forms: bool,
    #[serde(default = "yes")]
    pub boundary: bool,
    #[serde(default = "default_l")]
    pub boundary_l: f64,
    #[serde(default = "yes")]
    pub theta: bool,
    #[serde(default = "yes")]
    pub symmetries: bool,
    #[serde(default)]
    pub evolution: Option<EvolutionSetup>,
}

impl Default for VerificationToggles {
    fn default() -> Self {
        Self {
            residual: true,
            residual_points: default_points(),
            h: default_h(),
            forms: true,
            boundary: true,
            boundary_l: default_l(),
            theta: true,
            symmetries: true,
            evolution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub name: String,
    /// Set when the source parameters are ambiguous; failed checks are then
    /// reported as warnings.
    #[serde(default)]
    pub uncertain: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub q_minus: Complex64,
    pub epsilon: f64,
    #[serde(default)]
    pub gamma0: f64,
    pub pole_order: PoleOrder,
    pub eigenvalues: Vec<EigenEntry>,
    #[serde(default)]
    pub allow_circle: bool,
    #[serde(default)]
    pub sign_convention: ConventionSetting,
    pub grid: GridSpec,
    #[serde(default)]
    pub verification: VerificationToggles,
}

impl RunConfig {
    pub fn spectral(&self) -> SpectralConfig {
        SpectralConfig {
            q_minus: self.q_minus,
            epsilon: self.epsilon,
            gamma0: self.gamma0,
            pole_order: self.pole_order,
            eigenvalues: self.eigenvalues.clone(),
            allow_circle: self.allow_circle,
        }
    }

    pub fn plan(&self) -> VerificationPlan {
        let v = &self.verification;
        VerificationPlan {
            window: self.grid.window(),
            residual: v.residual,
            residual_points: v.residual_points,
            h: v.h,
            forms: v.forms,
            boundary: v.boundary,
            boundary_l: v.boundary_l,
            theta: v.theta,
            symmetries: v.symmetries,
            evolution: v.evolution,
        }
    }

    /// Schema, grid and spectral checks.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::UnsupportedSchema(self.schema));
        }
        self.grid.validate()?;
        if let Some(e) = &self.verification.evolution {
            e.validate()?;
        }
        spectrum::check(&self.spectral())
    }
}

/// Parses without physical validation.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg = parse_config_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn to_json_pretty(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("configuration serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": 1,
        "name": "bg",
        "q_minus": [1, 0],
        "epsilon": 1,
        "pole_order": "simple",
        "eigenvalues": [],
        "grid": {"x_min": 0, "x_max": 0, "nx": 1, "t_min": 0, "t_max": 0, "nt": 1}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.verification, VerificationToggles::default());
        assert_eq!(cfg.sign_convention, ConventionSetting::Auto);
        assert_eq!(cfg.spectral().q_minus, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config_str("{\n  \"schema\": 1,\n  oops\n}").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"name\"", "\"colour\": 1, \"name\"");
        assert!(matches!(parse_config_str(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn schema_and_spectral_validation() {
        let mut cfg = parse_config_str(MINIMAL).unwrap();
        cfg.schema = 2;
        assert!(matches!(cfg.validate(), Err(Error::UnsupportedSchema(2))));
        cfg.schema = 1;
        cfg.epsilon = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(parse_config_str(&to_json_pretty(&cfg)).unwrap(), cfg);
    }
}
