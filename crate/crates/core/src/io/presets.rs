//! Bundled figure configurations.

use crate::error::{Error, Result};

use super::config::{parse_config_str, RunConfig};

pub const PRESETS: &[(&str, &str)] = &[
    ("fig2a", include_str!("../../../../presets/fig2a.json")),
    ("fig2b", include_str!("../../../../presets/fig2b.json")),
    ("fig2c", include_str!("../../../../presets/fig2c.json")),
    ("fig2d", include_str!("../../../../presets/fig2d.json")),
    ("fig3a", include_str!("../../../../presets/fig3a.json")),
    ("fig3b", include_str!("../../../../presets/fig3b.json")),
    ("fig3c", include_str!("../../../../presets/fig3c.json")),
    ("fig4a", include_str!("../../../../presets/fig4a.json")),
    ("fig4b", include_str!("../../../../presets/fig4b.json")),
    ("fig4c", include_str!("../../../../presets/fig4c.json")),
    ("fig4d", include_str!("../../../../presets/fig4d.json")),
    ("fig5a", include_str!("../../../../presets/fig5a.json")),
    ("fig5b", include_str!("../../../../presets/fig5b.json")),
    ("fig5c", include_str!("../../../../presets/fig5c.json")),
    ("fig6a", include_str!("../../../../presets/fig6a.json")),
    ("fig6b", include_str!("../../../../presets/fig6b.json")),
    ("fig6c", include_str!("../../../../presets/fig6c.json")),
    ("fig6d", include_str!("../../../../presets/fig6d.json")),
    ("fig7a", include_str!("../../../../presets/fig7a.json")),
    ("fig7b", include_str!("../../../../presets/fig7b.json")),
    ("fig7c", include_str!("../../../../presets/fig7c.json")),
    ("fig7d", include_str!("../../../../presets/fig7d.json")),
    ("fig8a", include_str!("../../../../presets/fig8a.json")),
    ("fig8b", include_str!("../../../../presets/fig8b.json")),
    ("fig8c", include_str!("../../../../presets/fig8c.json")),
    ("fig8d", include_str!("../../../../presets/fig8d.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_json(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, j)| *j)
}

/// Parsed but not validated; some presets are deliberately invalid.
pub fn preset(name: &str) -> Result<RunConfig> {
    let text = preset_json(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    parse_config_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::PoleOrder;
    use num_complex::Complex64;

    #[test]
    fn every_preset_parses_and_is_named_after_its_file() {
        assert!(PRESETS.len() >= 14);
        for name in names() {
            assert_eq!(preset(name).unwrap().name, name);
        }
    }

    #[test]
    fn fig2a_and_fig7a_parameters() {
        let a = preset("fig2a").unwrap();
        assert_eq!(a.pole_order, PoleOrder::Simple);
        assert_eq!(a.q_minus, Complex64::new(1.0, 0.0));
        assert_eq!(a.epsilon, 0.5);
        assert_eq!(a.eigenvalues.len(), 1);
        assert_eq!(a.eigenvalues[0].z, Complex64::new(0.0, 1.5));
        assert_eq!(a.eigenvalues[0].a_plus, Complex64::new(1.0, 0.0));
        assert_eq!((a.grid.nx, a.grid.nt), (401, 201));

        let d = preset("fig7a").unwrap();
        assert_eq!(d.pole_order, PoleOrder::Double);
        assert_eq!(d.eigenvalues[0].z, Complex64::new(0.0, 1.5));
        assert_eq!(d.eigenvalues[0].b_plus, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn only_the_coincident_preset_is_invalid() {
        for name in names() {
            let r = preset(name).unwrap().validate();
            if name == "fig5c" {
                let msg = r.unwrap_err().to_string();
                assert!(msg.contains("Double mode"), "{msg}");
            } else {
                r.unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("fig9z"), Err(Error::UnknownPreset(_))));
    }
}
