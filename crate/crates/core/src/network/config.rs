use serde::{Deserialize, Serialize};

use super::{bs_mode_unitary, theta_from_table, theta_to_table, BeamSplitterSpec, PhysicalParams};
use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compensation {
    #[default]
    None,
    /// Phases already include the ac Stark correction.
    Analytic,
}

/// Beam splitters in application order (first listed acts first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub n_modes: usize,
    pub beamsplitters: Vec<BeamSplitterSpec>,
    pub compensation: Compensation,
}

impl InterferometerConfig {
    pub fn new(n_modes: usize, beamsplitters: Vec<BeamSplitterSpec>) -> Self {
        Self {
            n_modes,
            beamsplitters,
            compensation: Compensation::None,
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::new(n_modes, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::invalid("n_modes", "must be at least 1"));
        }
        for bs in &self.beamsplitters {
            bs.validate()?;
            for idx in [bs.mode_m, bs.mode_n] {
                if idx >= self.n_modes {
                    return Err(Error::ModeOutOfRange {
                        index: idx,
                        n_modes: self.n_modes,
                    });
                }
            }
        }
        Ok(())
    }

    /// Reversed order with negated angles; composes with `self` to the identity.
    pub fn inverse(&self) -> Self {
        let mut bs: Vec<BeamSplitterSpec> = self.beamsplitters.iter().rev().cloned().collect();
        for b in &mut bs {
            b.theta = -b.theta;
        }
        Self {
            n_modes: self.n_modes,
            beamsplitters: bs,
            compensation: self.compensation,
        }
    }
}

/// Forward mode propagator `B_K ... B_2 B_1`.
pub fn compose_interferometer(config: &InterferometerConfig) -> Result<CMat> {
    config.validate()?;
    let mut u = CMat::identity(config.n_modes, config.n_modes);
    for bs in &config.beamsplitters {
        u = bs_mode_unitary(bs, config.n_modes)? * u;
    }
    Ok(u)
}

/// One beam splitter as written in a configuration file. Modes and ions are 1-based;
/// `theta_pi_units` uses the tabulated notation (0.5 is 50:50).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSplitterEntry {
    pub m: usize,
    pub n: usize,
    pub ion: usize,
    pub theta_pi_units: f64,
    pub phi_pi_units: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_sign: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_m_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_n_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_modes: usize,
    pub beamsplitters: Vec<BeamSplitterEntry>,
    #[serde(default)]
    pub compensation: Compensation,
}

const DEFAULT_RAMP: f64 = 0.1;

fn one_based(field: &str, index: usize, v: usize) -> Result<usize> {
    v.checked_sub(1).ok_or_else(|| {
        Error::invalid(format!("beamsplitters[{index}].{field}"), "indices are 1-based")
    })
}

impl BeamSplitterEntry {
    fn to_spec(&self, index: usize) -> Result<BeamSplitterSpec> {
        let mut spec = BeamSplitterSpec::new(
            one_based("m", index, self.m)?,
            one_based("n", index, self.n)?,
            one_based("ion", index, self.ion)?,
            theta_from_table(self.theta_pi_units),
            self.phi_pi_units * std::f64::consts::PI,
        );
        if let Some(s) = self.spin_sign {
            spec.spin_sign = s;
        }
        let fields = [self.delta_hz, self.coupling_m_hz, self.coupling_n_hz, self.duration_s];
        if fields.iter().any(Option::is_some) {
            let names = ["delta_hz", "coupling_m_hz", "coupling_n_hz", "duration_s"];
            if let Some(k) = fields.iter().position(Option::is_none) {
                return Err(Error::invalid(
                    format!("beamsplitters[{index}].{}", names[k]),
                    "physical parameters must be given together",
                ));
            }
            spec.physical = Some(PhysicalParams {
                delta_hz: self.delta_hz.unwrap(),
                coupling_m_hz: self.coupling_m_hz.unwrap(),
                coupling_n_hz: self.coupling_n_hz.unwrap(),
                duration_s: self.duration_s.unwrap(),
                ramp_fraction: self.ramp_fraction.unwrap_or(DEFAULT_RAMP),
            });
        }
        spec.validate().map_err(|e| match e {
            Error::InvalidParameter { field, reason } => Error::InvalidParameter {
                field: format!("beamsplitters[{index}].{field}"),
                reason,
            },
            other => other,
        })?;
        Ok(spec)
    }

    fn from_spec(spec: &BeamSplitterSpec) -> Self {
        let p = spec.physical;
        Self {
            m: spec.mode_m + 1,
            n: spec.mode_n + 1,
            ion: spec.ion + 1,
            theta_pi_units: theta_to_table(spec.theta),
            phi_pi_units: spec.phi / std::f64::consts::PI,
            spin_sign: (spec.spin_sign != 1.0).then_some(spec.spin_sign),
            delta_hz: p.map(|p| p.delta_hz),
            coupling_m_hz: p.map(|p| p.coupling_m_hz),
            coupling_n_hz: p.map(|p| p.coupling_n_hz),
            duration_s: p.map(|p| p.duration_s),
            ramp_fraction: p.map(|p| p.ramp_fraction),
        }
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("configuration: {e}")))
    }

    pub fn to_config(&self) -> Result<InterferometerConfig> {
        let bs = self
            .beamsplitters
            .iter()
            .enumerate()
            .map(|(i, e)| e.to_spec(i))
            .collect::<Result<Vec<_>>>()?;
        let config = InterferometerConfig {
            n_modes: self.n_modes,
            beamsplitters: bs,
            compensation: self.compensation,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_config(config: &InterferometerConfig) -> Self {
        Self {
            n_modes: config.n_modes,
            beamsplitters: config.beamsplitters.iter().map(BeamSplitterEntry::from_spec).collect(),
            compensation: config.compensation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_residual};

    #[test]
    fn empty_config_is_identity() {
        let u = compose_interferometer(&InterferometerConfig::identity(4)).unwrap();
        assert_eq!(u, CMat::identity(4, 4));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let cfg = super::super::presets::table_iv();
        let u = compose_interferometer(&cfg).unwrap();
        let v = compose_interferometer(&cfg.inverse()).unwrap();
        assert!(unitarity_residual(&u) < 1e-14);
        assert!(max_abs_diff(&(v * u), &CMat::identity(4, 4)) < 1e-14);
    }

    #[test]
    fn out_of_range_mode() {
        let cfg = InterferometerConfig::new(2, vec![BeamSplitterSpec::new(0, 2, 0, 0.1, 0.0)]);
        assert_eq!(
            compose_interferometer(&cfg),
            Err(Error::ModeOutOfRange { index: 2, n_modes: 2 })
        );
    }

    #[test]
    fn file_round_trip() {
        let text = r#"{
            "n_modes": 4,
            "beamsplitters": [
                {"m": 1, "n": 3, "ion": 3, "theta_pi_units": 0.696, "phi_pi_units": 0.0,
                 "delta_hz": -10000, "coupling_m_hz": 6300, "coupling_n_hz": 4400,
                 "duration_s": 2.866e-4, "ramp_fraction": 0.1},
                {"m": 2, "n": 4, "ion": 4, "theta_pi_units": 0.304, "phi_pi_units": 0.0}
            ],
            "compensation": "analytic"
        }"#;
        let cfg = ConfigFile::from_json(text).unwrap().to_config().unwrap();
        assert_eq!(cfg.beamsplitters[0].mode_n, 2);
        assert!((cfg.beamsplitters[1].theta - 0.152 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(cfg.compensation, Compensation::Analytic);
        let back = ConfigFile::from_config(&cfg).to_config().unwrap();
        assert_eq!(back.beamsplitters.len(), 2);
        assert!((back.beamsplitters[1].theta - cfg.beamsplitters[1].theta).abs() < 1e-15);
    }

    #[test]
    fn partial_physical_parameters_name_the_field() {
        let text = r#"{"n_modes": 2, "beamsplitters": [
            {"m": 1, "n": 2, "ion": 1, "theta_pi_units": 0.5, "phi_pi_units": 0, "delta_hz": 1e4}]}"#;
        let err = ConfigFile::from_json(text).unwrap().to_config().unwrap_err();
        assert!(err.to_string().contains("beamsplitters[0].coupling_m_hz"), "{err}");
    }

    #[test]
    fn zero_index_rejected() {
        let text = r#"{"n_modes": 2, "beamsplitters": [
            {"m": 0, "n": 2, "ion": 1, "theta_pi_units": 0.5, "phi_pi_units": 0}]}"#;
        assert!(ConfigFile::from_json(text).unwrap().to_config().is_err());
    }
}
