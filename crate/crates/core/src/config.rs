//! TOML scenario files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ModelError;
use crate::params::{Household, InitialState, LqUtility, Model, Technology};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(#[from] ModelError),
    #[error("invalid scenario section: {0}")]
    Scenario(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LockdownMode {
    #[default]
    Unanticipated,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LockdownSection {
    #[serde(default)]
    pub mode: LockdownMode,
    #[serde(default)]
    pub durations: Vec<f64>,
    #[serde(default)]
    pub no_habits_baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaborShiftSection {
    pub xi_new: Option<f64>,
    #[serde(default)]
    pub a_realloc_permanent: bool,
    /// Margin on the strong-satiation inequality.
    #[serde(default)]
    pub satiation_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnticipatedSection {
    #[serde(default)]
    pub horizons: Vec<f64>,
    #[serde(default)]
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub utility: LqUtility,
    pub technology: Technology,
    pub household: Household,
    pub initial: InitialState,
    #[serde(default)]
    pub lockdown: LockdownSection,
    pub labor_shift: Option<LaborShiftSection>,
    pub anticipated: Option<AnticipatedSection>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ConfigFile = toml::from_str(text)?;
        cfg.model().validate()?;
        cfg.check_scenarios()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn model(&self) -> Model {
        Model {
            utility: self.utility,
            technology: self.technology,
            household: self.household,
            initial: self.initial,
        }
    }

    /// Share of labor in sector 1 after a permanent shift, if one is configured.
    pub fn shift_target(&self) -> Option<f64> {
        let ls = self.labor_shift.as_ref()?;
        if ls.a_realloc_permanent {
            Some(self.technology.reallocated_share())
        } else {
            ls.xi_new
        }
    }

    fn check_scenarios(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, xs: &[f64]| {
            if xs.iter().all(|x| *x > 0.0 && x.is_finite()) {
                Ok(())
            } else {
                Err(ConfigError::Scenario(format!("{name} must be positive")))
            }
        };
        positive("lockdown.durations", &self.lockdown.durations)?;
        if let Some(a) = &self.anticipated {
            positive("anticipated.horizons", &a.horizons)?;
            positive("anticipated.deltas", &a.deltas)?;
        }
        if let Some(ls) = &self.labor_shift {
            match (ls.xi_new, ls.a_realloc_permanent) {
                (Some(_), true) => {
                    return Err(ConfigError::Scenario(
                        "labor_shift: give either xi_new or a_realloc_permanent".into(),
                    ))
                }
                (None, false) => {
                    return Err(ConfigError::Scenario(
                        "labor_shift: xi_new or a_realloc_permanent = true is required".into(),
                    ))
                }
                (Some(x), false) if !(x > 0.0 && x < 1.0) => {
                    return Err(ConfigError::Scenario("labor_shift.xi_new must lie in (0, 1)".into()))
                }
                _ => {}
            }
            if self.lockdown.durations.is_empty() {
                return Err(ConfigError::Scenario(
                    "labor_shift needs at least one lockdown duration".into(),
                ));
            }
        }
        Ok(())
    }
}
