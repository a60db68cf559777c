//! Run configuration: TOML sections, dotted-key overrides and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charts::ChartKind;
use crate::diff::StepPolicy;
use crate::error::{GeomError, Result};
use crate::warped::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub general: General,
    pub step: StepPolicy,
    pub tolerance: Tolerances,
    pub geodesic: GeodesicConfig,
    pub grid: GridSpec,
    pub beltrami: BeltramiConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct General {
    pub radius: f64,
    pub seed: u64,
    /// Random interior points per sampled check.
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub first_derivative: f64,
    pub second_derivative: f64,
    pub integrator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    pub chart: String,
    pub tau_end: f64,
    pub dt: f64,
    /// Random geodesics in the conservation batch.
    pub count: usize,
    /// Relative domain margin of the integration chart.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeltramiConfig {
    pub points: usize,
    /// Lower bound on `1 + sigma^2/R^2` for sampled projective points.
    pub min_conformal: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            general: General::default(),
            step: StepPolicy::default(),
            tolerance: Tolerances::default(),
            geodesic: GeodesicConfig::default(),
            grid: GridSpec::linear(0.1, 5.0, 50),
            beltrami: BeltramiConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl Default for General {
    fn default() -> Self {
        General {
            radius: 1.0,
            seed: 20240601,
            samples: 100,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            first_derivative: 1e-6,
            second_derivative: 1e-4,
            integrator: 1e-8,
        }
    }
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            chart: ChartKind::Static47Corrected.name().to_string(),
            tau_end: 10.0,
            dt: 1e-3,
            count: 20,
            margin: 0.1,
            position: None,
            velocity: None,
            csv: None,
        }
    }
}

impl Default for BeltramiConfig {
    fn default() -> Self {
        BeltramiConfig {
            points: 1000,
            min_conformal: 0.1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> GeomError {
    GeomError::ConfigInvalid(msg.into())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Sets `section.key` to `value`, parsed as a TOML value (bare words are
    /// taken as strings).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (section, field) = key
            .split_once('.')
            .ok_or_else(|| invalid(format!("override key `{key}` must be `section.key`")))?;
        let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        let mut tree = toml::Table::try_from(&*self).map_err(|e| invalid(e.to_string()))?;
        let table = tree
            .get_mut(section)
            .and_then(|v| v.as_table_mut())
            .ok_or_else(|| invalid(format!("unknown section `{section}`")))?;
        table.insert(field.to_string(), parsed);
        *self = toml::Value::Table(tree)
            .try_into()
            .map_err(|e: toml::de::Error| invalid(format!("{key}: {e}")))?;
        Ok(())
    }

    /// Parses `section.key=value`.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| invalid(format!("override `{assignment}` must be `key=value`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn policy(&self) -> StepPolicy {
        self.step
    }

    pub fn radius(&self) -> f64 {
        self.general.radius
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.general.radius;
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("general.radius must be positive, got {r}")));
        }
        let h = self.step.base;
        if !(h > 1e-9 && h < 1e-2) {
            return Err(invalid(format!("step.base must lie in (1e-9, 1e-2), got {h}")));
        }
        if self.general.samples == 0 {
            return Err(invalid("general.samples must be at least 1"));
        }
        let t = &self.tolerance;
        for (name, v) in [
            ("first_derivative", t.first_derivative),
            ("second_derivative", t.second_derivative),
            ("integrator", t.integrator),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("tolerance.{name} must be positive, got {v}")));
            }
        }
        let g = &self.geodesic;
        ChartKind::from_name(&g.chart).map_err(|e| invalid(e.to_string()))?;
        if !(g.dt > 0.0 && g.dt.is_finite() && g.tau_end >= 0.0 && g.tau_end.is_finite()) {
            return Err(invalid(format!(
                "geodesic needs dt > 0 and tau_end >= 0 (dt={}, tau_end={})",
                g.dt, g.tau_end
            )));
        }
        if !(g.margin > 0.0 && g.margin < 0.5) {
            return Err(invalid(format!("geodesic.margin must lie in (0, 0.5), got {}", g.margin)));
        }
        if g.count == 0 {
            return Err(invalid("geodesic.count must be at least 1"));
        }
        if g.position.is_some() != g.velocity.is_some() {
            return Err(invalid("geodesic.position and geodesic.velocity go together"));
        }
        self.grid.validate()?;
        if self.beltrami.points == 0 || !(self.beltrami.min_conformal > 0.0) {
            return Err(invalid("beltrami needs points >= 1 and min_conformal > 0"));
        }
        Ok(())
    }
}
