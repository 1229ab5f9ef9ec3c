//! JSON model configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cev::RegimeParams;
use super::discount::DiscountCurve;
use crate::error::{Result, VolspecError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub spot: f64,
    pub top: f64,
    pub bottom: f64,
    #[serde(default = "default_stretch")]
    pub stretch: f64,
}

fn default_stretch() -> f64 {
    super::grid::SINH_STRETCH
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 76,
            spot: 100.0,
            top: 10_000.0,
            bottom: 1.0,
            stretch: default_stretch(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub grid: GridConfig,
    /// Level at which `sigma` is the local volatility; defaults to the spot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cev_reference: Option<f64>,
    pub regimes: Vec<RegimeParams<f64>>,
    pub switch_generators: Vec<Vec<Vec<f64>>>,
    /// `(t, f(t))` knots; identity when empty.
    #[serde(default)]
    pub time_change: Vec<(f64, f64)>,
    #[serde(default)]
    pub discount: DiscountCurve,
    #[serde(default = "default_start_regime")]
    pub start_regime: usize,
}

fn default_start_regime() -> usize {
    1
}

const BUNDLED: &[(&str, &str)] = &[
    ("table1_calibrated", include_str!("../../configs/table1_calibrated.json")),
    ("table1_nojump", include_str!("../../configs/table1_nojump.json")),
    ("nojump_simple", include_str!("../../configs/nojump_simple.json")),
    ("table1_timechanged", include_str!("../../configs/table1_timechanged.json")),
];

impl Default for ModelConfig {
    fn default() -> Self {
        Self::bundled("table1_calibrated").expect("bundled config parses")
    }
}

impl ModelConfig {
    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(name, _)| *name)
    }

    /// One of the configs shipped with the crate, by file stem.
    pub fn bundled(name: &str) -> Result<Self> {
        let stem = name.strip_suffix(".json").unwrap_or(name);
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == stem)
            .ok_or_else(|| VolspecError::Config(format!("no bundled model named {name:?}")))?;
        Self::from_json(text)
    }

    pub fn bundled_text(name: &str) -> Option<&'static str> {
        let stem = name.strip_suffix(".json").unwrap_or(name);
        BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, t)| *t)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| VolspecError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn n_regimes(&self) -> usize {
        self.regimes.len()
    }

    pub fn cev_reference(&self) -> f64 {
        self.cev_reference.unwrap_or(self.grid.spot)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.regimes.len();
        if m == 0 {
            return Err(VolspecError::Config("at least one regime is required".into()));
        }
        for (i, r) in self.regimes.iter().enumerate() {
            r.validate()
                .map_err(|e| VolspecError::Config(format!("regimes[{i}]: {e}")))?;
        }
        if self.switch_generators.len() != m {
            return Err(VolspecError::Config(format!(
                "switch_generators has {} entries for {m} regimes",
                self.switch_generators.len()
            )));
        }
        if self.start_regime >= m {
            return Err(VolspecError::Config(format!(
                "start_regime {} out of range for {m} regimes",
                self.start_regime
            )));
        }
        if self.regimes.windows(2).any(|w| !(w[1].level > w[0].level)) {
            return Err(VolspecError::Config(
                "regime levels must be strictly increasing".into(),
            ));
        }
        if let Some(r) = self.cev_reference {
            if !(r > 0.0) {
                return Err(VolspecError::Config(format!("cev_reference {r} must be > 0")));
            }
        }
        Ok(())
    }
}
