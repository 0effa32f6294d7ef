use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{make_grid, GridError, GridSpec, Potential, PotentialKind};

fn default_d() -> usize {
    1
}

/// File form of a grid plus potential. Keys: `d`, `M`, `L`, `hbar`, `N`, `potential`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub hbar: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "zero_potential")]
    pub potential: PotentialKind,
}

fn zero_potential() -> PotentialKind {
    PotentialKind::Zero
}

impl GridConfig {
    /// Reads TOML or JSON, chosen by extension (`.json` is JSON, anything else TOML).
    pub fn load(path: &Path) -> Result<Self, GridError> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, GridError> {
        toml::from_str(text).map_err(|e| GridError::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        serde_json::from_str(text).map_err(|e| GridError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, GridError> {
        toml::to_string(self).map_err(|e| GridError::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<(GridSpec, Potential), GridError> {
        let g = make_grid(self.d, self.m, self.l, self.hbar, self.n)?;
        let v = Potential::new(&g, self.potential.clone())?;
        Ok((g, v))
    }
}
