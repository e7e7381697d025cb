use std::path::Path;

use qad_core::eval::ReplanConfig;
use qad_core::sim::{SimConfig, SuiteSpec};
use qad_core::{Error, Result};
use serde::Deserialize;

/// Contents of `--config`. Every section is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub sim: SimConfig,
    pub suite: SuiteSpec,
    pub replan: ReplanConfig,
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)?;
        let c: Self = serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        c.sim.validate()?;
        c.replan.validate()?;
        Ok(c)
    }
}
