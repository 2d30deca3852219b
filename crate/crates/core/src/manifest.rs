use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Everything needed to regenerate the outputs of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub sigma: u32,
    pub model: String,
    pub params: serde_json::Value,
    pub n_replicas: u64,
    pub version: String,
}

impl Manifest {
    pub fn new(
        seed: u64,
        sigma: u32,
        model: impl Into<String>,
        params: serde_json::Value,
        n_replicas: u64,
    ) -> Manifest {
        Manifest {
            seed,
            sigma,
            model: model.into(),
            params,
            n_replicas,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Manifest> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
