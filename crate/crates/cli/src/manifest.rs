use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Record of one invocation: enough to re-run it and compare outputs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub input_digests: BTreeMap<String, String>,
    pub result_digests: BTreeMap<String, String>,
    pub wall_time_secs: f64,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("lp".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Self { command_line, versions, ..Self::default() }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.input_digests.insert(path.display().to_string(), digest(&bytes));
        Ok(())
    }

    pub fn add_result(&mut self, name: &str, bytes: &[u8]) {
        self.result_digests.insert(name.to_string(), digest(bytes));
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_time_secs = elapsed.as_secs_f64();
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(digest(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
