//! Run manifests: enough provenance (config hash, seeds, version, outputs)
//! to reproduce any output directory from its inputs alone.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// subcommand that produced the outputs
    pub command: String,
    pub version: String,
    /// SHA-256 of the resolved configuration (after CLI overrides)
    pub config_hash: String,
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config_bytes: &[u8]) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: sha256_hex(config_bytes),
            master_seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.toml");
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("manifest serialization: {e}")))?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn read(dir: &Path) -> Result<RunManifest> {
        let path = dir.join("manifest.toml");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_string(&hasher.finalize())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrips_through_toml() {
        let mut m = RunManifest::new("sweep", b"config body");
        m.master_seed = Some(42);
        m.outputs.push("results.csv".into());
        m.warnings.push("plot runtime.svg omitted: no data".into());
        let dir = tempfile::tempdir().unwrap();
        m.write(dir.path()).unwrap();
        assert_eq!(RunManifest::read(dir.path()).unwrap(), m);
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        assert_eq!(sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_ne!(sha256_hex(b"abc"), sha256_hex(b"abd"));
    }
}
