use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub master_seed: u64,
    /// Seconds since the Unix epoch; the only nondeterministic field.
    pub created_unix: u64,
    pub files: Vec<ManifestEntry>,
}

/// Writes artifacts into one directory and records their hashes.
#[derive(Debug)]
pub struct ArtifactSink {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ArtifactSink {
    pub fn create(dir: &Path) -> Result<Self, ExperimentError> {
        fs::create_dir_all(dir)
            .map_err(|e| ExperimentError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), ExperimentError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(bytes);
        self.entries.retain(|e| e.path != name);
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), ExperimentError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| ExperimentError::Io(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json` listing every artifact written so far.
    pub fn finish(self, command: &str, master_seed: u64) -> Result<Manifest, ExperimentError> {
        let created_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            master_seed,
            created_unix,
            files: self.entries,
        };
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| ExperimentError::Io(format!("serializing manifest: {e}")))?;
        let path = self.dir.join("manifest.json");
        fs::write(&path, text + "\n")
            .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
        Ok(manifest)
    }
}
