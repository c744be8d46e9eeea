//! The run manifest: a single JSON file the coordinator writes after all
//! seed workers finish, naming every artifact the run produced.
//!
//! Everything in it is deterministic except the two wall-clock fields, which
//! exist for bookkeeping and are explicitly exempt from the byte-identity
//! guarantee.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::Method;
use crate::error::{Error, Result};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;
/// Version of the artifact layout (file names, CSV columns, log schema).
pub const ARTIFACT_VERSION: u32 = 1;

/// Artifacts one seed worker produced, as paths relative to the output dir.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedArtifacts {
    pub seed: u64,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub artifact_version: u32,
    pub config_hash: String,
    pub method: Method,
    pub episodes: u64,
    /// Wall-clock start, seconds since the Unix epoch (not deterministic).
    pub started_unix_s: u64,
    /// Wall-clock duration in seconds (not deterministic).
    pub duration_s: f64,
    /// Set when the run aborted partway; completed seeds are still listed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub seeds: Vec<SeedArtifacts>,
}

impl RunManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Json {
            what: path.display().to_string(),
            source: e,
        })?;
        if m.format_version != MANIFEST_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                what: "manifest",
                expected: MANIFEST_FORMAT_VERSION,
                got: m.format_version,
            });
        }
        Ok(m)
    }

    /// All listed files as paths relative to the run output dir.
    pub fn all_files(&self) -> impl Iterator<Item = &str> {
        self.seeds.iter().flat_map(|s| s.files.iter().map(String::as_str))
    }
}
