//! The run configuration: one TOML file that pins down an entire training
//! run. Every field has a default, so an empty file is a valid config and
//! `print-config` can dump the effective defaults for editing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::LyapunovConfig;
use crate::env::{Method, WorldConfig};
use crate::error::{Error, Result};
use crate::learning::TdConfig;
use crate::netcore::{ActorInitConfig, CriticInitConfig};

/// Knobs used only by the baseline method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig {
    /// Standard deviation of the Gaussian exploration noise added to each
    /// output during training.
    pub noise_std: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { noise_std: 0.05 }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_std.is_finite() && self.noise_std > 0.0) {
            return Err(Error::invalid_config(
                "baseline.noise_std",
                format!(
                    "must be finite and positive (a noise-free baseline cannot explore), got {}",
                    self.noise_std
                ),
            ));
        }
        Ok(())
    }
}

/// Everything a training run needs. The master seed list is the only source
/// of randomness: each seed deterministically derives the weight, placement,
/// noise, and perturbation streams for its worker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub method: Method,
    pub seeds: Vec<u64>,
    pub episodes: u64,
    /// Checkpoint (and, for the chaotic method, Lyapunov report) cadence.
    pub checkpoint_every: u64,
    /// Episode-log cadence; episodes 1 and `episodes` are always logged.
    pub log_every: u64,
    pub output_dir: PathBuf,
    pub world: WorldConfig,
    pub td: TdConfig,
    pub actor_init: ActorInitConfig,
    pub critic_init: CriticInitConfig,
    pub lyapunov: LyapunovConfig,
    pub baseline: BaselineConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::Chaotic,
            seeds: vec![0],
            episodes: 3000,
            checkpoint_every: 1000,
            log_every: 500,
            output_dir: PathBuf::from("out"),
            world: WorldConfig::default(),
            td: TdConfig::default(),
            actor_init: ActorInitConfig::default(),
            critic_init: CriticInitConfig::default(),
            lyapunov: LyapunovConfig::default(),
            baseline: BaselineConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::invalid_config("seeds", "must not be empty"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::invalid_config(
                "seeds",
                "must be distinct (per-seed output directories would collide)",
            ));
        }
        if self.episodes == 0 {
            return Err(Error::invalid_config("episodes", "must be at least 1"));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::invalid_config(
                "checkpoint_every",
                "must be at least 1",
            ));
        }
        if self.log_every == 0 {
            return Err(Error::invalid_config("log_every", "must be at least 1"));
        }
        self.world.validate()?;
        self.td.validate()?;
        self.actor_init.validate()?;
        self.critic_init.validate()?;
        self.lyapunov.validate(&self.world)?;
        self.baseline.validate()?;
        if self.actor_init.n_input != self.world.input_len() {
            return Err(Error::invalid_config(
                "actor_init.n_input",
                format!(
                    "must equal the sensor input length {} (two rings of {} cells), got {}",
                    self.world.input_len(),
                    self.world.sensor_cells,
                    self.actor_init.n_input
                ),
            ));
        }
        if self.actor_init.n_output != 2 {
            return Err(Error::invalid_config(
                "actor_init.n_output",
                format!(
                    "must be 2 (left and right wheel), got {}",
                    self.actor_init.n_output
                ),
            ));
        }
        if self.critic_init.n_input != self.world.input_len() {
            return Err(Error::invalid_config(
                "critic_init.n_input",
                format!(
                    "must equal the sensor input length {}, got {}",
                    self.world.input_len(),
                    self.critic_init.n_input
                ),
            ));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Toml {
            what: path.display().to_string(),
            source: e,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The effective config as TOML, suitable for `print-config` and for
    /// archiving the resolved settings next to the run outputs.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    /// Content hash of the effective configuration; the manifest records it
    /// so outputs can be matched back to the exact settings that made them.
    pub fn config_hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes to JSON");
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn seed_dir(&self, seed: u64) -> PathBuf {
        self.output_dir.join(format!("seed_{seed}"))
    }
}
