//! Training orchestration: one worker per seed, a manifest from the
//! coordinator.
//!
//! Each seed worker owns its actor, critic, and output directory, so workers
//! share nothing and can run in parallel. All randomness a worker consumes
//! comes from streams derived from its seed, which makes every per-seed
//! artifact a pure function of (config, seed): rerunning a config reproduces
//! every CSV, checkpoint, and log byte for byte. Only the manifest's
//! wall-clock fields escape that guarantee.

use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::analysis::{learning_curve, curve_to_csv, one_step_lyapunov, EpisodeStats};
use crate::env::{
    reset_episode, run_baseline_episode, run_episode, EpisodeLog, EpisodeTag, Method, Mode,
};
use crate::error::{Error, Result};
use crate::harness::checkpoint::Checkpoint;
use crate::harness::config::RunConfig;
use crate::harness::manifest::{RunManifest, SeedArtifacts, ARTIFACT_VERSION, MANIFEST_FORMAT_VERSION};
use crate::harness::rng::{stream, StreamDomain};
use crate::learning::baseline::FeedforwardActor;
use crate::learning::traces::CausalityTraces;
use crate::netcore::{ChaoticActor, CriticNet};

/// Runs the full training job described by `cfg` and writes
/// `manifest.json` into the output directory.
///
/// If any seed worker fails, the manifest is still written with the
/// completed seeds and a note explaining the abort, and the error is
/// returned.
pub fn train_run(cfg: &RunConfig) -> Result<RunManifest> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| Error::io(cfg.output_dir.display().to_string(), e))?;
    let started_unix_s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();

    let results: Vec<(u64, Result<SeedArtifacts>)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| (seed, train_seed(cfg, seed)))
        .collect();

    let mut seeds = Vec::new();
    let mut note = None;
    for (seed, r) in results {
        match r {
            Ok(artifacts) => seeds.push(artifacts),
            Err(e) => {
                note = Some(format!("aborted: seed {seed} failed: {e}"));
                let manifest = RunManifest {
                    format_version: MANIFEST_FORMAT_VERSION,
                    artifact_version: ARTIFACT_VERSION,
                    config_hash: cfg.config_hash(),
                    method: cfg.method,
                    episodes: cfg.episodes,
                    started_unix_s,
                    duration_s: clock.elapsed().as_secs_f64(),
                    note,
                    seeds,
                };
                // Best effort: the abort itself may be an I/O failure.
                let _ = manifest.save(&cfg.output_dir.join("manifest.json"));
                return Err(e);
            }
        }
    }

    let manifest = RunManifest {
        format_version: MANIFEST_FORMAT_VERSION,
        artifact_version: ARTIFACT_VERSION,
        config_hash: cfg.config_hash(),
        method: cfg.method,
        episodes: cfg.episodes,
        started_unix_s,
        duration_s: clock.elapsed().as_secs_f64(),
        note,
        seeds,
    };
    manifest.save(&cfg.output_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Should this episode's full step log go to disk? First and last are always
/// kept so before/after trajectories exist regardless of cadence.
fn log_this_episode(e: u64, cfg: &RunConfig) -> bool {
    e == 1 || e == cfg.episodes || e % cfg.log_every == 0
}

fn checkpoint_this_episode(e: u64, cfg: &RunConfig) -> bool {
    e == cfg.episodes || e % cfg.checkpoint_every == 0
}

struct SeedWriter<'a> {
    dir: std::path::PathBuf,
    seed: u64,
    files: Vec<String>,
    cfg: &'a RunConfig,
}

impl<'a> SeedWriter<'a> {
    fn new(cfg: &'a RunConfig, seed: u64) -> Result<Self> {
        let dir = cfg.seed_dir(seed);
        fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        Ok(SeedWriter {
            dir,
            seed,
            files: Vec::new(),
            cfg,
        })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.files.push(format!("seed_{}/{name}", self.seed));
        Ok(())
    }

    fn save_log(&mut self, episode: u64, log: &EpisodeLog) -> Result<()> {
        self.write(&format!("episode_{episode}.jsonl"), &log.to_jsonl())
    }

    fn save_checkpoint(&mut self, ckpt: &Checkpoint) -> Result<String> {
        let id = format!("checkpoint_ep{}", ckpt.episode);
        self.write(&format!("{id}.json"), &ckpt.to_json())?;
        Ok(id)
    }

    fn finish(mut self, stats: &[EpisodeStats], lyap_rows: &str) -> Result<SeedArtifacts> {
        self.write("learning_curve.csv", &curve_to_csv(&learning_curve(stats)))?;
        if self.cfg.method == Method::Chaotic {
            let mut csv = String::from("checkpoint_id,episode,lambda,n_degenerate\n");
            csv.push_str(lyap_rows);
            self.write("lyapunov.csv", &csv)?;
        }
        Ok(SeedArtifacts {
            seed: self.seed,
            files: self.files,
        })
    }
}

fn train_seed(cfg: &RunConfig, seed: u64) -> Result<SeedArtifacts> {
    match cfg.method {
        Method::Chaotic => train_seed_chaotic(cfg, seed),
        Method::Baseline => train_seed_baseline(cfg, seed),
    }
}

fn train_seed_chaotic(cfg: &RunConfig, seed: u64) -> Result<SeedArtifacts> {
    let mut writer = SeedWriter::new(cfg, seed)?;
    let mut actor = ChaoticActor::new(seed, &cfg.actor_init)?;
    let mut critic = CriticNet::new(seed, &cfg.critic_init)?;
    let mut traces = CausalityTraces::for_actor(&actor);
    let mut stats = Vec::with_capacity(cfg.episodes as usize);
    let mut lyap_rows = String::new();

    let snapshot = |writer: &mut SeedWriter,
                        actor: &ChaoticActor,
                        episode: u64,
                        lyap_rows: &mut String|
     -> Result<()> {
        let ckpt = Checkpoint::from_chaotic(actor, episode, seed);
        let id = writer.save_checkpoint(&ckpt)?;
        let est = one_step_lyapunov(actor, &cfg.lyapunov, &cfg.world)?;
        lyap_rows.push_str(&format!(
            "{id},{episode},{},{}\n",
            est.lambda, est.n_degenerate
        ));
        Ok(())
    };

    snapshot(&mut writer, &actor, 0, &mut lyap_rows)?;
    for e in 1..=cfg.episodes {
        let mut world = reset_episode(&mut stream(seed, StreamDomain::Placement, e), &cfg.world)?;
        let tag = EpisodeTag {
            method: Method::Chaotic,
            episode: e,
            seed,
        };
        let log = run_episode(
            &mut actor,
            &mut critic,
            &mut traces,
            &mut world,
            &cfg.world,
            &cfg.td,
            Mode::Train,
            tag,
        )?;
        stats.push(EpisodeStats::from(&log));
        if log_this_episode(e, cfg) {
            writer.save_log(e, &log)?;
        }
        if checkpoint_this_episode(e, cfg) {
            snapshot(&mut writer, &actor, e, &mut lyap_rows)?;
        }
    }
    writer.finish(&stats, &lyap_rows)
}

fn train_seed_baseline(cfg: &RunConfig, seed: u64) -> Result<SeedArtifacts> {
    let mut writer = SeedWriter::new(cfg, seed)?;
    let mut actor = FeedforwardActor::new(seed, &cfg.actor_init)?;
    let mut critic = CriticNet::new(seed, &cfg.critic_init)?;
    let mut stats = Vec::with_capacity(cfg.episodes as usize);

    writer.save_checkpoint(&Checkpoint::from_baseline(&actor, 0, seed))?;
    for e in 1..=cfg.episodes {
        let mut world = reset_episode(&mut stream(seed, StreamDomain::Placement, e), &cfg.world)?;
        let tag = EpisodeTag {
            method: Method::Baseline,
            episode: e,
            seed,
        };
        let mut noise_rng = stream(seed, StreamDomain::Noise, e);
        let log = run_baseline_episode(
            &mut actor,
            &mut critic,
            &mut noise_rng,
            cfg.baseline.noise_std,
            &mut world,
            &cfg.world,
            &cfg.td,
            Mode::Train,
            tag,
        )?;
        stats.push(EpisodeStats::from(&log));
        if log_this_episode(e, cfg) {
            writer.save_log(e, &log)?;
        }
        if checkpoint_this_episode(e, cfg) {
            writer.save_checkpoint(&Checkpoint::from_baseline(&actor, e, seed))?;
        }
    }
    writer.finish(&stats, "")
}

/// Convenience for tests and the determinism check: the bytes of every
/// deterministic per-seed artifact of a finished run, in manifest order.
pub fn read_seed_artifacts(out_dir: &Path, manifest: &RunManifest) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for rel in manifest.all_files() {
        let path = out_dir.join(rel);
        let bytes = fs::read(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
        out.push((rel.to_string(), bytes));
    }
    Ok(out)
}
