//! Checkpoint evaluation: run eval-mode episodes from the eight canonical
//! compass start sites plus a batch of random placements, and summarize.
//!
//! Evaluation never trains anything and the critic plays no role in action
//! selection, so episodes run against a zeroed critic; the value and TD
//! columns in eval logs are therefore pure reward bookkeeping.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::compass_sites;
use crate::env::{
    reset_episode, run_baseline_episode, run_episode, EpisodeLog, EpisodeTag, Method, Mode,
    WorldConfig, WorldState,
};
use crate::error::{Error, Result};
use crate::harness::checkpoint::Checkpoint;
use crate::harness::replay::trajectory_csv;
use crate::harness::rng::{stream, StreamDomain};
use crate::learning::traces::CausalityTraces;
use crate::learning::TdConfig;
use crate::netcore::CriticNet;

/// Start radius of the canonical evaluation sites.
pub const EVAL_SITE_RADIUS: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub reach_rate: f64,
    pub mean_steps: f64,
    pub collision_count: u64,
}

#[derive(Debug)]
pub struct EvalOutcome {
    pub summary: EvalSummary,
    pub logs: Vec<EpisodeLog>,
    /// Files written under the output dir, if one was given.
    pub files: Vec<PathBuf>,
}

/// The eight canonical start states: compass sites at radius 6 facing +y,
/// with the obstacle parked at the field center so every route to the goal
/// has something to avoid.
fn canonical_states() -> Vec<WorldState> {
    compass_sites(EVAL_SITE_RADIUS)
        .into_iter()
        .map(|(x, y)| WorldState {
            robot_x: x,
            robot_y: y,
            heading: FRAC_PI_2,
            obstacle_x: 0.0,
            obstacle_y: 0.0,
            step: 0,
        })
        .collect()
}

/// Runs `8 + n_random` eval episodes from a checkpoint. Random placements
/// are drawn from the placement stream of `seed`, indexed by episode number,
/// so the whole evaluation is a pure function of (checkpoint, seed, configs).
pub fn evaluate_checkpoint(
    ckpt: &Checkpoint,
    n_random: u64,
    seed: u64,
    world_cfg: &WorldConfig,
    td_cfg: &TdConfig,
    out_dir: Option<&Path>,
) -> Result<EvalOutcome> {
    world_cfg.validate()?;
    td_cfg.validate()?;

    let mut episodes: Vec<(String, WorldState)> = Vec::new();
    for (i, state) in canonical_states().into_iter().enumerate() {
        episodes.push((format!("eval_site_{}", i + 1), state));
    }
    let n_sites = episodes.len() as u64;
    for j in 1..=n_random {
        let e = n_sites + j;
        let state = reset_episode(&mut stream(seed, StreamDomain::Placement, e), world_cfg)?;
        episodes.push((format!("eval_rand_{j}"), state));
    }

    let mut logs = Vec::with_capacity(episodes.len());
    match ckpt.method {
        Method::Chaotic => {
            let mut actor = ckpt.to_chaotic_actor()?;
            let mut traces = CausalityTraces::for_actor(&actor);
            let mut critic = CriticNet::zeroed(world_cfg.input_len(), 1);
            for (e, (_, state)) in episodes.iter().enumerate() {
                let mut world = *state;
                let tag = EpisodeTag {
                    method: Method::Chaotic,
                    episode: e as u64 + 1,
                    seed,
                };
                logs.push(run_episode(
                    &mut actor,
                    &mut critic,
                    &mut traces,
                    &mut world,
                    world_cfg,
                    td_cfg,
                    Mode::Eval,
                    tag,
                )?);
            }
        }
        Method::Baseline => {
            let mut actor = ckpt.to_feedforward_actor()?;
            let mut critic = CriticNet::zeroed(world_cfg.input_len(), 1);
            for (e, (_, state)) in episodes.iter().enumerate() {
                let mut world = *state;
                let episode = e as u64 + 1;
                let tag = EpisodeTag {
                    method: Method::Baseline,
                    episode,
                    seed,
                };
                let mut rng = stream(seed, StreamDomain::Noise, episode);
                logs.push(run_baseline_episode(
                    &mut actor,
                    &mut critic,
                    &mut rng,
                    0.0,
                    &mut world,
                    world_cfg,
                    td_cfg,
                    Mode::Eval,
                    tag,
                )?);
            }
        }
    }

    let n = logs.len() as f64;
    let reached = logs.iter().filter(|l| l.reached()).count() as f64;
    let total_steps: u64 = logs.iter().map(|l| l.len() as u64).sum();
    let collision_count: u64 = logs
        .iter()
        .flat_map(|l| l.steps.iter())
        .filter(|s| s.collided)
        .count() as u64;
    let summary = EvalSummary {
        reach_rate: reached / n,
        mean_steps: total_steps as f64 / n,
        collision_count,
    };

    let mut files = Vec::new();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for ((name, _), log) in episodes.iter().zip(&logs) {
            let jsonl = dir.join(format!("{name}.jsonl"));
            log.save(&jsonl)?;
            files.push(jsonl);
            let csv = dir.join(format!("{name}.csv"));
            fs::write(&csv, trajectory_csv(log))
                .map_err(|e| Error::io(csv.display().to_string(), e))?;
            files.push(csv);
        }
        let summary_path = dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        text.push('\n');
        fs::write(&summary_path, text)
            .map_err(|e| Error::io(summary_path.display().to_string(), e))?;
        files.push(summary_path);
    }

    Ok(EvalOutcome {
        summary,
        logs,
        files,
    })
}
