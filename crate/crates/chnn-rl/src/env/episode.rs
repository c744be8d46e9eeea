//! The episode loop and its on-disk log format.
//!
//! An episode runs until the robot enters the goal or the step cap hits.
//! In training mode every step also advances the causality traces and applies
//! the actor/critic updates; in eval mode the loop is purely observational.
//! Logs serialize as JSON-lines: one meta header line, then one row per step.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::env::{sense, step_outcome, WorldConfig, WorldState};
use crate::error::{Error, Result};
use crate::learning::baseline::{baseline_noise_update, noisy_action, FeedforwardActor};
use crate::learning::traces::{apply_actor_update, CausalityTraces};
use crate::learning::{td_error, train_critic_step, TdConfig};
use crate::netcore::actor::ChaoticActor;
use crate::netcore::critic::CriticNet;

pub const LOG_FORMAT_VERSION: u32 = 1;

/// Which learner produced a log or checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Chaotic,
    Baseline,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Chaotic => write!(f, "chaotic"),
            Method::Baseline => write!(f, "baseline"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Identifies an episode within a run; goes into the log header.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeTag {
    pub method: Method,
    pub episode: u64,
    pub seed: u64,
}

/// Log header: everything needed to re-draw or re-simulate the episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMeta {
    pub format_version: u32,
    pub method: Method,
    pub episode: u64,
    pub seed: u64,
    pub start_x: f64,
    pub start_y: f64,
    pub start_heading: f64,
    pub goal_x: f64,
    pub goal_y: f64,
    pub goal_radius: f64,
    pub obstacle_x: f64,
    pub obstacle_y: f64,
    pub obstacle_radius: f64,
    pub robot_radius: f64,
    pub field_half: f64,
}

impl EpisodeMeta {
    fn new(tag: EpisodeTag, world: &WorldState, cfg: &WorldConfig) -> Self {
        EpisodeMeta {
            format_version: LOG_FORMAT_VERSION,
            method: tag.method,
            episode: tag.episode,
            seed: tag.seed,
            start_x: world.robot_x,
            start_y: world.robot_y,
            start_heading: world.heading,
            goal_x: cfg.goal_center.0,
            goal_y: cfg.goal_center.1,
            goal_radius: cfg.goal_radius,
            obstacle_x: world.obstacle_x,
            obstacle_y: world.obstacle_y,
            obstacle_radius: cfg.obstacle_radius,
            robot_radius: cfg.robot_radius,
            field_half: cfg.field_half,
        }
    }
}

/// One logged simulation step (pose after the move, action that caused it,
/// and the learning signals computed on the transition). The noise fields
/// appear only in baseline training logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u32,
    pub robot_x: f64,
    pub robot_y: f64,
    pub heading: f64,
    pub action_l: f64,
    pub action_r: f64,
    pub reward: f64,
    pub td_error: f64,
    pub v_now: f64,
    pub collided: bool,
    pub reached: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub meta: EpisodeMeta,
    pub steps: Vec<StepRecord>,
}

#[derive(Serialize, Deserialize)]
struct MetaLine {
    meta: EpisodeMeta,
}

impl EpisodeLog {
    pub fn reached(&self) -> bool {
        self.steps.last().is_some_and(|s| s.reached)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        out.push_str(
            &serde_json::to_string(&MetaLine {
                meta: self.meta.clone(),
            })
            .expect("log meta serializes"),
        );
        out.push('\n');
        for row in &self.steps {
            out.push_str(&serde_json::to_string(row).expect("log row serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or(Error::EmptyLog)?;
        let meta: MetaLine = serde_json::from_str(first).map_err(|e| Error::MalformedLog {
            line: 1,
            reason: e.to_string(),
        })?;
        if meta.meta.format_version != LOG_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                what: "episode log",
                expected: LOG_FORMAT_VERSION,
                got: meta.meta.format_version,
            });
        }
        let mut steps = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let row: StepRecord = serde_json::from_str(line).map_err(|e| Error::MalformedLog {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            steps.push(row);
        }
        if steps.is_empty() {
            return Err(Error::EmptyLog);
        }
        Ok(EpisodeLog {
            meta: meta.meta,
            steps,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_jsonl(&text)
    }
}

/// Runs one episode of the chaotic actor. Actor hidden state and traces are
/// reset here, so an episode is a pure function of (weights, critic, world).
///
/// Step order: sense s, value V(s), actor step, move, outcome, sense s',
/// value V(s'), TD error; in train mode then traces, actor update, critic
/// update — all on the s -> s' transition just taken.
pub fn run_episode(
    actor: &mut ChaoticActor,
    critic: &mut CriticNet,
    traces: &mut CausalityTraces,
    world: &mut WorldState,
    world_cfg: &WorldConfig,
    td_cfg: &TdConfig,
    mode: Mode,
    tag: EpisodeTag,
) -> Result<EpisodeLog> {
    if actor.n_input() != world_cfg.input_len() {
        return Err(Error::DimensionMismatch {
            what: "actor input vs sensor size",
            expected: world_cfg.input_len(),
            got: actor.n_input(),
        });
    }
    if actor.n_output() != 2 {
        return Err(Error::DimensionMismatch {
            what: "actor outputs vs wheel count",
            expected: 2,
            got: actor.n_output(),
        });
    }
    actor.reset();
    traces.reset();

    let meta = EpisodeMeta::new(tag, world, world_cfg);
    let mut steps = Vec::new();
    let mut input = sense(world, world_cfg).to_input();
    loop {
        let v_now = critic.value(&input)?;
        let out = actor.step(&input)?;
        let (l, r) = (out[0], out[1]);
        let collided = world.apply_wheels(l, r, world_cfg)?;
        let outcome = step_outcome(world, collided, world_cfg, td_cfg);
        let next_input = sense(world, world_cfg).to_input();
        let v_next = critic.value(&next_input)?;
        let td = td_error(outcome.reward, v_now, v_next, outcome.terminal, td_cfg);

        if mode == Mode::Train {
            traces.update(&input, actor.hidden(), &out)?;
            apply_actor_update(actor, traces, td, td_cfg)?;
            train_critic_step(critic, &input, td, td_cfg)?;
        }

        steps.push(StepRecord {
            step: world.step,
            robot_x: world.robot_x,
            robot_y: world.robot_y,
            heading: world.heading,
            action_l: l,
            action_r: r,
            reward: outcome.reward,
            td_error: td,
            v_now,
            collided,
            reached: outcome.reached_goal,
            noise_l: None,
            noise_r: None,
        });
        input = next_input;
        if outcome.terminal {
            break;
        }
    }
    Ok(EpisodeLog { meta, steps })
}

/// Runs one episode of the feedforward control actor. Exploration comes from
/// Gaussian noise added to the outputs; the executed wheel command is the
/// noisy output clamped back into the admissible range, and the drawn noise
/// is recorded in the log. In eval mode no noise is drawn (the policy itself
/// is the deliverable, not the exploration around it) and no weights change.
#[allow(clippy::too_many_arguments)]
pub fn run_baseline_episode(
    actor: &mut FeedforwardActor,
    critic: &mut CriticNet,
    noise_rng: &mut impl Rng,
    noise_std: f64,
    world: &mut WorldState,
    world_cfg: &WorldConfig,
    td_cfg: &TdConfig,
    mode: Mode,
    tag: EpisodeTag,
) -> Result<EpisodeLog> {
    if actor.n_input() != world_cfg.input_len() {
        return Err(Error::DimensionMismatch {
            what: "actor input vs sensor size",
            expected: world_cfg.input_len(),
            got: actor.n_input(),
        });
    }
    if actor.n_output() != 2 {
        return Err(Error::DimensionMismatch {
            what: "actor outputs vs wheel count",
            expected: 2,
            got: actor.n_output(),
        });
    }
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(Error::invalid_config(
            "noise_std",
            format!("must be finite and non-negative, got {noise_std}"),
        ));
    }
    let normal = Normal::new(0.0, noise_std).expect("std checked finite and non-negative");

    let meta = EpisodeMeta::new(tag, world, world_cfg);
    let mut steps = Vec::new();
    let mut input = sense(world, world_cfg).to_input();
    loop {
        let v_now = critic.value(&input)?;
        let raw = actor.forward(&input)?;
        let noise: Option<Vec<f64>> = match mode {
            Mode::Train => Some((0..raw.len()).map(|_| normal.sample(noise_rng)).collect()),
            Mode::Eval => None,
        };
        let action = match &noise {
            Some(n) => noisy_action(&raw, n),
            None => raw,
        };
        let (l, r) = (action[0], action[1]);
        let collided = world.apply_wheels(l, r, world_cfg)?;
        let outcome = step_outcome(world, collided, world_cfg, td_cfg);
        let next_input = sense(world, world_cfg).to_input();
        let v_next = critic.value(&next_input)?;
        let td = td_error(outcome.reward, v_now, v_next, outcome.terminal, td_cfg);

        if let Some(n) = &noise {
            baseline_noise_update(actor, &input, n, td, td_cfg)?;
            train_critic_step(critic, &input, td, td_cfg)?;
        }

        steps.push(StepRecord {
            step: world.step,
            robot_x: world.robot_x,
            robot_y: world.robot_y,
            heading: world.heading,
            action_l: l,
            action_r: r,
            reward: outcome.reward,
            td_error: td,
            v_now,
            collided,
            reached: outcome.reached_goal,
            noise_l: noise.as_ref().map(|n| n[0]),
            noise_r: noise.as_ref().map(|n| n[1]),
        });
        input = next_input;
        if outcome.terminal {
            break;
        }
    }
    Ok(EpisodeLog { meta, steps })
}
