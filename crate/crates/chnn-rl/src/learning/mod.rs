//! Learning rules: causality traces for the actor, TD(0) for the critic,
//! and the external-noise baseline.

pub mod baseline;
pub mod traces;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::critic::CriticNet;

/// Temporal-difference learning parameters shared by actor and critic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TdConfig {
    /// Discount factor, in [0, 1).
    pub gamma: f64,
    /// Actor learning rate (trace-modulated or noise-modulated update).
    pub eta_actor: f64,
    /// Critic learning rate (semi-gradient TD(0)).
    pub eta_critic: f64,
    /// Reward emitted when the robot enters the goal area.
    pub reward_goal: f64,
    /// Reward emitted on obstacle contact; must not be positive.
    pub penalty_collision: f64,
}

impl Default for TdConfig {
    fn default() -> Self {
        TdConfig {
            gamma: 0.9,
            eta_actor: 0.01,
            eta_critic: 0.05,
            reward_goal: 1.0,
            penalty_collision: -0.1,
        }
    }
}

impl TdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::invalid_config(
                "gamma",
                format!("must be in [0, 1), got {}", self.gamma),
            ));
        }
        for (field, v) in [("eta_actor", self.eta_actor), ("eta_critic", self.eta_critic)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        if !self.reward_goal.is_finite() {
            return Err(Error::invalid_config("reward_goal", "must be finite"));
        }
        if !self.penalty_collision.is_finite() || self.penalty_collision > 0.0 {
            return Err(Error::invalid_config(
                "penalty_collision",
                format!("must be finite and <= 0, got {}", self.penalty_collision),
            ));
        }
        Ok(())
    }
}

/// One-step TD error: `r + gamma * v_next - v_now`, with the next value
/// treated as zero on terminal transitions (no bootstrap past the end).
pub fn td_error(r: f64, v_now: f64, v_next: f64, terminal: bool, cfg: &TdConfig) -> f64 {
    let bootstrap = if terminal { 0.0 } else { cfg.gamma * v_next };
    r + bootstrap - v_now
}

/// Semi-gradient TD(0) critic step: `w += eta_critic * td_error * dV(s)/dw`.
/// The gradient is taken at the current state only; nothing flows through
/// the next-state value.
pub fn train_critic_step(
    critic: &mut CriticNet,
    input: &[f64],
    td_error: f64,
    cfg: &TdConfig,
) -> Result<()> {
    if !td_error.is_finite() {
        return Err(Error::NonFinite { what: "td_error" });
    }
    critic.td_update(input, cfg.eta_critic * td_error)
}
