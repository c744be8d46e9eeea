//! The task world: a square field with one goal, one obstacle, and a
//! differential-drive robot sensed through coarse omnidirectional vision.

pub mod episode;
pub mod sensor;

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::TdConfig;

pub use episode::{
    run_baseline_episode, run_episode, EpisodeLog, EpisodeMeta, EpisodeTag, Method, Mode,
    StepRecord,
};
pub use sensor::{sense, SensorImage};

/// Placement attempts before giving up on satisfying the separation
/// constraints; hitting it means the geometry is over-constrained.
const PLACEMENT_RETRY_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorldConfig {
    /// Half the side length: the field spans [-field_half, field_half]^2.
    pub field_half: f64,
    pub goal_center: (f64, f64),
    pub goal_radius: f64,
    pub robot_radius: f64,
    pub obstacle_radius: f64,
    /// Episode cap in steps.
    pub max_steps: u32,
    /// Cells per sensor ring; each cell spans 360/sensor_cells degrees.
    pub sensor_cells: usize,
    /// Wheel command (in [-0.5, 0.5]) to displacement-per-step conversion.
    pub wheel_speed_scale: f64,
    /// Wheel separation for the differential-drive turning rate.
    pub axle_width: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            field_half: 10.0,
            goal_center: (0.0, 8.0),
            goal_radius: 1.0,
            robot_radius: 0.5,
            obstacle_radius: 1.5,
            max_steps: 1000,
            sensor_cells: 72,
            wheel_speed_scale: 5.0,
            axle_width: 2.0,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.field_half.is_finite() || self.field_half <= 0.0 {
            return Err(Error::invalid_config("field_half", "must be positive"));
        }
        for (field, v) in [
            ("goal_radius", self.goal_radius),
            ("robot_radius", self.robot_radius),
            ("obstacle_radius", self.obstacle_radius),
            ("wheel_speed_scale", self.wheel_speed_scale),
            ("axle_width", self.axle_width),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        let (gx, gy) = self.goal_center;
        if !gx.is_finite() || !gy.is_finite() || gx.abs() > self.field_half || gy.abs() > self.field_half
        {
            return Err(Error::invalid_config(
                "goal_center",
                "must lie inside the field",
            ));
        }
        if self.min_separation() > self.field_half {
            return Err(Error::invalid_config(
                "obstacle_radius",
                "robot_radius + obstacle_radius must not exceed field_half",
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid_config("max_steps", "must be at least 1"));
        }
        if self.sensor_cells == 0 {
            return Err(Error::invalid_config("sensor_cells", "must be at least 1"));
        }
        Ok(())
    }

    /// Center distance below which robot and obstacle overlap.
    pub fn min_separation(&self) -> f64 {
        self.robot_radius + self.obstacle_radius
    }

    /// Field diagonal: the sensor's zero-activation distance.
    pub fn sensor_range(&self) -> f64 {
        (2.0 * self.field_half).hypot(2.0 * self.field_half)
    }

    /// Number of actor inputs this world produces (both sensor rings).
    pub fn input_len(&self) -> usize {
        2 * self.sensor_cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldState {
    pub robot_x: f64,
    pub robot_y: f64,
    /// Radians, counterclockwise, 0 along +x; kept in [0, tau).
    pub heading: f64,
    pub obstacle_x: f64,
    pub obstacle_y: f64,
    pub step: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub reached_goal: bool,
    pub collided: bool,
    pub terminal: bool,
}

fn wrap_angle(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

fn dist(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    (ax - bx).hypot(ay - by)
}

/// Draws a fresh episode start: obstacle clear of the goal area, robot clear
/// of both, heading uniform. Draw order (obstacle, robot, heading) is fixed
/// so a given stream state always produces the same placement.
pub fn reset_episode(rng: &mut impl Rng, cfg: &WorldConfig) -> Result<WorldState> {
    let h = cfg.field_half;
    let (gx, gy) = cfg.goal_center;

    let mut obstacle = None;
    for _ in 0..PLACEMENT_RETRY_LIMIT {
        let x = rng.random_range(-h..=h);
        let y = rng.random_range(-h..=h);
        if dist(x, y, gx, gy) >= cfg.goal_radius + cfg.obstacle_radius {
            obstacle = Some((x, y));
            break;
        }
    }
    let (ox, oy) = obstacle.ok_or(Error::PlacementRetries {
        attempts: PLACEMENT_RETRY_LIMIT,
    })?;

    let mut robot = None;
    for _ in 0..PLACEMENT_RETRY_LIMIT {
        let x = rng.random_range(-h..=h);
        let y = rng.random_range(-h..=h);
        if dist(x, y, ox, oy) >= cfg.min_separation() && dist(x, y, gx, gy) >= cfg.goal_radius {
            robot = Some((x, y));
            break;
        }
    }
    let (rx, ry) = robot.ok_or(Error::PlacementRetries {
        attempts: PLACEMENT_RETRY_LIMIT,
    })?;

    Ok(WorldState {
        robot_x: rx,
        robot_y: ry,
        heading: rng.random_range(0.0..TAU),
        obstacle_x: ox,
        obstacle_y: oy,
        step: 0,
    })
}

impl WorldState {
    /// Advances the robot one step from wheel commands in [-0.5, 0.5].
    /// Returns whether the move ran into the obstacle. The final position is
    /// always inside the field and outside the obstacle's contact circle.
    pub fn apply_wheels(&mut self, left: f64, right: f64, cfg: &WorldConfig) -> Result<bool> {
        for v in [left, right] {
            if !v.is_finite() || v.abs() > 0.5 {
                return Err(Error::invalid_config(
                    "wheel_command",
                    format!("must be in [-0.5, 0.5], got {v}"),
                ));
            }
        }
        let v_l = left * cfg.wheel_speed_scale;
        let v_r = right * cfg.wheel_speed_scale;
        self.heading = wrap_angle(self.heading + (v_r - v_l) / cfg.axle_width);
        let disp = 0.5 * (v_l + v_r);
        self.robot_x += disp * self.heading.cos();
        self.robot_y += disp * self.heading.sin();
        self.robot_x = self.robot_x.clamp(-cfg.field_half, cfg.field_half);
        self.robot_y = self.robot_y.clamp(-cfg.field_half, cfg.field_half);

        let min_d = cfg.min_separation();
        let collided = dist(self.robot_x, self.robot_y, self.obstacle_x, self.obstacle_y) < min_d;
        if collided {
            let (x, y) = nearest_clear_point(
                self.robot_x,
                self.robot_y,
                self.obstacle_x,
                self.obstacle_y,
                min_d,
                cfg.field_half,
            );
            self.robot_x = x;
            self.robot_y = y;
        }
        self.step += 1;
        Ok(collided)
    }

    pub fn distance_to_goal(&self, cfg: &WorldConfig) -> f64 {
        dist(self.robot_x, self.robot_y, cfg.goal_center.0, cfg.goal_center.1)
    }

    pub fn distance_to_obstacle(&self) -> f64 {
        dist(self.robot_x, self.robot_y, self.obstacle_x, self.obstacle_y)
    }
}

/// Point on the obstacle's contact circle (radius `min_d` around its center)
/// nearest to the penetrating position, constrained to the field. The
/// constrained optimum is either the radial projection or a point where the
/// contact circle crosses a wall; a field-center fallback guards the case
/// where rounding leaves no candidate.
fn nearest_clear_point(x: f64, y: f64, ox: f64, oy: f64, min_d: f64, half: f64) -> (f64, f64) {
    let in_field = |px: f64, py: f64| px.abs() <= half && py.abs() <= half;
    let d = dist(x, y, ox, oy);
    let (ux, uy) = if d > 1e-12 {
        ((x - ox) / d, (y - oy) / d)
    } else {
        // Robot landed on the obstacle center; push it toward the field
        // center (or +x when the obstacle sits exactly there).
        let n = ox.hypot(oy);
        if n > 1e-12 {
            (-ox / n, -oy / n)
        } else {
            (1.0, 0.0)
        }
    };

    let radial = (ox + ux * min_d, oy + uy * min_d);
    if in_field(radial.0, radial.1) {
        return radial;
    }

    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |px: f64, py: f64| {
        if in_field(px, py) {
            let score = (px - x).powi(2) + (py - y).powi(2);
            if best.is_none_or(|(_, _, s)| score < s) {
                best = Some((px, py, score));
            }
        }
    };
    // Contact-circle / wall intersections.
    for wall in [-half, half] {
        let dx = wall - ox;
        if dx.abs() <= min_d {
            let dy = (min_d * min_d - dx * dx).sqrt();
            consider(wall, oy + dy);
            consider(wall, oy - dy);
        }
        let dy = wall - oy;
        if dy.abs() <= min_d {
            let dx = (min_d * min_d - dy * dy).sqrt();
            consider(ox + dx, wall);
            consider(ox - dx, wall);
        }
    }
    // Always-valid fallback: step off the obstacle toward the field center.
    if best.is_none() {
        let n = ox.hypot(oy);
        let (fx, fy) = if n > 1e-12 { (-ox / n, -oy / n) } else { (1.0, 0.0) };
        return (ox + fx * min_d, oy + fy * min_d);
    }
    let (bx, by, _) = best.unwrap();
    (bx, by)
}

/// Reward and termination for the state just produced by `apply_wheels`.
/// Reaching the goal dominates: a goal entry that also grazed the obstacle
/// still pays the goal reward.
pub fn step_outcome(
    state: &WorldState,
    collided_this_step: bool,
    cfg: &WorldConfig,
    td: &TdConfig,
) -> StepOutcome {
    let reached_goal = state.distance_to_goal(cfg) < cfg.goal_radius;
    let reward = if reached_goal {
        td.reward_goal
    } else if collided_this_step {
        td.penalty_collision
    } else {
        0.0
    };
    StepOutcome {
        reward,
        reached_goal,
        collided: collided_this_step,
        terminal: reached_goal || state.step >= cfg.max_steps,
    }
}
