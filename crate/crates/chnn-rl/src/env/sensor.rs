//! Omnidirectional object sensors.
//!
//! Two independent rings of cells, one tuned to the goal and one to the
//! obstacle. Each ring divides the full circle (in the robot's heading
//! frame) into equal cells; cell 0 is centered dead ahead. The sensed object
//! activates every cell its disc overlaps, all at the same strength
//! `0.5 * (1 - d / D_max)` where `d` is the center distance and `D_max` the
//! field diagonal — closer means stronger, and everything stays inside the
//! network input range [0, 0.5].

use std::f64::consts::{PI, TAU};

use crate::env::{WorldConfig, WorldState};

#[derive(Debug, Clone, PartialEq)]
pub struct SensorImage {
    pub goal_cells: Vec<f64>,
    pub obstacle_cells: Vec<f64>,
}

impl SensorImage {
    /// Concatenated network input: goal ring first, then obstacle ring.
    pub fn to_input(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.goal_cells.len() + self.obstacle_cells.len());
        v.extend_from_slice(&self.goal_cells);
        v.extend_from_slice(&self.obstacle_cells);
        v
    }
}

/// Reads both sensor rings for the current pose.
pub fn sense(state: &WorldState, cfg: &WorldConfig) -> SensorImage {
    let (gx, gy) = cfg.goal_center;
    SensorImage {
        goal_cells: scan(state, cfg, gx, gy, cfg.goal_radius),
        obstacle_cells: scan(state, cfg, state.obstacle_x, state.obstacle_y, cfg.obstacle_radius),
    }
}

fn scan(state: &WorldState, cfg: &WorldConfig, tx: f64, ty: f64, radius: f64) -> Vec<f64> {
    let n = cfg.sensor_cells;
    let mut cells = vec![0.0; n];
    let dx = tx - state.robot_x;
    let dy = ty - state.robot_y;
    let d = dx.hypot(dy);
    let value = 0.5 * (1.0 - d / cfg.sensor_range()).max(0.0);
    if value == 0.0 {
        return cells;
    }
    // Robot center on or inside the object disc: the object fills the whole
    // view (and d = 0 exactly is defined as full-arc at full strength).
    if d <= radius {
        cells.fill(value);
        return cells;
    }

    let half_angle = (radius / d).asin();
    let bearing = dy.atan2(dx) - state.heading;
    let delta = TAU / n as f64;
    // A cell is active when its [center - delta/2, center + delta/2) span
    // overlaps the object's arc [bearing - half_angle, bearing + half_angle]:
    // equivalently, when the circular distance from cell center to bearing
    // is below the sum of the half-widths.
    let reach = half_angle + 0.5 * delta;
    for (k, cell) in cells.iter_mut().enumerate() {
        let mut diff = (k as f64 * delta - bearing).rem_euclid(TAU);
        if diff > PI {
            diff -= TAU;
        }
        if diff.abs() < reach {
            *cell = value;
        }
    }
    cells
}
