//! Replaying episode logs into plot data: a trajectory CSV and an optional
//! SVG rendering. Both read only the log — no re-simulation happens here.

use crate::env::EpisodeLog;

/// One row per logged step: the robot position after that step's move.
pub fn trajectory_csv(log: &EpisodeLog) -> String {
    let mut out = String::from("step,x,y\n");
    for s in &log.steps {
        out.push_str(&format!("{},{},{}\n", s.step, s.robot_x, s.robot_y));
    }
    out
}

/// Renders the field, goal, obstacle, and trajectory polyline in field
/// coordinates. The drawing group is mirrored so +y points up as in the
/// simulation; all attribute values stay in field units.
pub fn render_svg(log: &EpisodeLog) -> String {
    let m = &log.meta;
    let h = m.field_half;
    let points: Vec<String> = log
        .steps
        .iter()
        .map(|s| format!("{},{}", s.robot_x, s.robot_y))
        .collect();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        -h - 0.5,
        -h - 0.5,
        2.0 * h + 1.0,
        2.0 * h + 1.0
    ));
    svg.push_str("<g transform=\"scale(1,-1)\">\n");
    svg.push_str(&format!(
        "<rect class=\"field\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"0.08\"/>\n",
        -h,
        -h,
        2.0 * h,
        2.0 * h
    ));
    svg.push_str(&format!(
        "<circle class=\"goal\" cx=\"{}\" cy=\"{}\" r=\"{}\" \
         fill=\"#9be29b\" stroke=\"#2c7a2c\" stroke-width=\"0.05\"/>\n",
        m.goal_x, m.goal_y, m.goal_radius
    ));
    svg.push_str(&format!(
        "<circle class=\"obstacle\" cx=\"{}\" cy=\"{}\" r=\"{}\" \
         fill=\"#bbbbbb\" stroke=\"#666666\" stroke-width=\"0.05\"/>\n",
        m.obstacle_x, m.obstacle_y, m.obstacle_radius
    ));
    svg.push_str(&format!(
        "<circle class=\"start\" cx=\"{}\" cy=\"{}\" r=\"{}\" \
         fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"0.05\"/>\n",
        m.start_x, m.start_y, m.robot_radius
    ));
    svg.push_str(&format!(
        "<polyline class=\"trajectory\" points=\"{}\" \
         fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"0.06\"/>\n",
        points.join(" ")
    ));
    svg.push_str("</g>\n</svg>\n");
    svg
}
