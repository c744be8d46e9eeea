//! Dynamics and learning diagnostics: the one-step Lyapunov exponent of the
//! actor's hidden dynamics, and learning-curve aggregation.

use std::f64::consts::FRAC_PI_2;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::env::{sense, WorldConfig, WorldState};
use crate::error::{Error, Result};
use crate::harness::rng::{stream, StreamDomain};
use crate::netcore::activation::SHIFTED_SIGMOID_SUP;
use crate::netcore::actor::ChaoticActor;

/// Trailing-window length for learning-curve smoothing.
pub const CURVE_WINDOW: usize = 100;

/// The eight compass points (E, NE, N, ... , SE) at the given radius; used
/// both as the Lyapunov probe grid and as canonical evaluation start sites.
pub fn compass_sites(radius: f64) -> Vec<(f64, f64)> {
    (0..8)
        .map(|k| {
            let a = k as f64 * std::f64::consts::FRAC_PI_4;
            (radius * a.cos(), radius * a.sin())
        })
        .collect()
}

/// Protocol parameters for [`one_step_lyapunov`].
///
/// The probe grid pairs each robot site with each obstacle site (8 x 8 = 64
/// placements); the robot always faces +y. For every placement the actor is
/// warmed up on that placement's (constant) sensor input, its hidden state is
/// duplicated, one copy is nudged by a random vector of norm `d_before`, and
/// both copies advance one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovConfig {
    /// Perturbation norm before the step.
    pub d_before: f64,
    /// 8 robot start positions.
    pub robot_sites: Vec<(f64, f64)>,
    /// 8 obstacle positions.
    pub obstacle_sites: Vec<(f64, f64)>,
    /// Seed for the perturbation directions (independent of training seeds).
    pub perturbation_seed: u64,
    /// Actor steps on the constant input before perturbing, to land the
    /// hidden state on its attractor.
    pub warmup_steps: u32,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            d_before: 1e-6,
            robot_sites: compass_sites(6.0),
            obstacle_sites: compass_sites(4.0),
            perturbation_seed: 0,
            warmup_steps: 100,
        }
    }
}

impl LyapunovConfig {
    pub fn validate(&self, world: &WorldConfig) -> Result<()> {
        if !self.d_before.is_finite() || self.d_before <= 0.0 {
            return Err(Error::invalid_config("d_before", "must be positive"));
        }
        for (field, sites) in [
            ("robot_sites", &self.robot_sites),
            ("obstacle_sites", &self.obstacle_sites),
        ] {
            if sites.len() != 8 {
                return Err(Error::InvalidConfig {
                    field,
                    reason: format!("expected 8 probe sites, got {}", sites.len()),
                });
            }
            if sites
                .iter()
                .any(|(x, y)| x.abs() > world.field_half || y.abs() > world.field_half)
            {
                return Err(Error::InvalidConfig {
                    field,
                    reason: "all probe sites must lie inside the field".into(),
                });
            }
        }
        Ok(())
    }
}

/// Result of a Lyapunov estimate: the mean of `ln(d_after / d_before)` over
/// the non-degenerate placements, plus how many were excluded because both
/// copies landed on exactly the same state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    pub n_degenerate: usize,
    pub n_total: usize,
}

/// Contribution of one perturbed/unperturbed pair; `None` marks a degenerate
/// pair whose post-step distance collapsed to exactly zero. An actor whose
/// step is the identity map gives `d_after == d0` and thus exactly 0.
fn pair_log_ratio(d0: f64, d_after: f64) -> Option<f64> {
    if d_after == 0.0 {
        None
    } else {
        Some((d_after / d0).ln())
    }
}

fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Estimates the one-step Lyapunov exponent of the actor's hidden dynamics
/// under frozen sensor input, averaged over the probe grid.
///
/// Perturbations are applied to the hidden activations and clipped back into
/// the activation range; the logged ratio uses the actual post-clip distance,
/// so clipping near saturation cannot inflate the estimate.
pub fn one_step_lyapunov(
    actor: &ChaoticActor,
    cfg: &LyapunovConfig,
    world_cfg: &WorldConfig,
) -> Result<LyapunovEstimate> {
    cfg.validate(world_cfg)?;
    world_cfg.validate()?;
    if actor.n_input() != world_cfg.input_len() {
        return Err(Error::DimensionMismatch {
            what: "actor input vs sensor size",
            expected: world_cfg.input_len(),
            got: actor.n_input(),
        });
    }
    let n_total = cfg.robot_sites.len() * cfg.obstacle_sites.len();
    let n_hidden = actor.n_hidden();
    let mut sum = 0.0;
    let mut n_used = 0;
    let mut n_degenerate = 0;

    for (i, &(rx, ry)) in cfg.robot_sites.iter().enumerate() {
        for (j, &(ox, oy)) in cfg.obstacle_sites.iter().enumerate() {
            let combo = (i * cfg.obstacle_sites.len() + j) as u64;
            let world = WorldState {
                robot_x: rx,
                robot_y: ry,
                heading: FRAC_PI_2,
                obstacle_x: ox,
                obstacle_y: oy,
                step: 0,
            };
            let input = sense(&world, world_cfg).to_input();

            let mut base = actor.clone();
            base.reset();
            for _ in 0..cfg.warmup_steps {
                base.step(&input)?;
            }
            let h = base.hidden().to_vec();

            let mut rng = stream(
                cfg.perturbation_seed,
                StreamDomain::LyapunovPerturbation,
                combo,
            );
            let mut direction = vec![0.0; n_hidden];
            let mut norm = 0.0;
            while norm == 0.0 {
                for v in direction.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            }
            let scale = cfg.d_before / norm;
            let perturbed: Vec<f64> = h
                .iter()
                .zip(&direction)
                .map(|(h, p)| (h + p * scale).clamp(-SHIFTED_SIGMOID_SUP, SHIFTED_SIGMOID_SUP))
                .collect();
            let d0 = euclidean_distance(&h, &perturbed);
            if d0 == 0.0 {
                n_degenerate += 1;
                continue;
            }

            let mut pert = base.clone();
            pert.set_hidden(&perturbed)?;
            base.step(&input)?;
            pert.step(&input)?;
            let d_after = euclidean_distance(base.hidden(), pert.hidden());
            match pair_log_ratio(d0, d_after) {
                Some(l) => {
                    sum += l;
                    n_used += 1;
                }
                None => n_degenerate += 1,
            }
        }
    }

    if n_used == 0 {
        return Err(Error::DegenerateLyapunov { total: n_total });
    }
    Ok(LyapunovEstimate {
        lambda: sum / n_used as f64,
        n_degenerate,
        n_total,
    })
}

/// Per-episode summary feeding the learning curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub steps: u32,
    pub reached: bool,
}

impl From<&crate::env::EpisodeLog> for EpisodeStats {
    fn from(log: &crate::env::EpisodeLog) -> Self {
        EpisodeStats {
            steps: log.len() as u32,
            reached: log.reached(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningCurvePoint {
    /// 1-based episode number.
    pub episode_index: u32,
    pub steps_to_goal: u32,
    /// Mean steps over the trailing [`CURVE_WINDOW`] episodes; present once
    /// that many episodes exist.
    pub window_mean: Option<f64>,
}

/// Learning curve: one point per episode with a trailing-window mean.
pub fn learning_curve(stats: &[EpisodeStats]) -> Vec<LearningCurvePoint> {
    let mut points = Vec::with_capacity(stats.len());
    // Integer window sum: no float drift over arbitrarily long runs.
    let mut window_sum: u64 = 0;
    for (idx, s) in stats.iter().enumerate() {
        window_sum += u64::from(s.steps);
        if idx >= CURVE_WINDOW {
            window_sum -= u64::from(stats[idx - CURVE_WINDOW].steps);
        }
        points.push(LearningCurvePoint {
            episode_index: idx as u32 + 1,
            steps_to_goal: s.steps,
            window_mean: (idx + 1 >= CURVE_WINDOW)
                .then(|| window_sum as f64 / CURVE_WINDOW as f64),
        });
    }
    points
}

/// CSV rendering of a learning curve; the window column is empty until the
/// window fills.
pub fn curve_to_csv(points: &[LearningCurvePoint]) -> String {
    let mut out = String::from("episode,steps,window_mean\n");
    for p in points {
        match p.window_mean {
            Some(m) => out.push_str(&format!("{},{},{}\n", p.episode_index, p.steps_to_goal, m)),
            None => out.push_str(&format!("{},{},\n", p.episode_index, p.steps_to_goal)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::actor::ActorInitConfig;
    use crate::netcore::matrix::Matrix;

    #[test]
    fn identity_step_gives_exactly_zero() {
        // d_after == d0: the pair contributes ln(1) = 0.
        assert_eq!(pair_log_ratio(1e-6, 1e-6), Some(0.0));
        assert_eq!(pair_log_ratio(1e-6, 0.0), None);
    }

    #[test]
    fn default_untrained_actor_is_chaotic() {
        let actor = ChaoticActor::new(0, &ActorInitConfig::default()).unwrap();
        let est = one_step_lyapunov(
            &actor,
            &LyapunovConfig::default(),
            &WorldConfig::default(),
        )
        .unwrap();
        assert_eq!(est.n_total, 64);
        assert!(est.lambda > 0.0, "lambda = {}", est.lambda);
    }

    #[test]
    fn zero_weight_actor_is_fully_degenerate() {
        let wcfg = WorldConfig::default();
        let n = wcfg.input_len();
        let actor = ChaoticActor::from_weights(
            Matrix::zeros(10, n),
            Matrix::zeros(10, 10),
            Matrix::zeros(2, 10),
        )
        .unwrap();
        let err = one_step_lyapunov(&actor, &LyapunovConfig::default(), &wcfg);
        match err {
            Err(Error::DegenerateLyapunov { total: 64 }) => {}
            other => panic!("expected fully degenerate estimate, got {other:?}"),
        }
    }

    #[test]
    fn estimate_is_locally_linear_in_perturbation_size() {
        let actor = ChaoticActor::new(1, &ActorInitConfig::default()).unwrap();
        let wcfg = WorldConfig::default();
        let base = LyapunovConfig::default();
        let smaller = LyapunovConfig {
            d_before: base.d_before / 10.0,
            ..base.clone()
        };
        let a = one_step_lyapunov(&actor, &base, &wcfg).unwrap();
        let b = one_step_lyapunov(&actor, &smaller, &wcfg).unwrap();
        assert!(
            (a.lambda - b.lambda).abs() < 0.1,
            "{} vs {}",
            a.lambda,
            b.lambda
        );
    }

    #[test]
    fn estimate_is_stable_across_perturbation_seeds() {
        let actor = ChaoticActor::new(2, &ActorInitConfig::default()).unwrap();
        let wcfg = WorldConfig::default();
        let a = one_step_lyapunov(&actor, &LyapunovConfig::default(), &wcfg).unwrap();
        let b = one_step_lyapunov(
            &actor,
            &LyapunovConfig {
                perturbation_seed: 1,
                ..LyapunovConfig::default()
            },
            &wcfg,
        )
        .unwrap();
        assert!(
            (a.lambda - b.lambda).abs() <= 0.2,
            "{} vs {}",
            a.lambda,
            b.lambda
        );
    }

    #[test]
    fn site_validation() {
        let wcfg = WorldConfig::default();
        let mut cfg = LyapunovConfig::default();
        cfg.robot_sites.pop();
        assert!(cfg.validate(&wcfg).is_err());
        let cfg = LyapunovConfig {
            obstacle_sites: vec![(0.0, 20.0); 8],
            ..LyapunovConfig::default()
        };
        assert!(cfg.validate(&wcfg).is_err());
        let cfg = LyapunovConfig {
            d_before: 0.0,
            ..LyapunovConfig::default()
        };
        assert!(cfg.validate(&wcfg).is_err());
    }

    fn stats(lengths: &[u32]) -> Vec<EpisodeStats> {
        lengths
            .iter()
            .map(|&steps| EpisodeStats {
                steps,
                reached: steps < 1000,
            })
            .collect()
    }

    #[test]
    fn curve_all_capped_episodes() {
        let s = stats(&[1000; 150]);
        let curve = learning_curve(&s);
        assert_eq!(curve.len(), 150);
        assert_eq!(curve[98].window_mean, None);
        for p in &curve[99..] {
            assert_eq!(p.window_mean, Some(1000.0));
        }
    }

    #[test]
    fn curve_window_mean_matches_arithmetic() {
        let lengths: Vec<u32> = (1..=200).collect();
        let curve = learning_curve(&stats(&lengths));
        // Window at episode 200 covers lengths 101..=200.
        assert_eq!(curve[199].window_mean, Some(150.5));
        assert_eq!(curve[99].window_mean, Some(50.5));
    }

    #[test]
    fn curve_single_episode_has_no_window() {
        let curve = learning_curve(&stats(&[123]));
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].episode_index, 1);
        assert_eq!(curve[0].steps_to_goal, 123);
        assert_eq!(curve[0].window_mean, None);
    }

    #[test]
    fn curve_window_matches_brute_force() {
        let lengths: Vec<u32> = (0..350).map(|i| (i * 37 % 900) as u32 + 1).collect();
        let s = stats(&lengths);
        let curve = learning_curve(&s);
        assert_eq!(curve.len(), s.len());
        for (idx, p) in curve.iter().enumerate() {
            if idx + 1 >= CURVE_WINDOW {
                let brute: f64 = s[idx + 1 - CURVE_WINDOW..=idx]
                    .iter()
                    .map(|e| e.steps as f64)
                    .sum::<f64>()
                    / CURVE_WINDOW as f64;
                let got = p.window_mean.unwrap();
                assert!((got - brute).abs() < 1e-9, "episode {}", p.episode_index);
            } else {
                assert_eq!(p.window_mean, None);
            }
        }
    }

    #[test]
    fn curve_csv_layout() {
        let s = stats(&[5, 7]);
        let csv = curve_to_csv(&learning_curve(&s));
        assert_eq!(csv, "episode,steps,window_mean\n1,5,\n2,7,\n");
    }
}
