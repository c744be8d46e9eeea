//! Acceptance gate: every release-blocking property of the simulator, one
//! test per criterion, each printing a single `[acceptance] ...: PASS` line
//! with its key numbers (run with `-- --nocapture` to see them). A failed
//! criterion panics with a matching `FAIL` line.
//!
//! The heavyweight criteria (learning effect, Lyapunov trend, baseline
//! control) share full-scale training runs through `OnceLock`, so the whole
//! suite performs one 5-seed chaotic run and one 5-seed baseline run.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;

use chnn_rl::analysis::{one_step_lyapunov, LyapunovConfig};
use chnn_rl::env::{
    reset_episode, sense, step_outcome, Method, WorldConfig, WorldState,
};
use chnn_rl::harness::{
    evaluate_checkpoint, stream, train_run, Checkpoint, RunConfig, StreamDomain,
};
use chnn_rl::learning::traces::{apply_actor_update, CausalityTraces, LayerTraces};
use chnn_rl::learning::TdConfig;
use chnn_rl::netcore::{ActorInitConfig, ChaoticActor, CriticInitConfig, CriticNet};

/// Canonical start sites come first in evaluation logs; the rest are the
/// seeded random placements.
const N_EVAL_SITES: usize = 8;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Reads the per-episode steps column of a learning-curve CSV.
fn read_steps_column(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("episode,steps,window_mean"), "curve header in {path:?}");
    lines
        .map(|l| {
            let steps = l.split(',').nth(1).unwrap_or_else(|| panic!("short row in {path:?}"));
            steps.parse::<f64>().unwrap_or_else(|e| panic!("steps column in {path:?}: {e}"))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Criterion 1: trace algebra.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_trace_algebra() {
    let t0 = Instant::now();
    let mut rng = stream(0xACC1, StreamDomain::Noise, 0);

    // (a) The trace recurrence equals its unrolled closed form: summing each
    // step's deposit dx_t * pre_t,i attenuated by every later decay factor
    // (1 - |dx_s|). The oracle below accumulates in a different association
    // order, so agreement is to 1e-12 rather than bitwise.
    let mut max_unrolled_err = 0.0f64;
    for _ in 0..1000 {
        let n_pre = rng.random_range(1..=6);
        let n_post = rng.random_range(1..=6);
        let t_len = rng.random_range(1..=40);
        let mut lt = LayerTraces::new(n_post, n_pre);
        let mut pres: Vec<Vec<f64>> = Vec::with_capacity(t_len);
        let mut posts: Vec<Vec<f64>> = Vec::with_capacity(t_len);
        for _ in 0..t_len {
            let pre: Vec<f64> = (0..n_pre).map(|_| rng.random_range(-0.5..=0.5)).collect();
            let post: Vec<f64> = (0..n_post).map(|_| rng.random_range(-0.5..=0.5)).collect();
            lt.update(&pre, &post).unwrap();
            pres.push(pre);
            posts.push(post);
        }
        for j in 0..n_post {
            let mut dx = Vec::with_capacity(t_len);
            let mut prev = 0.0;
            for post in &posts {
                dx.push(post[j] - prev);
                prev = post[j];
            }
            for i in 0..n_pre {
                let mut c = 0.0;
                for t in 0..t_len {
                    let mut term = dx[t] * pres[t][i];
                    for &later in &dx[t + 1..] {
                        term *= 1.0 - later.abs();
                    }
                    c += term;
                }
                max_unrolled_err = max_unrolled_err.max((lt.traces().get(j, i) - c).abs());
            }
        }
    }
    assert!(
        max_unrolled_err <= 1e-12,
        "[acceptance] 1 trace algebra: FAIL — unrolled-oracle error {max_unrolled_err:.3e} > 1e-12"
    );

    // (b) Traces stay inside the activation range: |C| <= 0.5 at every step
    // of long random trajectories, because each update is a convex blend of
    // the old trace and a bounded deposit.
    for _ in 0..1000 {
        let n_pre = rng.random_range(1..=4);
        let n_post = rng.random_range(1..=4);
        let mut lt = LayerTraces::new(n_post, n_pre);
        for _ in 0..rng.random_range(1..=200usize) {
            let pre: Vec<f64> = (0..n_pre).map(|_| rng.random_range(-0.5..=0.5)).collect();
            let post: Vec<f64> = (0..n_post).map(|_| rng.random_range(-0.5..=0.5)).collect();
            lt.update(&pre, &post).unwrap();
            let worst = lt.traces().data().iter().fold(0.0f64, |m, c| m.max(c.abs()));
            assert!(
                worst <= 0.5,
                "[acceptance] 1 trace algebra: FAIL — |C| = {worst} escaped the 0.5 bound"
            );
        }
    }

    // (c) The weight update is linear in the TD error: sequential updates
    // add, and scaling the error scales the step.
    let icfg = ActorInitConfig {
        n_input: 4,
        n_hidden: 5,
        n_output: 2,
        feedback_gain: 1.0,
        weight_scale: 0.3,
    };
    let td = TdConfig::default();
    let weight_gap = |a: &ChaoticActor, b: &ChaoticActor| -> f64 {
        let gin = a
            .w_in()
            .data()
            .iter()
            .zip(b.w_in().data())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        a.w_out()
            .data()
            .iter()
            .zip(b.w_out().data())
            .fold(gin, |m, (x, y)| m.max((x - y).abs()))
    };
    let mut max_linearity_err = 0.0f64;
    for case in 0..1000u64 {
        let base = ChaoticActor::new(case, &icfg).unwrap();
        let mut traces = CausalityTraces::for_actor(&base);
        for _ in 0..3 {
            let input: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..=0.5)).collect();
            let hidden: Vec<f64> = (0..5).map(|_| rng.random_range(-0.5..=0.5)).collect();
            let output: Vec<f64> = (0..2).map(|_| rng.random_range(-0.5..=0.5)).collect();
            traces.update(&input, &hidden, &output).unwrap();
        }
        let a = rng.random_range(-1.0..=1.0);
        let b = rng.random_range(-1.0..=1.0);

        let mut sequential = base.clone();
        apply_actor_update(&mut sequential, &traces, a, &td).unwrap();
        apply_actor_update(&mut sequential, &traces, b, &td).unwrap();
        let mut combined = base.clone();
        apply_actor_update(&mut combined, &traces, a + b, &td).unwrap();
        max_linearity_err = max_linearity_err.max(weight_gap(&sequential, &combined));

        let mut once = base.clone();
        apply_actor_update(&mut once, &traces, a, &td).unwrap();
        let mut doubled = base.clone();
        apply_actor_update(&mut doubled, &traces, 2.0 * a, &td).unwrap();
        for ((w0, w1), w2) in base
            .w_in()
            .data()
            .iter()
            .chain(base.w_out().data())
            .zip(once.w_in().data().iter().chain(once.w_out().data()))
            .zip(doubled.w_in().data().iter().chain(doubled.w_out().data()))
        {
            max_linearity_err = max_linearity_err.max((2.0 * (w1 - w0) - (w2 - w0)).abs());
        }
    }
    assert!(
        max_linearity_err <= 1e-12,
        "[acceptance] 1 trace algebra: FAIL — linearity error {max_linearity_err:.3e} > 1e-12"
    );

    let dt = t0.elapsed().as_secs_f64();
    assert!(
        dt < 1.0,
        "[acceptance] 1 trace algebra: FAIL — took {dt:.2} s (budget 1 s)"
    );
    println!(
        "[acceptance] 1 trace algebra: PASS — unrolled err {max_unrolled_err:.2e}, \
         |C| <= 0.5, linearity err {max_linearity_err:.2e} (3x1000 cases, {dt:.2} s)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: critic gradient check.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_critic_gradient_check() {
    let t0 = Instant::now();
    let mut rng = stream(0xACC2, StreamDomain::Noise, 0);
    let h = 1e-5;
    let mut max_rel = 0.0f64;

    for net_seed in 0..100u64 {
        let cfg = CriticInitConfig {
            n_input: rng.random_range(3..=10),
            n_hidden: rng.random_range(1..=8),
            weight_scale: 0.5,
        };
        let mut net = CriticNet::new(net_seed, &cfg).unwrap();
        let input: Vec<f64> = (0..cfg.n_input).map(|_| rng.random_range(-0.5..=0.5)).collect();
        let (_, grad) = net.value_and_gradient(&input).unwrap();

        let n_in_weights = cfg.n_hidden * cfg.n_input;
        for idx in 0..n_in_weights + cfg.n_hidden {
            let backprop;
            let orig;
            if idx < n_in_weights {
                backprop = grad.w_in.data()[idx];
                orig = net.w_in().data()[idx];
                net.weights_mut().0.data_mut()[idx] = orig + h;
            } else {
                backprop = grad.w_out[idx - n_in_weights];
                orig = net.w_out()[idx - n_in_weights];
                net.weights_mut().1[idx - n_in_weights] = orig + h;
            }
            let v_plus = net.value(&input).unwrap();
            if idx < n_in_weights {
                net.weights_mut().0.data_mut()[idx] = orig - h;
            } else {
                net.weights_mut().1[idx - n_in_weights] = orig - h;
            }
            let v_minus = net.value(&input).unwrap();
            if idx < n_in_weights {
                net.weights_mut().0.data_mut()[idx] = orig;
            } else {
                net.weights_mut().1[idx - n_in_weights] = orig;
            }

            let fd = (v_plus - v_minus) / (2.0 * h);
            let rel = (backprop - fd).abs() / backprop.abs().max(fd.abs()).max(1e-8);
            max_rel = max_rel.max(rel);
        }
    }

    let dt = t0.elapsed().as_secs_f64();
    assert!(
        max_rel < 1e-5,
        "[acceptance] 2 critic gradient: FAIL — max relative error {max_rel:.3e} >= 1e-5"
    );
    assert!(
        dt < 5.0,
        "[acceptance] 2 critic gradient: FAIL — took {dt:.2} s (budget 5 s)"
    );
    println!(
        "[acceptance] 2 critic gradient: PASS — backprop vs central differences, \
         100 nets, max relative error {max_rel:.2e} ({dt:.2} s)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: chaos positivity of the untrained default actor.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_03_chaos_positivity() {
    let t0 = Instant::now();
    let world = WorldConfig::default();
    let lyap = LyapunovConfig::default();
    let mut lambdas = Vec::new();
    for seed in 0..10u64 {
        let actor = ChaoticActor::new(seed, &ActorInitConfig::default()).unwrap();
        let est = one_step_lyapunov(&actor, &lyap, &world).unwrap();
        assert!(
            est.lambda > 0.0,
            "[acceptance] 3 chaos positivity: FAIL — seed {seed} gave lambda {:.4} <= 0",
            est.lambda
        );
        lambdas.push(est.lambda);
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(
        dt < 10.0,
        "[acceptance] 3 chaos positivity: FAIL — took {dt:.2} s (budget 10 s)"
    );
    let lo = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "[acceptance] 3 chaos positivity: PASS — lambda > 0 on 10/10 untrained \
         default actors, range [{lo:.3}, {hi:.3}] ({dt:.2} s)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: byte-identical determinism of full training runs.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_04_determinism() {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |name: &str| -> PathBuf {
        let out = dir.path().join(name);
        let cfg = RunConfig {
            seeds: vec![0],
            episodes: 1000,
            checkpoint_every: 500,
            log_every: 250,
            output_dir: out.clone(),
            ..RunConfig::default()
        };
        train_run(&cfg).expect("training run");
        out.join("seed_0")
    };
    let a = run("a");
    let b = run("b");

    let names = |d: &Path| -> Vec<String> {
        let mut v: Vec<String> = fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    let files = names(&a);
    assert_eq!(
        files,
        names(&b),
        "[acceptance] 4 determinism: FAIL — the two runs wrote different file sets"
    );
    let mut total_bytes = 0usize;
    for f in &files {
        let x = fs::read(a.join(f)).unwrap();
        let y = fs::read(b.join(f)).unwrap();
        assert!(
            x == y,
            "[acceptance] 4 determinism: FAIL — {f} differs between identical runs"
        );
        total_bytes += x.len();
    }
    println!(
        "[acceptance] 4 determinism: PASS — two 1000-episode training runs with \
         identical config+seed produced byte-identical artifacts ({} files, {} bytes, \
         curves + checkpoints + step logs)",
        files.len(),
        total_bytes
    );
}

// ---------------------------------------------------------------------------
// Shared full-scale runs for criteria 5, 6, and 8.
// ---------------------------------------------------------------------------

struct SharedRun {
    // Keeps the temp directory alive for the whole test process.
    _dir: tempfile::TempDir,
    cfg: RunConfig,
}

impl SharedRun {
    fn seed_dir(&self, seed: u64) -> PathBuf {
        self.cfg.output_dir.join(format!("seed_{seed}"))
    }
}

fn full_run(method: Method) -> SharedRun {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = RunConfig {
        method,
        seeds: vec![0, 1, 2, 3, 4],
        episodes: 3000,
        checkpoint_every: 1000,
        log_every: 3000,
        output_dir: dir.path().join("run"),
        ..RunConfig::default()
    };
    train_run(&cfg).expect("full-scale training run");
    SharedRun { _dir: dir, cfg }
}

fn chaotic_run() -> &'static SharedRun {
    static RUN: OnceLock<SharedRun> = OnceLock::new();
    RUN.get_or_init(|| full_run(Method::Chaotic))
}

fn baseline_run() -> &'static SharedRun {
    static RUN: OnceLock<SharedRun> = OnceLock::new();
    RUN.get_or_init(|| full_run(Method::Baseline))
}

// ---------------------------------------------------------------------------
// Criterion 5: the learning effect at full scale.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_05_learning_effect() {
    let run = chaotic_run();
    let mut passing = 0;
    let mut detail = Vec::new();
    for &seed in &run.cfg.seeds {
        let steps = read_steps_column(&run.seed_dir(seed).join("learning_curve.csv"));
        assert_eq!(steps.len(), 3000);
        let first = mean(&steps[..100]);
        let last = mean(&steps[steps.len() - 100..]);

        let ckpt = Checkpoint::load(&run.seed_dir(seed).join("checkpoint_ep3000.json")).unwrap();
        let eval =
            evaluate_checkpoint(&ckpt, 20, 7, &run.cfg.world, &run.cfg.td, None).unwrap();
        let random_logs = &eval.logs[N_EVAL_SITES..];
        let reach = random_logs.iter().filter(|l| l.reached()).count() as f64
            / random_logs.len() as f64;

        let ok = last < 0.6 * first && reach >= 0.7;
        passing += usize::from(ok);
        detail.push(format!(
            "s{seed} {first:.0}->{last:.0} r={:.2} reach={reach:.2}",
            last / first
        ));
    }
    assert!(
        passing >= 4,
        "[acceptance] 5 learning effect: FAIL — only {passing}/5 seeds cut mean \
         steps below 60% and reached >= 0.7 from random starts [{}]",
        detail.join("; ")
    );
    println!(
        "[acceptance] 5 learning effect: PASS — {passing}/5 seeds, 3000 episodes each: \
         final-100 mean < 60% of first-100 and random-start reach >= 0.7 [{}]",
        detail.join("; ")
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: the Lyapunov exponent stays positive and trends down.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_lyapunov_trend() {
    let run = chaotic_run();
    let seed_dir = run.seed_dir(run.cfg.seeds[0]);
    let mut averaged = Vec::new();
    for ep in [0u64, 1000, 2000, 3000] {
        let ckpt = Checkpoint::load(&seed_dir.join(format!("checkpoint_ep{ep}.json"))).unwrap();
        let actor = ckpt.to_chaotic_actor().unwrap();
        let mut sum = 0.0;
        for pert_seed in 0..3u64 {
            let cfg = LyapunovConfig {
                perturbation_seed: pert_seed,
                ..LyapunovConfig::default()
            };
            sum += one_step_lyapunov(&actor, &cfg, &run.cfg.world).unwrap().lambda;
        }
        averaged.push(sum / 3.0);
    }
    for (i, &l) in averaged.iter().enumerate() {
        assert!(
            l > 0.0,
            "[acceptance] 6 lyapunov trend: FAIL — checkpoint {i} has lambda {l:.4} <= 0"
        );
        if i > 0 {
            assert!(
                l <= averaged[i - 1] + 0.1,
                "[acceptance] 6 lyapunov trend: FAIL — lambda rose {:.4} -> {l:.4}, \
                 beyond the 0.1 slack",
                averaged[i - 1]
            );
        }
    }
    let pretty: Vec<String> = averaged.iter().map(|l| format!("{l:.3}")).collect();
    println!(
        "[acceptance] 6 lyapunov trend: PASS — lambda over episodes 0/1000/2000/3000 \
         = [{}] (each a 3-perturbation-seed average): all > 0, non-increasing \
         within 0.1 slack",
        pretty.join(", ")
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: environment invariants under a 10000-episode fuzz.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_07_environment_fuzz() {
    let cfg = WorldConfig::default();
    let td = TdConfig::default();
    let n = cfg.sensor_cells;
    let delta = TAU / n as f64;
    let mut reached = 0u64;
    let mut min_clearance = f64::INFINITY;

    for ep in 0..10_000u64 {
        let mut place = stream(0xACC7, StreamDomain::Placement, ep);
        let mut fuzz = stream(0xACC7, StreamDomain::Noise, ep);
        let mut s = reset_episode(&mut place, &cfg).unwrap();

        // Drive with uniformly random wheel commands until the episode ends.
        loop {
            let l = fuzz.random_range(-0.5..=0.5);
            let r = fuzz.random_range(-0.5..=0.5);
            let collided = s.apply_wheels(l, r, &cfg).unwrap();
            let clearance = s.distance_to_obstacle();
            min_clearance = min_clearance.min(clearance);
            assert!(
                clearance >= cfg.min_separation() - 1e-9,
                "[acceptance] 7 environment fuzz: FAIL — episode {ep} step {} \
                 penetrated the obstacle (distance {clearance})",
                s.step
            );
            let out = step_outcome(&s, collided, &cfg, &td);
            if out.terminal {
                reached += u64::from(out.reached_goal);
                break;
            }
        }
        assert!(
            (1..=cfg.max_steps).contains(&s.step),
            "[acceptance] 7 environment fuzz: FAIL — episode {ep} length {} out of [1, {}]",
            s.step,
            cfg.max_steps
        );

        // Ring separation: moving one object never touches the other ring.
        let img = sense(&s, &cfg);
        let moved_obstacle = WorldState {
            obstacle_x: fuzz.random_range(-10.0..=10.0),
            obstacle_y: fuzz.random_range(-10.0..=10.0),
            ..s
        };
        assert!(
            sense(&moved_obstacle, &cfg).goal_cells == img.goal_cells,
            "[acceptance] 7 environment fuzz: FAIL — episode {ep}: moving the \
             obstacle changed the goal ring"
        );
        let moved_goal = WorldConfig {
            goal_center: (fuzz.random_range(-10.0..=10.0), fuzz.random_range(-10.0..=10.0)),
            ..cfg
        };
        assert!(
            sense(&s, &moved_goal).obstacle_cells == img.obstacle_cells,
            "[acceptance] 7 environment fuzz: FAIL — episode {ep}: moving the \
             goal changed the obstacle ring"
        );

        // Rotational equivariance: turning in place by m cell widths rotates
        // both rings by exactly m cells.
        let m = fuzz.random_range(1..n);
        let turned = WorldState {
            heading: s.heading + m as f64 * delta,
            ..s
        };
        let rotated = sense(&turned, &cfg);
        for k in 0..n {
            assert!(
                rotated.goal_cells[k] == img.goal_cells[(k + m) % n]
                    && rotated.obstacle_cells[k] == img.obstacle_cells[(k + m) % n],
                "[acceptance] 7 environment fuzz: FAIL — episode {ep}: a {m}-cell \
                 turn did not rotate the rings by {m} cells (cell {k})"
            );
        }
    }

    println!(
        "[acceptance] 7 environment fuzz: PASS — 10000 random-drive episodes: no \
         obstacle penetration (min clearance {min_clearance:.6}), lengths in [1, 1000], \
         ring separation and cell-width rotation equivariance exact ({reached} \
         episodes hit the goal by chance)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: the external-noise baseline also improves.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_baseline_improves() {
    let run = baseline_run();
    let mut improved = 0;
    let mut detail = Vec::new();
    for &seed in &run.cfg.seeds {
        let steps = read_steps_column(&run.seed_dir(seed).join("learning_curve.csv"));
        assert_eq!(steps.len(), 3000);
        let first = mean(&steps[..100]);
        let last = mean(&steps[steps.len() - 100..]);
        improved += usize::from(last < first);
        detail.push(format!("s{seed} {first:.0}->{last:.0}"));
    }
    assert!(
        improved >= 3,
        "[acceptance] 8 baseline control: FAIL — only {improved}/5 noise-baseline \
         seeds improved [{}]",
        detail.join("; ")
    );
    println!(
        "[acceptance] 8 baseline control: PASS — {improved}/5 seeds of the external-noise \
         baseline lowered final-100 mean steps below first-100 [{}]",
        detail.join("; ")
    );
}
