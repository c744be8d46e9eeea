//! Command-line driver: training runs, checkpoint evaluation, Lyapunov
//! reports, log replay, and config printing.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O or data error,
//! 4 format-version mismatch, 1 anything else.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chnn_rl::analysis::one_step_lyapunov;
use chnn_rl::env::{EpisodeLog, Method};
use chnn_rl::harness::{
    evaluate_checkpoint, render_svg, train_run, trajectory_csv, Checkpoint, RunConfig,
};
use chnn_rl::{Error, Result};

/// Environment variable that overrides where outputs land, taking precedence
/// over the config file's `output_dir` (and the default eval output dir).
const OUTPUT_DIR_ENV: &str = "CHNN_RL_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "chnn-rl", version, about = "Chaotic-exploration RL simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full training job from a TOML config file.
    Train {
        /// Path to the run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a checkpoint from the canonical start sites plus random ones.
    Eval {
        /// Path to an actor checkpoint.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Number of random-placement episodes on top of the 8 canonical sites.
        #[arg(long, default_value_t = 20)]
        episodes: u64,
        /// Master seed for the random placements.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional config file supplying world/TD parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for logs, trajectory CSVs, and the summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the one-step Lyapunov exponent of a chaotic checkpoint.
    Lyapunov {
        /// Path to a chaotic-method actor checkpoint.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Optional config file supplying world/probe parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the one-row report CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-emit a logged episode as plot data without re-simulating.
    Replay {
        /// Path to a JSONL episode log.
        #[arg(long)]
        log: PathBuf,
        /// Also render the trajectory as an SVG to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Print the default configuration as TOML.
    PrintConfig,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig { .. }
        | Error::Toml { .. }
        | Error::DimensionMismatch { .. }
        | Error::UnsupportedCheckpoint { .. } => 2,
        Error::Io { .. } | Error::Json { .. } | Error::MalformedLog { .. } | Error::EmptyLog => 3,
        Error::VersionMismatch { .. } => 4,
        _ => 1,
    }
}

fn output_dir_override() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from)
}

fn load_run_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train { config } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(dir) = output_dir_override() {
                cfg.output_dir = dir;
            }
            let manifest = train_run(&cfg)?;
            println!(
                "trained {} seed(s) x {} episodes ({})",
                manifest.seeds.len(),
                manifest.episodes,
                manifest.method
            );
            println!(
                "manifest: {}",
                cfg.output_dir.join("manifest.json").display()
            );
            Ok(())
        }
        Command::Eval {
            checkpoint,
            episodes,
            seed,
            config,
            out,
        } => {
            let cfg = load_run_config(config.as_deref())?;
            let ckpt = Checkpoint::load(&checkpoint)?;
            let out_dir = out
                .or_else(output_dir_override)
                .unwrap_or_else(|| PathBuf::from("eval_out"));
            let outcome = evaluate_checkpoint(
                &ckpt,
                episodes,
                seed,
                &cfg.world,
                &cfg.td,
                Some(&out_dir),
            )?;
            println!(
                "episodes: {}  reach_rate: {}  mean_steps: {}  collisions: {}",
                outcome.logs.len(),
                outcome.summary.reach_rate,
                outcome.summary.mean_steps,
                outcome.summary.collision_count
            );
            println!("outputs: {}", out_dir.display());
            Ok(())
        }
        Command::Lyapunov {
            checkpoint,
            config,
            out,
        } => {
            let cfg = load_run_config(config.as_deref())?;
            let ckpt = Checkpoint::load(&checkpoint)?;
            if ckpt.method != Method::Chaotic {
                return Err(Error::UnsupportedCheckpoint {
                    kind: ckpt.method.to_string(),
                    what: "Lyapunov analysis of the hidden-state dynamics",
                });
            }
            let actor = ckpt.to_chaotic_actor()?;
            let est = one_step_lyapunov(&actor, &cfg.lyapunov, &cfg.world)?;
            let id = checkpoint
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "checkpoint".to_string());
            let csv = format!(
                "checkpoint_id,episode,lambda,n_degenerate\n{id},{},{},{}\n",
                ckpt.episode, est.lambda, est.n_degenerate
            );
            write_or_print(out.as_deref(), &csv)
        }
        Command::Replay { log, svg } => {
            let episode = EpisodeLog::load(&log)?;
            print!("{}", trajectory_csv(&episode));
            if let Some(svg_path) = svg {
                fs::write(&svg_path, render_svg(&episode))
                    .map_err(|e| Error::io(svg_path.display().to_string(), e))?;
            }
            Ok(())
        }
        Command::PrintConfig => {
            print!("{}", RunConfig::default().to_toml_string());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
