//! Experiment harness: seeds, configuration, checkpoints, training and
//! evaluation drivers, replay, and run manifests.

pub mod checkpoint;
pub mod config;
pub mod evaluate;
pub mod manifest;
pub mod replay;
pub mod rng;
pub mod trainer;

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT_VERSION};
pub use config::{BaselineConfig, RunConfig};
pub use evaluate::{evaluate_checkpoint, EvalOutcome, EvalSummary};
pub use manifest::{RunManifest, SeedArtifacts, ARTIFACT_VERSION};
pub use replay::{render_svg, trajectory_csv};
pub use rng::{stream, StreamDomain};
pub use trainer::{read_seed_artifacts, train_run};
