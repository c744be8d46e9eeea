//! Actor-critic reinforcement learning where exploration comes from the
//! actor's own chaotic recurrent dynamics instead of injected action noise.
//!
//! The crate is organized in layers:
//!
//! - [`netcore`]: the chaotic actor network, the value critic, and the small
//!   dense-matrix kernels they share.
//! - [`learning`]: causality traces, the TD(0) error, the trace-based actor
//!   update, and the noise-driven feedforward baseline.
//! - [`env`]: a differential-drive robot in a bounded field with a goal and
//!   an obstacle, sensed through coarse omnidirectional distance sensors,
//!   plus the episode loop tying actor, critic, and world together.
//! - [`analysis`]: one-step Lyapunov exponent estimation and learning-curve
//!   summaries.
//! - [`harness`]: seeded RNG streams, run configuration, checkpoints,
//!   training/evaluation drivers, trajectory replay, and run manifests.
//!
//! Everything is deterministic: a run is fully specified by its config and
//! master seed, and reruns produce byte-identical outputs.

pub mod analysis;
pub mod env;
pub mod error;
pub mod harness;
pub mod learning;
pub mod netcore;

pub use error::{Error, Result};
