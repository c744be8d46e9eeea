//! Network cores: the chaotic actor, the value critic, and shared kernels.

pub mod activation;
pub mod actor;
pub mod critic;
pub mod matrix;

pub use activation::Activation;
pub use actor::{ActorInitConfig, ChaoticActor};
pub use critic::{CriticGradient, CriticInitConfig, CriticNet};
pub use matrix::Matrix;
