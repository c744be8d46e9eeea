//! Activation functions for the actor and critic networks.

use serde::{Deserialize, Serialize};

/// Largest f64 strictly below 0.5. The shifted sigmoid saturates to exactly
/// ±0.5 in floating point once |u| exceeds ~37; clamping to this bound keeps
/// activations strictly inside the open interval (-0.5, 0.5) for all finite
/// inputs, which downstream code (causality traces, Lyapunov perturbations)
/// relies on.
pub(crate) const SHIFTED_SIGMOID_SUP: f64 = f64::from_bits(0x3FDF_FFFF_FFFF_FFFF);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    /// `1 / (1 + e^-u) - 0.5`, range (-0.5, 0.5), zero-centered.
    ShiftedSigmoid,
    /// Identity, used for the critic's value output.
    Linear,
}

impl Activation {
    pub fn apply(self, u: f64) -> f64 {
        match self {
            Activation::ShiftedSigmoid => {
                let y = 1.0 / (1.0 + (-u).exp()) - 0.5;
                y.clamp(-SHIFTED_SIGMOID_SUP, SHIFTED_SIGMOID_SUP)
            }
            Activation::Linear => u,
        }
    }

    /// Derivative with respect to the pre-activation `u`.
    pub fn derivative(self, u: f64) -> f64 {
        match self {
            Activation::ShiftedSigmoid => {
                // With s = 1/(1+e^-u), the derivative is s(1-s); the -0.5
                // shift does not change it.
                let s = 1.0 / (1.0 + (-u).exp());
                s * (1.0 - s)
            }
            Activation::Linear => 1.0,
        }
    }
}
