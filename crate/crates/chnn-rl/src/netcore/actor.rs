//! The chaotic actor network.
//!
//! A two-layer network whose hidden layer feeds back onto itself through a
//! fixed random matrix. With a large enough feedback gain the hidden state
//! wanders chaotically even under constant input, and that internal
//! itinerancy is the only source of exploration during learning: no noise is
//! ever added to the action outputs. Only the input and output weights are
//! trained; the feedback weights stay frozen at initialization.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::rng::{stream, StreamDomain};
use crate::netcore::activation::Activation;
use crate::netcore::matrix::Matrix;

/// Shape and initialization parameters for [`ChaoticActor::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActorInitConfig {
    pub n_input: usize,
    pub n_hidden: usize,
    pub n_output: usize,
    /// Gain of the fixed hidden-to-hidden feedback. Entries are drawn from
    /// a Gaussian with standard deviation `feedback_gain / sqrt(n_hidden)`.
    /// Zero gives a degenerate, feedback-free network (useful in tests);
    /// negative values are rejected.
    pub feedback_gain: f64,
    /// Half-width of the uniform range for trained weights: each entry of
    /// the input and output layers starts in `[-weight_scale, weight_scale]`.
    pub weight_scale: f64,
}

impl Default for ActorInitConfig {
    fn default() -> Self {
        ActorInitConfig {
            n_input: 144,
            n_hidden: 100,
            n_output: 2,
            feedback_gain: 8.0,
            weight_scale: 0.3,
        }
    }
}

impl ActorInitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_input == 0 {
            return Err(Error::invalid_config("n_input", "must be at least 1"));
        }
        if self.n_hidden == 0 {
            return Err(Error::invalid_config("n_hidden", "must be at least 1"));
        }
        if self.n_output == 0 {
            return Err(Error::invalid_config("n_output", "must be at least 1"));
        }
        if !self.feedback_gain.is_finite() || self.feedback_gain < 0.0 {
            return Err(Error::invalid_config(
                "feedback_gain",
                format!("must be finite and non-negative, got {}", self.feedback_gain),
            ));
        }
        if !self.weight_scale.is_finite() || self.weight_scale <= 0.0 {
            return Err(Error::invalid_config(
                "weight_scale",
                format!("must be finite and positive, got {}", self.weight_scale),
            ));
        }
        Ok(())
    }
}

/// Recurrent actor with trained input/output layers and a fixed chaotic
/// feedback layer. All units use the shifted sigmoid, so hidden and output
/// activations stay strictly inside (-0.5, 0.5).
#[derive(Debug, Clone)]
pub struct ChaoticActor {
    w_in: Matrix,  // n_hidden x n_input, trained
    w_fb: Matrix,  // n_hidden x n_hidden, frozen
    w_out: Matrix, // n_output x n_hidden, trained
    hidden: Vec<f64>,
    potential: Vec<f64>,
}

impl ChaoticActor {
    /// Initializes from the weight-init stream of `seed`. Identical
    /// `(seed, cfg)` pairs produce identical networks.
    pub fn new(seed: u64, cfg: &ActorInitConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = stream(seed, StreamDomain::ActorWeights, 0);
        let s = cfg.weight_scale;
        let w_in = Matrix::from_fn(cfg.n_hidden, cfg.n_input, |_, _| rng.random_range(-s..=s));
        let w_out = Matrix::from_fn(cfg.n_output, cfg.n_hidden, |_, _| rng.random_range(-s..=s));
        let fb_std = cfg.feedback_gain / (cfg.n_hidden as f64).sqrt();
        let w_fb = if fb_std == 0.0 {
            Matrix::zeros(cfg.n_hidden, cfg.n_hidden)
        } else {
            let normal = Normal::new(0.0, fb_std).expect("validated std");
            Matrix::from_fn(cfg.n_hidden, cfg.n_hidden, |_, _| normal.sample(&mut rng))
        };
        Ok(ChaoticActor {
            hidden: vec![0.0; cfg.n_hidden],
            potential: vec![0.0; cfg.n_hidden],
            w_in,
            w_fb,
            w_out,
        })
    }

    /// Rebuilds an actor from explicit weights (e.g. a loaded checkpoint).
    pub fn from_weights(w_in: Matrix, w_fb: Matrix, w_out: Matrix) -> Result<Self> {
        let n_hidden = w_in.rows();
        if w_fb.rows() != n_hidden || w_fb.cols() != n_hidden {
            return Err(Error::DimensionMismatch {
                what: "feedback weights",
                expected: n_hidden,
                got: w_fb.rows().max(w_fb.cols()),
            });
        }
        if w_out.cols() != n_hidden {
            return Err(Error::DimensionMismatch {
                what: "output weights",
                expected: n_hidden,
                got: w_out.cols(),
            });
        }
        if n_hidden == 0 || w_in.cols() == 0 || w_out.rows() == 0 {
            return Err(Error::invalid_config("weights", "zero-sized layer"));
        }
        if [&w_in, &w_fb, &w_out]
            .iter()
            .any(|m| !m.data().iter().all(|v| v.is_finite()))
        {
            return Err(Error::NonFinite {
                what: "actor weights",
            });
        }
        Ok(ChaoticActor {
            hidden: vec![0.0; n_hidden],
            potential: vec![0.0; n_hidden],
            w_in,
            w_fb,
            w_out,
        })
    }

    pub fn n_input(&self) -> usize {
        self.w_in.cols()
    }

    pub fn n_hidden(&self) -> usize {
        self.w_in.rows()
    }

    pub fn n_output(&self) -> usize {
        self.w_out.rows()
    }

    /// Zeroes the hidden state. Called at episode boundaries so every
    /// episode's dynamics depend only on that episode's inputs.
    pub fn reset(&mut self) {
        self.hidden.fill(0.0);
        self.potential.fill(0.0);
    }

    /// One synchronous update: hidden potentials from input and previous
    /// hidden state, then the new output. Returns the action vector.
    pub fn step(&mut self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.n_input() {
            return Err(Error::DimensionMismatch {
                what: "actor input",
                expected: self.n_input(),
                got: input.len(),
            });
        }
        for j in 0..self.n_hidden() {
            self.potential[j] = crate::netcore::matrix::dot(self.w_in.row(j), input)
                + crate::netcore::matrix::dot(self.w_fb.row(j), &self.hidden);
        }
        for j in 0..self.n_hidden() {
            self.hidden[j] = Activation::ShiftedSigmoid.apply(self.potential[j]);
        }
        let mut output = vec![0.0; self.n_output()];
        for m in 0..self.n_output() {
            output[m] = Activation::ShiftedSigmoid
                .apply(crate::netcore::matrix::dot(self.w_out.row(m), &self.hidden));
        }
        Ok(output)
    }

    pub fn hidden(&self) -> &[f64] {
        &self.hidden
    }

    /// Overwrites the hidden state, e.g. with a perturbed copy for
    /// sensitivity analysis. Values must respect the activation range.
    pub fn set_hidden(&mut self, hidden: &[f64]) -> Result<()> {
        if hidden.len() != self.n_hidden() {
            return Err(Error::DimensionMismatch {
                what: "hidden state",
                expected: self.n_hidden(),
                got: hidden.len(),
            });
        }
        if !hidden.iter().all(|v| v.is_finite() && v.abs() < 0.5) {
            return Err(Error::NonFinite {
                what: "hidden state outside activation range",
            });
        }
        self.hidden.copy_from_slice(hidden);
        Ok(())
    }

    pub fn w_in(&self) -> &Matrix {
        &self.w_in
    }

    pub fn w_fb(&self) -> &Matrix {
        &self.w_fb
    }

    pub fn w_out(&self) -> &Matrix {
        &self.w_out
    }

    /// Mutable access to the trained layers, in (input, output) order. The
    /// feedback layer is deliberately not exposed: it never changes after
    /// initialization.
    pub fn trained_weights_mut(&mut self) -> (&mut Matrix, &mut Matrix) {
        (&mut self.w_in, &mut self.w_out)
    }
}
