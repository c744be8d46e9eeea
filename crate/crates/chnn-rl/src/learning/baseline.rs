//! The external-noise control: a plain feedforward actor that explores by
//! adding Gaussian noise to its outputs and learns from the noise/TD-error
//! correlation.
//!
//! This exists as a comparison against the chaotic actor, whose exploration
//! is internal. The update treats `td_error * noise_m` as the error signal at
//! output `m` and backpropagates it one step (no unrolling through time,
//! because the network has no recurrence to unroll).

use rand::Rng;

use crate::error::{Error, Result};
use crate::harness::rng::{stream, StreamDomain};
use crate::learning::TdConfig;
use crate::netcore::activation::Activation;
use crate::netcore::actor::ActorInitConfig;
use crate::netcore::matrix::{dot, Matrix};

/// Two-layer feedforward actor. Layer sizes and initialization mirror the
/// chaotic actor's trained layers; there is no feedback matrix, and
/// `feedback_gain` in the init config is ignored.
#[derive(Debug, Clone)]
pub struct FeedforwardActor {
    w_in: Matrix,  // n_hidden x n_input
    w_out: Matrix, // n_output x n_hidden
    hidden_act: Activation,
    output_act: Activation,
}

impl FeedforwardActor {
    pub fn new(seed: u64, cfg: &ActorInitConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = stream(seed, StreamDomain::ActorWeights, 0);
        let s = cfg.weight_scale;
        let w_in = Matrix::from_fn(cfg.n_hidden, cfg.n_input, |_, _| rng.random_range(-s..=s));
        let w_out = Matrix::from_fn(cfg.n_output, cfg.n_hidden, |_, _| rng.random_range(-s..=s));
        Ok(FeedforwardActor {
            w_in,
            w_out,
            hidden_act: Activation::ShiftedSigmoid,
            output_act: Activation::ShiftedSigmoid,
        })
    }

    /// Explicit construction, mostly for tests that need degenerate shapes
    /// or linear activations.
    pub fn from_weights(
        w_in: Matrix,
        w_out: Matrix,
        hidden_act: Activation,
        output_act: Activation,
    ) -> Result<Self> {
        if w_out.cols() != w_in.rows() {
            return Err(Error::DimensionMismatch {
                what: "feedforward layer sizes",
                expected: w_in.rows(),
                got: w_out.cols(),
            });
        }
        Ok(FeedforwardActor {
            w_in,
            w_out,
            hidden_act,
            output_act,
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

    pub fn w_in(&self) -> &Matrix {
        &self.w_in
    }

    pub fn w_out(&self) -> &Matrix {
        &self.w_out
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.n_input() {
            return Err(Error::DimensionMismatch {
                what: "actor input",
                expected: self.n_input(),
                got: input.len(),
            });
        }
        Ok(())
    }

    /// Deterministic forward pass; the caller adds exploration noise to the
    /// returned outputs if it wants any.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut hidden = vec![0.0; self.n_hidden()];
        for j in 0..self.n_hidden() {
            hidden[j] = self.hidden_act.apply(dot(self.w_in.row(j), input));
        }
        let mut out = vec![0.0; self.n_output()];
        for m in 0..self.n_output() {
            out[m] = self.output_act.apply(dot(self.w_out.row(m), &hidden));
        }
        Ok(out)
    }
}

/// Per-step baseline update: the error signal at output `m` is
/// `td_error * noise_m`, backpropagated one step through the activation
/// derivatives. Equivalently, `w += eta_actor * d/dw (sum_m e_m * y_m(w))`
/// evaluated at the current weights.
pub fn baseline_noise_update(
    actor: &mut FeedforwardActor,
    input: &[f64],
    noise: &[f64],
    td_error: f64,
    cfg: &TdConfig,
) -> Result<()> {
    actor.check_input(input)?;
    if noise.len() != actor.n_output() {
        return Err(Error::DimensionMismatch {
            what: "baseline noise",
            expected: actor.n_output(),
            got: noise.len(),
        });
    }
    if !td_error.is_finite() {
        return Err(Error::NonFinite { what: "td_error" });
    }

    // Recompute the forward pass: cheap, and it keeps this function free of
    // hidden state that could drift out of sync with the caller's.
    let n_h = actor.n_hidden();
    let n_o = actor.n_output();
    let mut u_hidden = vec![0.0; n_h];
    let mut hidden = vec![0.0; n_h];
    for j in 0..n_h {
        u_hidden[j] = dot(actor.w_in.row(j), input);
        hidden[j] = actor.hidden_act.apply(u_hidden[j]);
    }

    // Output-layer deltas, then the hidden deltas through the pre-update
    // output weights.
    let eta = cfg.eta_actor;
    let mut delta_out = vec![0.0; n_o];
    for m in 0..n_o {
        let u = dot(actor.w_out.row(m), &hidden);
        delta_out[m] = td_error * noise[m] * actor.output_act.derivative(u);
    }
    let mut delta_hidden = vec![0.0; n_h];
    for j in 0..n_h {
        let mut acc = 0.0;
        for m in 0..n_o {
            acc += delta_out[m] * actor.w_out.get(m, j);
        }
        delta_hidden[j] = acc * actor.hidden_act.derivative(u_hidden[j]);
    }

    for m in 0..n_o {
        let row = actor.w_out.row_mut(m);
        for (w, h) in row.iter_mut().zip(&hidden) {
            *w += eta * delta_out[m] * h;
        }
    }
    for j in 0..n_h {
        let row = actor.w_in.row_mut(j);
        for (w, x) in row.iter_mut().zip(input) {
            *w += eta * delta_hidden[j] * x;
        }
    }
    Ok(())
}

/// Executed action for the baseline: raw output plus noise, clipped back
/// into the wheel-command range the environment accepts.
pub fn noisy_action(raw: &[f64], noise: &[f64]) -> Vec<f64> {
    raw.iter()
        .zip(noise)
        .map(|(y, n)| (y + n).clamp(-0.5, 0.5))
        .collect()
}
