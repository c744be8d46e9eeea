//! Causality traces: the per-connection memory that replaces external noise
//! in credit assignment.
//!
//! Each connection keeps a trace that takes in the presynaptic activation in
//! proportion to how much the postsynaptic output just changed, and decays by
//! the same amount:
//!
//! ```text
//! C_t = (1 - |dx_j|) * C_{t-1} + dx_j * x_i,    dx_j = x_{j,t} - x_{j,t-1}
//! ```
//!
//! A large output swing overwrites the trace with the current input; a quiet
//! output preserves it. Because activations live in [-0.5, 0.5], traces
//! started at zero can never leave that interval. The actor update is then
//! simply `w += eta * td_error * C` on the trained layers.

use crate::error::{Error, Result};
use crate::learning::TdConfig;
use crate::netcore::actor::ChaoticActor;
use crate::netcore::matrix::Matrix;

/// Traces for one weight layer (`n_post` outputs fed by `n_pre` inputs),
/// plus the previous postsynaptic activations needed to form `dx`.
#[derive(Debug, Clone)]
pub struct LayerTraces {
    c: Matrix, // n_post x n_pre, same shape as the layer's weights
    prev_post: Vec<f64>,
}

impl LayerTraces {
    pub fn new(n_post: usize, n_pre: usize) -> Self {
        LayerTraces {
            c: Matrix::zeros(n_post, n_pre),
            prev_post: vec![0.0; n_post],
        }
    }

    /// Zeroes traces and stored activations. Postsynaptic units are taken to
    /// start at activation 0, which matches a freshly reset network.
    pub fn reset(&mut self) {
        self.c.data_mut().fill(0.0);
        self.prev_post.fill(0.0);
    }

    pub fn traces(&self) -> &Matrix {
        &self.c
    }

    /// Advances every trace one step using the presynaptic activations `pre`
    /// and the new postsynaptic activations `post`.
    pub fn update(&mut self, pre: &[f64], post: &[f64]) -> Result<()> {
        if pre.len() != self.c.cols() {
            return Err(Error::DimensionMismatch {
                what: "trace presynaptic vector",
                expected: self.c.cols(),
                got: pre.len(),
            });
        }
        if post.len() != self.c.rows() {
            return Err(Error::DimensionMismatch {
                what: "trace postsynaptic vector",
                expected: self.c.rows(),
                got: post.len(),
            });
        }
        for j in 0..self.c.rows() {
            let dx = post[j] - self.prev_post[j];
            let decay = 1.0 - dx.abs();
            let row = self.c.row_mut(j);
            for (c, x) in row.iter_mut().zip(pre) {
                *c = decay * *c + dx * x;
            }
            self.prev_post[j] = post[j];
        }
        Ok(())
    }
}

/// The trace pair for a two-layer actor: input->hidden and hidden->output.
#[derive(Debug, Clone)]
pub struct CausalityTraces {
    input_hidden: LayerTraces,
    hidden_output: LayerTraces,
}

impl CausalityTraces {
    pub fn new(n_input: usize, n_hidden: usize, n_output: usize) -> Self {
        CausalityTraces {
            input_hidden: LayerTraces::new(n_hidden, n_input),
            hidden_output: LayerTraces::new(n_output, n_hidden),
        }
    }

    /// Traces shaped to match an actor's trained layers.
    pub fn for_actor(actor: &ChaoticActor) -> Self {
        CausalityTraces::new(actor.n_input(), actor.n_hidden(), actor.n_output())
    }

    /// Resets both layers; call at every episode boundary together with the
    /// actor reset, so credit never leaks across teleporting restarts.
    pub fn reset(&mut self) {
        self.input_hidden.reset();
        self.hidden_output.reset();
    }

    /// One trace step from the activations of the actor step just taken:
    /// the network input, the new hidden activations, and the new outputs.
    /// Presynaptic values are the current ones, as the rule prescribes.
    pub fn update(&mut self, input: &[f64], hidden: &[f64], output: &[f64]) -> Result<()> {
        self.input_hidden.update(input, hidden)?;
        self.hidden_output.update(hidden, output)
    }

    pub fn input_hidden(&self) -> &LayerTraces {
        &self.input_hidden
    }

    pub fn hidden_output(&self) -> &LayerTraces {
        &self.hidden_output
    }
}

/// Actor weight update: `w += eta_actor * td_error * C` on the input and
/// output layers. The feedback layer has no traces and is never touched.
pub fn apply_actor_update(
    actor: &mut ChaoticActor,
    traces: &CausalityTraces,
    td_error: f64,
    cfg: &TdConfig,
) -> Result<()> {
    if !td_error.is_finite() {
        return Err(Error::NonFinite { what: "td_error" });
    }
    let scale = cfg.eta_actor * td_error;
    let (w_in, w_out) = actor.trained_weights_mut();
    add_scaled(w_in, traces.input_hidden.traces(), scale, "actor input weights")?;
    add_scaled(w_out, traces.hidden_output.traces(), scale, "actor output weights")?;
    Ok(())
}

fn add_scaled(w: &mut Matrix, c: &Matrix, scale: f64, what: &'static str) -> Result<()> {
    if w.rows() != c.rows() || w.cols() != c.cols() {
        return Err(Error::DimensionMismatch {
            what,
            expected: w.rows() * w.cols(),
            got: c.rows() * c.cols(),
        });
    }
    for (w, c) in w.data_mut().iter_mut().zip(c.data()) {
        *w += scale * c;
    }
    Ok(())
}
