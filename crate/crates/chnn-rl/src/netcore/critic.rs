//! The state-value critic.
//!
//! A small feedforward network: shifted-sigmoid hidden layer, linear output.
//! It is trained by semi-gradient TD(0), so alongside evaluation it exposes
//! the exact gradient of the value with respect to every weight, both as an
//! explicit structure (for verification) and as a fused in-place update (for
//! the training loop).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::rng::{stream, StreamDomain};
use crate::netcore::activation::Activation;
use crate::netcore::matrix::{dot, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticInitConfig {
    pub n_input: usize,
    pub n_hidden: usize,
    /// Trained weights start uniform in `[-weight_scale, weight_scale]`.
    pub weight_scale: f64,
}

impl Default for CriticInitConfig {
    fn default() -> Self {
        CriticInitConfig {
            n_input: 144,
            n_hidden: 10,
            weight_scale: 0.3,
        }
    }
}

impl CriticInitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_input == 0 {
            return Err(Error::invalid_config("n_input", "must be at least 1"));
        }
        if self.n_hidden == 0 {
            return Err(Error::invalid_config("n_hidden", "must be at least 1"));
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

/// Gradient of the value output with respect to each weight, same shapes as
/// the weights themselves.
#[derive(Debug, Clone)]
pub struct CriticGradient {
    pub w_in: Matrix,
    pub w_out: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CriticNet {
    w_in: Matrix,    // n_hidden x n_input
    w_out: Vec<f64>, // n_hidden
}

impl CriticNet {
    pub fn new(seed: u64, cfg: &CriticInitConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = stream(seed, StreamDomain::CriticWeights, 0);
        let s = cfg.weight_scale;
        let w_in = Matrix::from_fn(cfg.n_hidden, cfg.n_input, |_, _| rng.random_range(-s..=s));
        let w_out = (0..cfg.n_hidden).map(|_| rng.random_range(-s..=s)).collect();
        Ok(CriticNet { w_in, w_out })
    }

    /// All-zero critic: evaluates to 0 everywhere. Used when replaying a
    /// trained actor without a value function.
    pub fn zeroed(n_input: usize, n_hidden: usize) -> Self {
        CriticNet {
            w_in: Matrix::zeros(n_hidden, n_input),
            w_out: vec![0.0; n_hidden],
        }
    }

    pub fn n_input(&self) -> usize {
        self.w_in.cols()
    }

    pub fn n_hidden(&self) -> usize {
        self.w_in.rows()
    }

    pub fn w_in(&self) -> &Matrix {
        &self.w_in
    }

    /// Mutable access to both weight layers, for gradient probing and tests.
    pub fn weights_mut(&mut self) -> (&mut Matrix, &mut [f64]) {
        (&mut self.w_in, &mut self.w_out)
    }

    pub fn w_out(&self) -> &[f64] {
        &self.w_out
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.n_input() {
            return Err(Error::DimensionMismatch {
                what: "critic input",
                expected: self.n_input(),
                got: input.len(),
            });
        }
        Ok(())
    }

    /// V(s): linear readout of the sigmoid hidden layer.
    pub fn value(&self, input: &[f64]) -> Result<f64> {
        self.check_input(input)?;
        let mut v = 0.0;
        for k in 0..self.n_hidden() {
            let u = dot(self.w_in.row(k), input);
            v += self.w_out[k] * Activation::ShiftedSigmoid.apply(u);
        }
        Ok(v)
    }

    /// Value plus the exact gradient dV/dw for every weight:
    /// dV/dw_out[k] = h_k and dV/dw_in[k][i] = w_out[k] * f'(u_k) * x_i.
    pub fn value_and_gradient(&self, input: &[f64]) -> Result<(f64, CriticGradient)> {
        self.check_input(input)?;
        let n_h = self.n_hidden();
        let mut grad_in = Matrix::zeros(n_h, self.n_input());
        let mut grad_out = vec![0.0; n_h];
        let mut v = 0.0;
        for k in 0..n_h {
            let u = dot(self.w_in.row(k), input);
            let h = Activation::ShiftedSigmoid.apply(u);
            v += self.w_out[k] * h;
            grad_out[k] = h;
            let coef = self.w_out[k] * Activation::ShiftedSigmoid.derivative(u);
            let row = grad_in.row_mut(k);
            for (g, x) in row.iter_mut().zip(input) {
                *g = coef * x;
            }
        }
        Ok((
            v,
            CriticGradient {
                w_in: grad_in,
                w_out: grad_out,
            },
        ))
    }

    /// In-place `w += scale * dV/dw`, evaluated at the current weights. The
    /// input-layer update is applied using the pre-update output weights, so
    /// the result equals adding `scale` times [`Self::value_and_gradient`].
    pub fn td_update(&mut self, input: &[f64], scale: f64) -> Result<()> {
        self.check_input(input)?;
        let n_h = self.n_hidden();
        for k in 0..n_h {
            let u = dot(self.w_in.row(k), input);
            let h = Activation::ShiftedSigmoid.apply(u);
            let coef = scale * self.w_out[k] * Activation::ShiftedSigmoid.derivative(u);
            let row = self.w_in.row_mut(k);
            for (w, x) in row.iter_mut().zip(input) {
                *w += coef * x;
            }
            self.w_out[k] += scale * h;
        }
        Ok(())
    }
}
