//! Versioned actor checkpoints.
//!
//! A checkpoint captures everything needed to rebuild an actor exactly:
//! layer sizes, the three weight matrices as row-major arrays (the feedback
//! matrix is empty for the feedforward baseline), the activation kind, and
//! the seed/episode provenance. Floats are written in shortest round-trip
//! decimal form, so save -> load -> save is byte-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::Method;
use crate::error::{Error, Result};
use crate::learning::baseline::FeedforwardActor;
use crate::netcore::{Activation, ChaoticActor, Matrix};

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format_version: u32,
    /// Which trainer wrote this (decides how the weights are wired back up).
    pub method: Method,
    /// Training episodes completed when the snapshot was taken.
    pub episode: u64,
    /// Master seed the weights were initialized from.
    pub init_seed: u64,
    pub n_input: usize,
    pub n_hidden: usize,
    pub n_output: usize,
    pub activation_kind: Activation,
    /// Row-major `n_hidden x n_input`.
    pub w_in: Vec<f64>,
    /// Row-major `n_hidden x n_hidden`; empty for the baseline method.
    pub w_fb: Vec<f64>,
    /// Row-major `n_output x n_hidden`.
    pub w_out: Vec<f64>,
}

impl Checkpoint {
    pub fn from_chaotic(actor: &ChaoticActor, episode: u64, init_seed: u64) -> Self {
        Checkpoint {
            format_version: CHECKPOINT_FORMAT_VERSION,
            method: Method::Chaotic,
            episode,
            init_seed,
            n_input: actor.n_input(),
            n_hidden: actor.n_hidden(),
            n_output: actor.n_output(),
            activation_kind: Activation::ShiftedSigmoid,
            w_in: actor.w_in().data().to_vec(),
            w_fb: actor.w_fb().data().to_vec(),
            w_out: actor.w_out().data().to_vec(),
        }
    }

    pub fn from_baseline(actor: &FeedforwardActor, episode: u64, init_seed: u64) -> Self {
        Checkpoint {
            format_version: CHECKPOINT_FORMAT_VERSION,
            method: Method::Baseline,
            episode,
            init_seed,
            n_input: actor.n_input(),
            n_hidden: actor.n_hidden(),
            n_output: actor.n_output(),
            activation_kind: Activation::ShiftedSigmoid,
            w_in: actor.w_in().data().to_vec(),
            w_fb: Vec::new(),
            w_out: actor.w_out().data().to_vec(),
        }
    }

    fn check_dims(&self) -> Result<()> {
        let expect = |what, expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    what,
                    expected,
                    got,
                })
            }
        };
        expect(
            "checkpoint w_in length",
            self.n_hidden * self.n_input,
            self.w_in.len(),
        )?;
        expect(
            "checkpoint w_out length",
            self.n_output * self.n_hidden,
            self.w_out.len(),
        )?;
        let fb_expected = match self.method {
            Method::Chaotic => self.n_hidden * self.n_hidden,
            Method::Baseline => 0,
        };
        expect("checkpoint w_fb length", fb_expected, self.w_fb.len())?;
        Ok(())
    }

    /// Rebuilds the chaotic actor, hidden state freshly reset.
    pub fn to_chaotic_actor(&self) -> Result<ChaoticActor> {
        if self.method != Method::Chaotic {
            return Err(Error::UnsupportedCheckpoint {
                kind: self.method.to_string(),
                what: "rebuilding a chaotic actor",
            });
        }
        self.check_dims()?;
        ChaoticActor::from_weights(
            Matrix::from_vec(self.n_hidden, self.n_input, self.w_in.clone())?,
            Matrix::from_vec(self.n_hidden, self.n_hidden, self.w_fb.clone())?,
            Matrix::from_vec(self.n_output, self.n_hidden, self.w_out.clone())?,
        )
    }

    /// Rebuilds the feedforward baseline actor.
    pub fn to_feedforward_actor(&self) -> Result<FeedforwardActor> {
        if self.method != Method::Baseline {
            return Err(Error::UnsupportedCheckpoint {
                kind: self.method.to_string(),
                what: "rebuilding a feedforward actor",
            });
        }
        self.check_dims()?;
        FeedforwardActor::from_weights(
            Matrix::from_vec(self.n_hidden, self.n_input, self.w_in.clone())?,
            Matrix::from_vec(self.n_output, self.n_hidden, self.w_out.clone())?,
            self.activation_kind,
            self.activation_kind,
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_str(text).map_err(|e| Error::Json {
            what: "checkpoint".to_string(),
            source: e,
        })?;
        if ckpt.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                what: "checkpoint",
                expected: CHECKPOINT_FORMAT_VERSION,
                got: ckpt.format_version,
            });
        }
        ckpt.check_dims()?;
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }
}
