//! Baseband impairment simulator between transmitter and receiver blocks.
//!
//! Per block: draw an opportunity-drop coin, a fading coefficient `h`
//! (constant across the block), and per-symbol complex Gaussian noise.
//! The receiver output is genie-equalized (`y / h`), optionally scaled by
//! a residual estimation-error factor. SNR is referenced to unit primary
//! symbol energy, so covert amplitude scaling eats into the instantaneous
//! SNR of scaled symbols by design.

use crate::constellation::IqSymbol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fading {
    None,
    /// One complex Gaussian coefficient per block, E|h|^2 = 1.
    RayleighBlock,
    /// Line-of-sight component plus scattered power, ratio `k_factor`.
    RicianBlock { k_factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseOffset {
    None,
    UniformRandomPerBlock,
}

/// Channel parameters. `snr_db = None` disables noise entirely (an ideal
/// channel), since JSON has no infinity literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default = "default_fading")]
    pub fading: Fading,
    #[serde(default = "default_phase")]
    pub phase_offset: PhaseOffset,
    /// i.i.d. probability that a whole opportunity is dropped.
    #[serde(default)]
    pub loss: f64,
    /// Multiplicative equalizer residual: output scaled by (1 + est_error).
    #[serde(default)]
    pub est_error: f64,
}

fn default_fading() -> Fading {
    Fading::None
}

fn default_phase() -> PhaseOffset {
    PhaseOffset::None
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            snr_db: None,
            fading: Fading::None,
            phase_offset: PhaseOffset::None,
            loss: 0.0,
            est_error: 0.0,
        }
    }
}

impl ChannelModel {
    /// Total complex noise variance relative to unit symbol energy.
    pub fn noise_variance(&self) -> f64 {
        match self.snr_db {
            Some(snr) => 10f64.powf(-snr / 10.0),
            None => 0.0,
        }
    }
}

/// A channel instance owning its RNG substream.
pub struct Channel {
    model: ChannelModel,
    rng: ChaCha8Rng,
}

impl Channel {
    pub fn new(model: ChannelModel, rng: ChaCha8Rng) -> Self {
        Self { model, rng }
    }

    pub fn from_seed(model: ChannelModel, seed: u64) -> Self {
        Self::new(model, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    /// Draw this block's fading coefficient.
    fn draw_h(&mut self) -> (f64, f64) {
        let (mut h_re, mut h_im) = match self.model.fading {
            Fading::None => (1.0, 0.0),
            Fading::RayleighBlock => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let z1: f64 = self.rng.sample(StandardNormal);
                let z2: f64 = self.rng.sample(StandardNormal);
                (z1 * s, z2 * s)
            }
            Fading::RicianBlock { k_factor } => {
                let los = (k_factor / (k_factor + 1.0)).sqrt();
                let scatter = (1.0 / (2.0 * (k_factor + 1.0))).sqrt();
                let z1: f64 = self.rng.sample(StandardNormal);
                let z2: f64 = self.rng.sample(StandardNormal);
                (los + z1 * scatter, z2 * scatter)
            }
        };
        if self.model.phase_offset == PhaseOffset::UniformRandomPerBlock {
            let phi = self.rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = phi.sin_cos();
            (h_re, h_im) = (h_re * c - h_im * s, h_re * s + h_im * c);
        }
        (h_re, h_im)
    }

    /// Push one opportunity block through the channel. `None` means the
    /// whole opportunity was dropped. The returned block is equalized.
    pub fn transmit(&mut self, block: &[IqSymbol]) -> Option<Vec<IqSymbol>> {
        if self.model.loss > 0.0 && self.rng.random_bool(self.model.loss) {
            return None;
        }
        let (h_re, h_im) = self.draw_h();
        let sigma_c = (self.model.noise_variance() / 2.0).sqrt();
        let gain = 1.0 + self.model.est_error;
        let out = block
            .iter()
            .map(|&x| {
                let mut y = x.mul_complex(h_re, h_im);
                if sigma_c > 0.0 {
                    let n_re: f64 = self.rng.sample(StandardNormal);
                    let n_im: f64 = self.rng.sample(StandardNormal);
                    y.i += n_re * sigma_c;
                    y.q += n_im * sigma_c;
                }
                y.div_complex(h_re, h_im).scaled(gain)
            })
            .collect();
        Some(out)
    }
}
