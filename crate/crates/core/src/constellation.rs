//! Primary QPSK modulation/demodulation and the covert ASK amplitude maps.
//!
//! Covert data rides on the magnitude of primary symbols: an `AskConfig`
//! defines a set of amplitude levels (the top level is always 1.0, so
//! embedding never raises transmit power) and the midpoint thresholds used
//! to slice received magnitudes back into level indices. Primary QPSK
//! decisions are quadrant-only and therefore invariant under any positive
//! amplitude scaling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstellationError {
    #[error("bit count {0} is not a multiple of {1}")]
    BitCount(usize, usize),
    #[error("threshold flag {0} out of range (0..=3)")]
    FlagRange(u8),
}

/// One complex baseband sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IqSymbol {
    pub i: f64,
    pub q: f64,
}

impl IqSymbol {
    pub fn new(i: f64, q: f64) -> Self {
        Self { i, q }
    }

    pub fn magnitude(self) -> f64 {
        self.i.hypot(self.q)
    }

    /// Scale the symbol by a real amplitude factor.
    pub fn scaled(self, amplitude: f64) -> Self {
        Self {
            i: self.i * amplitude,
            q: self.q * amplitude,
        }
    }

    pub fn mul_complex(self, re: f64, im: f64) -> Self {
        Self {
            i: self.i * re - self.q * im,
            q: self.i * im + self.q * re,
        }
    }

    pub fn div_complex(self, re: f64, im: f64) -> Self {
        let denom = re * re + im * im;
        Self {
            i: (self.i * re + self.q * im) / denom,
            q: (self.q * re - self.i * im) / denom,
        }
    }
}

/// Covert constellation order: how many amplitude levels a symbol selects
/// between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AskOrder {
    Two,
    Four,
}

impl AskOrder {
    pub fn levels(self) -> usize {
        match self {
            AskOrder::Two => 2,
            AskOrder::Four => 4,
        }
    }

    /// Covert bits carried per primary symbol.
    pub fn bits_per_symbol(self) -> usize {
        match self {
            AskOrder::Two => 1,
            AskOrder::Four => 2,
        }
    }

    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            2 => Some(AskOrder::Two),
            4 => Some(AskOrder::Four),
            _ => None,
        }
    }
}

/// 2-bit header field selecting one distance configuration per order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdFlag(u8);

impl ThresholdFlag {
    pub fn new(value: u8) -> Result<Self, ConstellationError> {
        if value > 3 {
            return Err(ConstellationError::FlagRange(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

/// Which amplitude map a packet section uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigRole {
    /// Fixed 2-ASK map every receiver knows; used for packet headers.
    Header,
    /// Fixed payload map with the widest spacing (d = 1/order).
    PayloadFixed,
    /// Randomized per-packet map selected by the threshold flag.
    PayloadUndetectable,
}

/// Header map distance. One global constant keeps packet detection
/// stateless.
pub const HEADER_DISTANCE: f64 = 0.16;

/// Per-flag level distances for the randomized payload maps. The values
/// keep every level within a few channel-noise standard deviations of 1.0
/// at the reference capture SNR, so the magnitude distribution of covert
/// traffic stays close to the clean one while remaining separable at
/// high SNR.
pub const FLAG_DISTANCES_2ASK: [f64; 4] = [0.01, 0.02, 0.03, 0.04];
pub const FLAG_DISTANCES_4ASK: [f64; 4] = [0.005, 0.01, 0.015, 0.02];

/// A covert amplitude constellation: ordered levels and the midpoint
/// decision thresholds between them.
#[derive(Debug, Clone, PartialEq)]
pub struct AskConfig {
    pub order: AskOrder,
    pub distance: f64,
    pub levels: Vec<f64>,
    pub thresholds: Vec<f64>,
}

impl AskConfig {
    /// Build a config from a level distance. Levels are
    /// `1 - (order - 1 - k) * d` for `k = 0..order`, so the top level is
    /// exactly 1.0.
    pub fn from_distance(order: AskOrder, distance: f64) -> Self {
        let n = order.levels();
        assert!(
            distance > 0.0 && distance < 1.0 / (n as f64 - 1.0),
            "distance {distance} out of range for order {n}"
        );
        let levels: Vec<f64> = (0..n)
            .map(|k| 1.0 - (n - 1 - k) as f64 * distance)
            .collect();
        let thresholds: Vec<f64> = levels
            .windows(2)
            .map(|pair| (pair[0] + pair[1]) / 2.0)
            .collect();
        Self {
            order,
            distance,
            levels,
            thresholds,
        }
    }

    pub fn min_level(&self) -> f64 {
        self.levels[0]
    }
}

/// Resolve the amplitude map for a packet section.
pub fn ask_config(order: AskOrder, flag: ThresholdFlag, role: ConfigRole) -> AskConfig {
    match role {
        ConfigRole::Header => AskConfig::from_distance(AskOrder::Two, HEADER_DISTANCE),
        ConfigRole::PayloadFixed => AskConfig::from_distance(order, 1.0 / order.levels() as f64),
        ConfigRole::PayloadUndetectable => {
            let table = match order {
                AskOrder::Two => &FLAG_DISTANCES_2ASK,
                AskOrder::Four => &FLAG_DISTANCES_4ASK,
            };
            AskConfig::from_distance(order, table[flag.value() as usize])
        }
    }
}

/// Gray-mapped unit-energy QPSK: bit pair (b1, b0) maps to
/// ((1 - 2*b1)/sqrt(2), (1 - 2*b0)/sqrt(2)).
pub fn qpsk_modulate(bits: &[bool]) -> Result<Vec<IqSymbol>, ConstellationError> {
    if bits.len() % 2 != 0 {
        return Err(ConstellationError::BitCount(bits.len(), 2));
    }
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    Ok(bits
        .chunks(2)
        .map(|pair| {
            IqSymbol::new(
                if pair[0] { -amp } else { amp },
                if pair[1] { -amp } else { amp },
            )
        })
        .collect())
}

/// Hard quadrant decision; amplitude is ignored, and exact-zero components
/// resolve to bit 0.
pub fn qpsk_demodulate(symbols: &[IqSymbol]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for sym in symbols {
        bits.push(sym.i < 0.0);
        bits.push(sym.q < 0.0);
    }
    bits
}

/// Map covert bits onto amplitude factors: each `bits_per_symbol` group,
/// MSB-first, indexes the level table directly.
pub fn ask_modulate(bits: &[bool], config: &AskConfig) -> Result<Vec<f64>, ConstellationError> {
    let b = config.order.bits_per_symbol();
    if bits.len() % b != 0 {
        return Err(ConstellationError::BitCount(bits.len(), b));
    }
    Ok(bits
        .chunks(b)
        .map(|group| {
            let idx = group
                .iter()
                .fold(0usize, |acc, &bit| (acc << 1) | usize::from(bit));
            config.levels[idx]
        })
        .collect())
}

/// Slice received magnitudes back into covert bits. A magnitude exactly on
/// a threshold resolves to the higher level index.
pub fn ask_demodulate(amplitudes: &[f64], config: &AskConfig) -> Vec<bool> {
    let b = config.order.bits_per_symbol();
    let mut bits = Vec::with_capacity(amplitudes.len() * b);
    for &amp in amplitudes {
        let idx = config.thresholds.iter().filter(|&&t| amp >= t).count();
        for shift in (0..b).rev() {
            bits.push((idx >> shift) & 1 != 0);
        }
    }
    bits
}
