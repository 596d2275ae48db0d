//! Primary-traffic opportunity generator.
//!
//! Produces per-subframe symbol budgets and the primary bits that fill
//! them. Budgets model scheduler allocations (constant, bursty on/off, or
//! an exact trace replay); bit content comes either from a seeded random
//! stream or from a finite byte stream. When the byte stream runs dry the
//! embedder may ask for dummy primary traffic instead, which fills the
//! budgeted symbols with random bits so pending covert data still has a
//! carrier.

use crate::codec::bytes_to_bits;
use crate::constellation::qpsk_modulate;
use crate::stego::{Direction, TransmissionOpportunity};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// Per-subframe symbol budget model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficKind {
    Constant { symbols: usize },
    Bursty { on_prob: f64, symbols: usize },
    /// Replay of explicit per-subframe symbol counts.
    Trace { counts: Vec<usize> },
}

/// Where primary payload bits come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimarySource {
    RandomBits,
    /// Finite stream; opportunities shrink and then empty when it drains.
    FileStream,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficModel {
    pub kind: TrafficKind,
    #[serde(default = "default_source")]
    pub primary_source: PrimarySource,
}

fn default_source() -> PrimarySource {
    PrimarySource::RandomBits
}

/// A running traffic generator bound to one direction.
pub struct TrafficSource {
    model: TrafficModel,
    direction: Direction,
    stream_bits: Vec<bool>,
    stream_pos: usize,
    trace_pos: usize,
}

impl TrafficSource {
    pub fn new(model: TrafficModel, direction: Direction, stream_bytes: Option<&[u8]>) -> Self {
        Self {
            model,
            direction,
            stream_bits: stream_bytes.map(bytes_to_bits).unwrap_or_default(),
            stream_pos: 0,
            trace_pos: 0,
        }
    }

    fn budget(&mut self, rng: &mut dyn RngCore) -> Option<usize> {
        match &self.model.kind {
            TrafficKind::Constant { symbols } => Some(*symbols),
            TrafficKind::Bursty { on_prob, symbols } => {
                let draw = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                Some(if draw < *on_prob { *symbols } else { 0 })
            }
            TrafficKind::Trace { counts } => {
                if self.trace_pos >= counts.len() {
                    return None;
                }
                let n = counts[self.trace_pos];
                self.trace_pos += 1;
                Some(n)
            }
        }
    }

    /// Generate the next opportunity. `None` signals end-of-trace. When
    /// `want_dummy` is set and the primary stream is exhausted, random
    /// bits fill the budget instead of shrinking the opportunity.
    pub fn next_opportunity(
        &mut self,
        subframe_index: u64,
        rng: &mut dyn RngCore,
        want_dummy: bool,
    ) -> Option<TransmissionOpportunity> {
        let budget = self.budget(rng)?;
        let mut bits = Vec::with_capacity(budget * 2);
        match self.model.primary_source {
            PrimarySource::RandomBits => {
                for _ in 0..budget * 2 {
                    bits.push(rng.next_u32() & 1 == 1);
                }
            }
            PrimarySource::FileStream => {
                let available = (self.stream_bits.len() - self.stream_pos).min(budget * 2);
                let take = available - available % 2;
                bits.extend_from_slice(&self.stream_bits[self.stream_pos..self.stream_pos + take]);
                self.stream_pos += take;
                if bits.len() < budget * 2 && want_dummy {
                    while bits.len() < budget * 2 {
                        bits.push(rng.next_u32() & 1 == 1);
                    }
                }
            }
        }
        let primary_symbols = qpsk_modulate(&bits).expect("even bit count by construction");
        Some(TransmissionOpportunity {
            primary_symbols,
            primary_bits: bits,
            direction: self.direction,
            subframe_index,
        })
    }
}
