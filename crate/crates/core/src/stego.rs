//! Transmitter-side covert packet embedding and receiver-side detection.
//!
//! One covert packet at most per transmission opportunity, always starting
//! at symbol 0. The 32-byte header is amplitude-modulated with the fixed
//! header map (one bit per symbol, 256 symbols); payload and CRC use the
//! map named by the header's modulation bit and threshold flag. Symbols
//! after the packet stay clean.

use crate::codec::{bits_to_bytes, bytes_to_bits};
use crate::constellation::{
    ask_config, ask_demodulate, ask_modulate, AskOrder, ConfigRole, IqSymbol, ThresholdFlag,
};
use crate::link::LinkSession;
use crate::packet::{self, CovertHeader, PacketType, HEADER_LEN, PAYLOAD_CRC_LEN};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Symbols consumed by the header: 32 bytes at one covert bit per symbol.
pub const HEADER_SYMBOLS: usize = HEADER_LEN * 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Downlink,
    Uplink,
}

/// One subframe's primary symbol block, before embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionOpportunity {
    pub primary_symbols: Vec<IqSymbol>,
    /// The bits the primary symbols encode, kept for impact accounting.
    pub primary_bits: Vec<bool>,
    pub direction: Direction,
    pub subframe_index: u64,
}

/// Whether payload maps are fixed or randomized per packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadMode {
    Fixed,
    Undetectable,
}

impl PayloadMode {
    pub fn role(self) -> ConfigRole {
        match self {
            PayloadMode::Fixed => ConfigRole::PayloadFixed,
            PayloadMode::Undetectable => ConfigRole::PayloadUndetectable,
        }
    }
}

/// Transmitter embedding policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedPolicy {
    pub payload_modulation: AskOrder,
    pub undetectable: bool,
    /// Uniform per-symbol amplitude jitter half-width; 0 disables it.
    /// Demodulation margin requires jitter below half the smallest active
    /// level distance.
    #[serde(default)]
    pub jitter: f64,
    /// Fill empty opportunities with random primary bits while covert data
    /// is pending.
    #[serde(default)]
    pub dummy_primary: bool,
}

impl EmbedPolicy {
    pub fn mode(&self) -> PayloadMode {
        if self.undetectable {
            PayloadMode::Undetectable
        } else {
            PayloadMode::Fixed
        }
    }

    /// Smallest level distance any packet of this policy can use.
    pub fn min_distance(&self) -> f64 {
        let mut min = crate::constellation::HEADER_DISTANCE;
        for flag in 0..4u8 {
            let cfg = ask_config(
                self.payload_modulation,
                ThresholdFlag::new(flag).unwrap(),
                self.mode().role(),
            );
            min = min.min(cfg.distance);
            if !self.undetectable {
                break; // fixed mode ignores the flag
            }
        }
        min
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("payload CRC32 mismatch")]
    CrcFailure,
    #[error("block has {have} symbols, packet needs {need}")]
    Truncated { need: usize, have: usize },
}

/// Book-keeping for one embedded packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmitRecord {
    pub packet_number: u16,
    pub packet_type: PacketType,
    pub payload_bytes: usize,
    pub is_retransmission: bool,
}

/// Maximum payload bytes a block of `l_ps` primary symbols can carry at
/// the given payload modulation, or `None` when not even a zero-payload
/// packet fits. The header always costs 256 symbols; payload and CRC ride
/// at `bits_per_symbol` covert bits each.
pub fn capacity(l_ps: usize, payload_modulation: AskOrder) -> Option<usize> {
    if l_ps < HEADER_SYMBOLS {
        return None;
    }
    let b = payload_modulation.bits_per_symbol();
    let body_bytes = (l_ps - HEADER_SYMBOLS) * b / 8;
    body_bytes.checked_sub(PAYLOAD_CRC_LEN)
}

/// Symbols occupied by a packet with `payload_len` payload bytes.
pub fn packet_symbols(payload_len: usize, payload_modulation: AskOrder) -> usize {
    let b = payload_modulation.bits_per_symbol();
    HEADER_SYMBOLS + (payload_len + PAYLOAD_CRC_LEN) * 8 / b
}

/// Modulate a full wire packet into per-symbol amplitude factors.
pub fn modulate_packet(wire: &[u8], payload_cfg: &crate::constellation::AskConfig) -> Vec<f64> {
    let header_cfg = ask_config(AskOrder::Two, ThresholdFlag::new(0).unwrap(), ConfigRole::Header);
    let mut amps = ask_modulate(&bytes_to_bits(&wire[..HEADER_LEN]), &header_cfg)
        .expect("header bits always fill whole symbols");
    amps.extend(
        ask_modulate(&bytes_to_bits(&wire[HEADER_LEN..]), payload_cfg)
            .expect("body bits always fill whole symbols"),
    );
    amps
}

/// Scale the leading primary symbols by the packet's amplitude factors,
/// optionally jittered. Trailing symbols stay untouched.
pub fn embed_amplitudes(
    symbols: &mut [IqSymbol],
    amps: &[f64],
    jitter: f64,
    rng: &mut dyn RngCore,
) {
    for (sym, &amp) in symbols.iter_mut().zip(amps) {
        let amp = if jitter > 0.0 {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            amp + (2.0 * u - 1.0) * jitter
        } else {
            amp
        };
        *sym = sym.scaled(amp);
    }
}

/// RNG substreams the transmitter side draws from.
pub struct TxRngs<'a> {
    /// Per-packet threshold flag draws.
    pub flags: &'a mut dyn RngCore,
    /// Auth challenge bytes.
    pub challenge: &'a mut dyn RngCore,
    /// Amplitude jitter draws.
    pub jitter: &'a mut dyn RngCore,
}

/// Ask the session for its next packet and embed it into the opportunity.
/// Returns the (possibly untouched) symbol block plus a record when a
/// packet was embedded. Pass-through happens when nothing is pending or
/// the opportunity is too small.
pub fn generate_and_embed(
    opportunity: &TransmissionOpportunity,
    session: &mut LinkSession,
    policy: &EmbedPolicy,
    rngs: &mut TxRngs,
) -> (Vec<IqSymbol>, Option<TransmitRecord>) {
    let mut block = opportunity.primary_symbols.clone();
    let Some(budget) = capacity(block.len(), policy.payload_modulation) else {
        return (block, None);
    };
    let Some(outgoing) = session.next_outgoing(budget, policy, rngs.flags, rngs.challenge) else {
        return (block, None);
    };
    let header_bytes: [u8; HEADER_LEN] = outgoing.wire[..HEADER_LEN].try_into().unwrap();
    let header = packet::parse_header(&header_bytes, packet::MAX_PAYLOAD_LEN)
        .expect("session-built packets always carry valid headers");
    let payload_cfg = ask_config(header.modulation, header.threshold_flag, policy.mode().role());
    let amps = modulate_packet(&outgoing.wire, &payload_cfg);
    debug_assert!(amps.len() <= block.len());
    embed_amplitudes(&mut block, &amps, policy.jitter, rngs.jitter);
    (block, Some(outgoing.record))
}

/// Demodulate the first 256 symbols with the fixed header map and try to
/// parse a header out of them. `None` is the normal outcome for clean or
/// noise-corrupted blocks.
pub fn detect(block: &[IqSymbol], max_payload_len: u32) -> Option<CovertHeader> {
    if block.len() < HEADER_SYMBOLS {
        return None;
    }
    let header_cfg = ask_config(AskOrder::Two, ThresholdFlag::new(0).unwrap(), ConfigRole::Header);
    let mags: Vec<f64> = block[..HEADER_SYMBOLS].iter().map(|s| s.magnitude()).collect();
    let bits = ask_demodulate(&mags, &header_cfg);
    let bytes = bits_to_bytes(&bits).expect("256 bits");
    let header_bytes: [u8; HEADER_LEN] = bytes.try_into().unwrap();
    packet::parse_header(&header_bytes, max_payload_len)
}

/// Demodulate and CRC-check the payload section described by a detected
/// header. The payload map is reconstructed from the header fields plus
/// the link's payload mode.
pub fn extract(
    block: &[IqSymbol],
    header: &CovertHeader,
    mode: PayloadMode,
) -> Result<Vec<u8>, ExtractError> {
    let body_len = header.payload_len as usize + PAYLOAD_CRC_LEN;
    let body_symbols = body_len * 8 / header.modulation.bits_per_symbol();
    let need = HEADER_SYMBOLS + body_symbols;
    if block.len() < need {
        return Err(ExtractError::Truncated {
            need,
            have: block.len(),
        });
    }
    let cfg = ask_config(header.modulation, header.threshold_flag, mode.role());
    let mags: Vec<f64> = block[HEADER_SYMBOLS..need].iter().map(|s| s.magnitude()).collect();
    let bits = ask_demodulate(&mags, &cfg);
    let bytes = bits_to_bytes(&bits).expect("whole symbols");
    let payload = &bytes[..header.payload_len as usize];
    let crc = u32::from_be_bytes(bytes[header.payload_len as usize..].try_into().unwrap());
    if crate::codec::crc32(payload) != crc {
        return Err(ExtractError::CrcFailure);
    }
    Ok(payload.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::qpsk_modulate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clean_block(n: usize, seed: u64) -> TransmissionOpportunity {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..n * 2).map(|_| rng.random()).collect();
        TransmissionOpportunity {
            primary_symbols: qpsk_modulate(&bits).unwrap(),
            primary_bits: bits,
            direction: Direction::Downlink,
            subframe_index: 0,
        }
    }

    fn embed_wire(block: &mut [IqSymbol], wire: &[u8], mode: PayloadMode) {
        let header_bytes: [u8; HEADER_LEN] = wire[..HEADER_LEN].try_into().unwrap();
        let header = packet::parse_header(&header_bytes, packet::MAX_PAYLOAD_LEN).unwrap();
        let cfg = ask_config(header.modulation, header.threshold_flag, mode.role());
        let amps = modulate_packet(wire, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        embed_amplitudes(block, &amps, 0.0, &mut rng);
    }

    #[test]
    fn capacity_boundaries() {
        assert_eq!(capacity(288, AskOrder::Two), Some(0));
        assert_eq!(capacity(287, AskOrder::Two), None);
        assert_eq!(capacity(1000, AskOrder::Four), Some(182));
        assert_eq!(capacity(100, AskOrder::Four), None);
        assert_eq!(capacity(0, AskOrder::Two), None);
    }

    #[test]
    fn packet_symbols_inverts_capacity() {
        for order in [AskOrder::Two, AskOrder::Four] {
            for l_ps in [288, 500, 1000, 1200, 4096] {
                if let Some(cap) = capacity(l_ps, order) {
                    assert!(packet_symbols(cap, order) <= l_ps);
                    assert!(packet_symbols(cap + 1, order) > l_ps || cap == 0);
                }
            }
        }
    }

    #[test]
    fn detect_needs_256_symbols() {
        let block = clean_block(100, 1);
        assert_eq!(detect(&block.primary_symbols, packet::MAX_PAYLOAD_LEN), None);
    }

    #[test]
    fn clean_blocks_rarely_detect() {
        // Dominated by the CRC8 collision rate; must stay under 0.4%.
        let mut hits = 0;
        let trials = 20_000;
        for seed in 0..trials {
            let block = clean_block(300, seed as u64);
            if detect(&block.primary_symbols, packet::MAX_PAYLOAD_LEN).is_some() {
                hits += 1;
            }
        }
        assert!(
            (hits as f64) / (trials as f64) < 0.004,
            "false accepts: {hits}/{trials}"
        );
    }

    #[test]
    fn noiseless_round_trip_all_types_and_modes() {
        for (order, mode) in [
            (AskOrder::Two, PayloadMode::Fixed),
            (AskOrder::Four, PayloadMode::Fixed),
            (AskOrder::Two, PayloadMode::Undetectable),
            (AskOrder::Four, PayloadMode::Undetectable),
        ] {
            let data_len = capacity(1200, order).unwrap();
            let payloads: Vec<(PacketType, Vec<u8>)> = vec![
                (PacketType::Ack, vec![0x02, 0x01]),
                (PacketType::Nack, vec![0x00, 0x09]),
                (PacketType::Data, (0..data_len).map(|i| i as u8).collect()),
                (PacketType::Address, vec![0; 12]),
                (PacketType::AuthChallenge, vec![0x55; 32]),
                (PacketType::AuthResponse, vec![0xAA; 32]),
                (PacketType::AuthAck, vec![]),
            ];
            for flag_v in 0..4u8 {
                for (ptype, payload) in &payloads {
                    let wire = packet::build_packet(
                        *ptype,
                        payload,
                        77,
                        order,
                        ThresholdFlag::new(flag_v).unwrap(),
                    )
                    .unwrap();
                    let mut block = clean_block(1200, 42).primary_symbols;
                    embed_wire(&mut block, &wire, mode);
                    let header = detect(&block, packet::MAX_PAYLOAD_LEN).expect("detect");
                    assert_eq!(header.packet_type, *ptype);
                    assert_eq!(header.packet_number, 77);
                    let got = extract(&block, &header, mode).expect("extract");
                    assert_eq!(&got, payload);
                }
            }
        }
    }

    #[test]
    fn embedding_never_raises_magnitude_and_preserves_primary_bits() {
        let opp = clean_block(1200, 7);
        let wire = packet::build_packet(
            PacketType::Data,
            &vec![0x3C; 100],
            5,
            AskOrder::Four,
            ThresholdFlag::new(2).unwrap(),
        )
        .unwrap();
        let mut block = opp.primary_symbols.clone();
        embed_wire(&mut block, &wire, PayloadMode::Fixed);
        for sym in &block {
            assert!(sym.magnitude() <= 1.0 + 1e-12);
        }
        assert_eq!(crate::constellation::qpsk_demodulate(&block), opp.primary_bits);
    }

    #[test]
    fn noise_below_half_gap_still_extracts() {
        let wire = packet::build_packet(
            PacketType::Data,
            &vec![0xC3; 50],
            3,
            AskOrder::Four,
            ThresholdFlag::new(0).unwrap(),
        )
        .unwrap();
        let mut block = clean_block(1200, 8).primary_symbols;
        embed_wire(&mut block, &wire, PayloadMode::Fixed);
        // Fixed 4-ASK spacing is 0.25 and the header spacing is 0.16, so a
        // radial push strictly below 0.08 can never cross a threshold.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for sym in block.iter_mut() {
            let mag = sym.magnitude();
            let push: f64 = rng.random_range(-0.079..0.079);
            *sym = sym.scaled((mag + push) / mag);
        }
        let header = detect(&block, packet::MAX_PAYLOAD_LEN).expect("detect under bounded noise");
        assert_eq!(extract(&block, &header, PayloadMode::Fixed).unwrap(), vec![0xC3; 50]);
    }

    #[test]
    fn threshold_crossing_is_crc_failure() {
        let wire = packet::build_packet(
            PacketType::Data,
            &vec![0x11; 40],
            3,
            AskOrder::Four,
            ThresholdFlag::new(0).unwrap(),
        )
        .unwrap();
        let mut block = clean_block(1200, 9).primary_symbols;
        embed_wire(&mut block, &wire, PayloadMode::Fixed);
        // Push one payload symbol across its decision threshold.
        let idx = HEADER_SYMBOLS + 10;
        let mag = block[idx].magnitude();
        block[idx] = block[idx].scaled((mag + 0.13) / mag);
        let header = detect(&block, packet::MAX_PAYLOAD_LEN).expect("header untouched");
        assert_eq!(
            extract(&block, &header, PayloadMode::Fixed),
            Err(ExtractError::CrcFailure)
        );
    }

    #[test]
    fn truncated_block_reports_needed_symbols() {
        let wire = packet::build_packet(
            PacketType::Data,
            &vec![0x0F; 100],
            3,
            AskOrder::Two,
            ThresholdFlag::new(0).unwrap(),
        )
        .unwrap();
        let mut block = clean_block(1200, 10).primary_symbols;
        embed_wire(&mut block, &wire, PayloadMode::Fixed);
        let header = detect(&block, packet::MAX_PAYLOAD_LEN).unwrap();
        let short = &block[..500];
        assert_eq!(
            extract(short, &header, PayloadMode::Fixed),
            Err(ExtractError::Truncated {
                need: HEADER_SYMBOLS + 104 * 8,
                have: 500
            })
        );
    }

    #[test]
    fn jitter_stays_decodable_within_margin() {
        let policy_jitter = 0.002; // below half of the smallest 4-ASK distance (0.005/2)
        let wire = packet::build_packet(
            PacketType::Data,
            &vec![0x77; 60],
            4,
            AskOrder::Four,
            ThresholdFlag::new(0).unwrap(),
        )
        .unwrap();
        let header_bytes: [u8; HEADER_LEN] = wire[..HEADER_LEN].try_into().unwrap();
        let header = packet::parse_header(&header_bytes, packet::MAX_PAYLOAD_LEN).unwrap();
        let cfg = ask_config(header.modulation, header.threshold_flag, ConfigRole::PayloadUndetectable);
        let amps = modulate_packet(&wire, &cfg);
        let mut block = clean_block(1200, 11).primary_symbols;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        embed_amplitudes(&mut block, &amps, policy_jitter, &mut rng);
        let header = detect(&block, packet::MAX_PAYLOAD_LEN).expect("detect");
        assert_eq!(
            extract(&block, &header, PayloadMode::Undetectable).unwrap(),
            vec![0x77; 60]
        );
    }
}
