//! End-to-end link simulation: two sessions, a downlink and an uplink
//! opportunity stream, and an impairment channel per direction.
//!
//! All randomness flows from one master seed through named substreams
//! (channel, traffic, flags, challenge, jitter, one per direction or
//! endpoint), so identical parameters and seed reproduce a run bit for
//! bit, and a covert run shares its channel and traffic draws with its
//! covert-free baseline twin.

use crate::analysis::{aggregate_metrics, AnalysisError, RunCounters, RunMetrics};
use crate::channel::{Channel, ChannelModel};
use crate::constellation::{qpsk_demodulate, IqSymbol};
use crate::link::{LinkConfig, LinkEvent, LinkSession, Role};
use crate::packet::AddressInfo;
use crate::stego::{self, Direction, EmbedPolicy, TxRngs};
use crate::traffic::{TrafficKind, TrafficModel, TrafficSource};
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use sha2::{Digest, Sha256};

/// Source MSIN stamped on downlink transfers.
pub const BS_MSIN: [u8; 5] = [0, 0, 0, 0, 1];
/// Destination MSIN stamped on downlink transfers.
pub const UE_MSIN: [u8; 5] = [0, 0, 0, 0, 2];

/// Derive a named RNG substream from the master seed.
pub fn substream(master_seed: u64, label: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest: [u8; 32] = hasher.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

/// Everything a run needs, fully resolved (no file paths).
#[derive(Debug, Clone)]
pub struct SimParams {
    pub channel: ChannelModel,
    pub traffic: TrafficModel,
    pub policy: EmbedPolicy,
    pub link: LinkConfig,
    pub psk: Vec<u8>,
    /// Peer key; defaults to `psk` when `None`.
    pub ue_psk: Option<Vec<u8>>,
    /// Covert bytes to transfer downlink; `None` runs authentication only.
    pub covert_input: Option<Vec<u8>>,
    /// Primary payload bytes when the traffic source is a file stream.
    pub primary_stream: Option<Vec<u8>>,
    pub duration: u64,
    pub seed: u64,
    /// Cap on captured downlink symbols; `None` disables capture.
    pub capture_symbols: Option<usize>,
    /// Embed covert packets at all. The covert-free baseline twin sets
    /// this false and consumes identical channel and traffic draws.
    pub covert_enabled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimOutcome {
    Completed,
    TransferFailed,
    AuthFailed,
}

#[derive(Debug, Clone, Default)]
pub struct RunMeta {
    pub counters: RunCounters,
    pub subframes_run: u64,
    pub end_of_trace: bool,
}

pub struct RunOutput {
    pub outcome: SimOutcome,
    pub delivered: Vec<u8>,
    pub log: String,
    pub meta: RunMeta,
    pub metrics: RunMetrics,
    /// Downlink received symbols, up to the configured cap.
    pub capture: Vec<IqSymbol>,
}

/// Estimate the data packet count for the type-3 announcement. Only a
/// constant symbol budget makes the count knowable up front; any other
/// model announces 0 ("unknown").
fn estimate_total_packets(params: &SimParams, input_len: usize) -> u16 {
    let TrafficKind::Constant { symbols } = params.traffic.kind else {
        return 0;
    };
    let Some(cap) = stego::capacity(symbols, params.policy.payload_modulation) else {
        return 0;
    };
    if cap == 0 {
        return 0;
    }
    let total = input_len.div_ceil(cap);
    u16::try_from(total).unwrap_or(0)
}

struct Endpoint {
    session: LinkSession,
    flags: ChaCha8Rng,
    challenge: ChaCha8Rng,
    jitter: ChaCha8Rng,
}

/// Run one scenario to completion, failure, or the duration limit.
pub fn run(params: &SimParams) -> Result<RunOutput, AnalysisError> {
    let mut dl_channel = Channel::new(params.channel.clone(), substream(params.seed, "channel.dl"));
    let mut ul_channel = Channel::new(params.channel.clone(), substream(params.seed, "channel.ul"));
    let mut dl_traffic_rng = substream(params.seed, "traffic.dl");
    let mut ul_traffic_rng = substream(params.seed, "traffic.ul");
    let mut dl_traffic = TrafficSource::new(
        params.traffic.clone(),
        Direction::Downlink,
        params.primary_stream.as_deref(),
    );
    let mut ul_traffic = TrafficSource::new(params.traffic.clone(), Direction::Uplink, None);

    let mut bs = Endpoint {
        session: LinkSession::new(Role::Bs, params.psk.clone(), params.link.clone()),
        flags: substream(params.seed, "flags.bs"),
        challenge: substream(params.seed, "challenge.bs"),
        jitter: substream(params.seed, "jitter.bs"),
    };
    let mut ue = Endpoint {
        session: LinkSession::new(
            Role::Ue,
            params.ue_psk.clone().unwrap_or_else(|| params.psk.clone()),
            params.link.clone(),
        ),
        flags: substream(params.seed, "flags.ue"),
        challenge: substream(params.seed, "challenge.ue"),
        jitter: substream(params.seed, "jitter.ue"),
    };

    let input_len = params.covert_input.as_ref().map(Vec::len).unwrap_or(0);
    if let (true, Some(input)) = (params.covert_enabled, &params.covert_input) {
        let total = estimate_total_packets(params, input.len());
        bs.session.queue_transfer(
            input,
            AddressInfo {
                source_msin: BS_MSIN,
                destination_msin: UE_MSIN,
                total_packets: total,
            },
        );
    }

    let mut log = String::new();
    let mut counters = RunCounters::default();
    let mut capture: Vec<IqSymbol> = Vec::new();
    let capture_cap = params.capture_symbols.unwrap_or(0);
    let mut sender_complete = false;
    let mut end_of_trace = false;
    let mut outcome = None;
    let mut subframes_run = 0;

    let mut push_events = |log: &mut String, sf: u64, role: Role, events: &[LinkEvent]| {
        for ev in events {
            log.push_str(&format!(
                "subframe={sf} node={} event={}{}\n",
                role.label(),
                ev.name(),
                ev.fields()
            ));
        }
    };

    'sim: for sf in 0..params.duration {
        subframes_run = sf + 1;
        counters.subframes = subframes_run;
        bs.session.tick(sf);
        ue.session.tick(sf);
        for (endpoint, role) in [(&mut bs, Role::Bs), (&mut ue, Role::Ue)] {
            let events = endpoint.session.take_events();
            sender_complete |= events.iter().any(|e| *e == LinkEvent::TransferComplete);
            push_events(&mut log, sf, role, &events);
        }

        for is_downlink in [true, false] {
            let (traffic, traffic_rng, channel, tx, rx, rx_role) = if is_downlink {
                (&mut dl_traffic, &mut dl_traffic_rng, &mut dl_channel, &mut bs, &mut ue, Role::Ue)
            } else {
                (&mut ul_traffic, &mut ul_traffic_rng, &mut ul_channel, &mut ue, &mut bs, Role::Bs)
            };
            let want_dummy = params.covert_enabled
                && params.policy.dummy_primary
                && tx.session.has_pending_covert();
            let Some(opp) = traffic.next_opportunity(sf, traffic_rng, want_dummy) else {
                end_of_trace = true;
                break 'sim;
            };
            let block = if params.covert_enabled {
                let mut rngs = TxRngs {
                    flags: &mut tx.flags,
                    challenge: &mut tx.challenge,
                    jitter: &mut tx.jitter,
                };
                let (block, record) =
                    stego::generate_and_embed(&opp, &mut tx.session, &params.policy, &mut rngs);
                if let Some(record) = record {
                    counters.packet_emissions += 1;
                    if record.is_retransmission {
                        counters.retransmissions += 1;
                    }
                }
                block
            } else {
                opp.primary_symbols.clone()
            };
            if block.is_empty() {
                continue;
            }
            match channel.transmit(&block) {
                None => counters.dropped_opportunities += 1,
                Some(received) => {
                    counters.primary_opportunities += 1;
                    if qpsk_demodulate(&received) == opp.primary_bits {
                        counters.primary_ok_bits += opp.primary_bits.len() as u64;
                    } else {
                        counters.primary_errored_opportunities += 1;
                    }
                    if is_downlink && capture.len() < capture_cap {
                        let room = capture_cap - capture.len();
                        capture.extend(received.iter().take(room));
                    }
                    let events = rx.session.on_receive(&received, &params.policy);
                    sender_complete |= rx_role == Role::Bs
                        && events.iter().any(|e| *e == LinkEvent::TransferComplete);
                    push_events(&mut log, sf, rx_role, &events);
                }
            }
        }

        if bs.session.is_failed() || ue.session.is_failed() {
            outcome = Some(SimOutcome::AuthFailed);
            break;
        }
        if bs.session.transfer_failed() {
            outcome = Some(SimOutcome::TransferFailed);
            break;
        }
        if params.covert_enabled && params.covert_input.is_some() {
            if sender_complete && ue.session.delivered().len() == input_len {
                outcome = Some(SimOutcome::Completed);
                break;
            }
        } else if !params.covert_enabled
            || (bs.session.is_mutual() && ue.session.is_mutual() && params.covert_input.is_none())
        {
            // Baseline and auth-only runs go the distance or stop at
            // mutual authentication respectively.
            if params.covert_enabled {
                outcome = Some(SimOutcome::Completed);
                break;
            }
        }
    }

    let outcome = outcome.unwrap_or(
        if params.covert_enabled && params.covert_input.is_some() && !sender_complete {
            SimOutcome::TransferFailed
        } else if params.covert_enabled
            && params.covert_input.is_none()
            && !(bs.session.is_mutual() && ue.session.is_mutual())
        {
            SimOutcome::AuthFailed
        } else {
            SimOutcome::Completed
        },
    );

    let metrics = aggregate_metrics(&log, &counters)?;
    Ok(RunOutput {
        outcome,
        delivered: ue.session.delivered().to_vec(),
        log,
        meta: RunMeta {
            counters,
            subframes_run,
            end_of_trace,
        },
        metrics,
        capture,
    })
}

/// Deterministic pseudorandom covert input for presets that do not name a
/// file.
pub fn synthesize_input(seed: u64, len: usize) -> Vec<u8> {
    use rand::RngCore;
    let mut rng = substream(seed, "covert-input");
    let mut bytes = vec![0u8; len];
    rng.fill_bytes(&mut bytes);
    bytes
}
