//! Per-direction protocol state machine: mutual authentication followed by
//! reliable covert transfer with ACK/NACK feedback, timeouts, and
//! retransmissions.
//!
//! Authentication is challenge/response over a pre-shared key. The
//! initiator (base station) challenges first; once its auth ACK arrives,
//! the peer runs the mirror-image exchange. Until both sides hold a
//! verified peer and a confirmation from that peer, no data-type packet is
//! sent or accepted. Challenges and responses are re-sent on their own
//! timers so the handshake survives lossy channels; data packets ride a
//! selective-repeat window (size 1 by default, i.e. stop-and-wait) with
//! 10-bit wrap-around sequence numbers.

use crate::codec::hmac_sha256;
use crate::packet::{
    build_packet, build_typed_payload, parse_typed_payload, AddressInfo, PacketType, TypedPayload,
    ADDRESS_INFO_LEN, AUTH_PAYLOAD_LEN, SEQ_MODULUS,
};
use crate::stego::{self, EmbedPolicy, TransmitRecord};
use crate::constellation::{IqSymbol, ThresholdFlag};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Bs,
    Ue,
}

impl Role {
    pub fn label(self) -> &'static str {
        match self {
            Role::Bs => "bs",
            Role::Ue => "ue",
        }
    }
}

/// Externally visible authentication phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuthPhase {
    Idle,
    ChallengeSent,
    PeerAuthenticated,
    SelfAuthenticated,
    Mutual,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Subframes before an unacknowledged packet becomes eligible for
    /// retransmission.
    pub timeout_subframes: u64,
    /// Expiries a pending packet may accumulate before the transfer fails.
    pub max_retries: u32,
    /// Outstanding-packet window; 1 is stop-and-wait. Must stay at or
    /// below half the sequence space.
    pub window: u16,
    /// Emissions of one auth message before authentication fails.
    pub auth_max_attempts: u32,
    /// Start in the mutually-authenticated state. Used by capture and
    /// impact scenarios that measure embedding rather than the handshake.
    #[serde(default)]
    pub assume_authenticated: bool,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            timeout_subframes: 20,
            max_retries: 8,
            window: 1,
            auth_max_attempts: 4,
            assume_authenticated: false,
        }
    }
}

/// Protocol events, reported as they happen and rendered into the
/// machine-parseable run log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkEvent {
    Authenticated,
    AuthFailed,
    DataDelivered { pkt: u16, bytes: usize },
    AckSent { pkt: u16 },
    NackSent { pkt: u16 },
    DuplicateDiscarded { pkt: u16 },
    TransferComplete,
    TransferFailed { pkt: u16 },
}

impl LinkEvent {
    pub fn name(&self) -> &'static str {
        match self {
            LinkEvent::Authenticated => "authenticated",
            LinkEvent::AuthFailed => "auth_failed",
            LinkEvent::DataDelivered { .. } => "data_delivered",
            LinkEvent::AckSent { .. } => "ack_sent",
            LinkEvent::NackSent { .. } => "nack_sent",
            LinkEvent::DuplicateDiscarded { .. } => "duplicate_discarded",
            LinkEvent::TransferComplete => "transfer_complete",
            LinkEvent::TransferFailed { .. } => "transfer_failed",
        }
    }

    /// Render the event's extra key=value fields.
    pub fn fields(&self) -> String {
        match self {
            LinkEvent::DataDelivered { pkt, bytes } => format!(" pkt={pkt} bytes={bytes}"),
            LinkEvent::AckSent { pkt }
            | LinkEvent::NackSent { pkt }
            | LinkEvent::DuplicateDiscarded { pkt }
            | LinkEvent::TransferFailed { pkt } => format!(" pkt={pkt}"),
            _ => String::new(),
        }
    }
}

/// A packet the session wants embedded into the current opportunity.
pub struct OutgoingPacket {
    pub wire: Vec<u8>,
    pub record: TransmitRecord,
}

struct PendingPacket {
    wire: Vec<u8>,
    packet_type: PacketType,
    payload_bytes: usize,
    retries: u32,
    deadline: u64,
    eligible: bool,
    last_tx: u64,
}

/// An auth message with its own retransmission timer.
struct AuthOutstanding {
    wire: Vec<u8>,
    packet_number: u16,
    payload_bytes: usize,
    attempts: u32,
    deadline: u64,
    eligible: bool,
}

enum ControlKind {
    Ack,
    Nack,
}

pub struct LinkSession {
    pub role: Role,
    psk: Vec<u8>,
    cfg: LinkConfig,
    now: u64,

    // Authentication.
    verified_peer: bool,
    confirmed_by_peer: bool,
    failed: bool,
    authenticated_emitted: bool,
    want_challenge: bool,
    my_challenge: Option<[u8; AUTH_PAYLOAD_LEN]>,
    challenge_out: Option<AuthOutstanding>,
    response_out: Option<AuthOutstanding>,
    auth_ack_wire: Option<(Vec<u8>, u16)>,
    auth_ack_pending: bool,

    // Sender side. ARQ-tracked packets (data and address) number from
    // their own counter so the receive window can start at zero; control
    // and auth packets draw from a separate counter since nothing tracks
    // them.
    data_seq: u16,
    ctrl_seq: u16,
    send_buf: VecDeque<u8>,
    announce: Option<AddressInfo>,
    pending: BTreeMap<u16, PendingPacket>,
    ctrl: VecDeque<(ControlKind, u16)>,
    transfer_started: bool,
    transfer_failed: bool,
    complete_emitted: bool,

    // Receiver side.
    rx_base: u16,
    reorder: BTreeMap<u16, TypedPayload>,
    delivered: Vec<u8>,
    delivered_data_pkts: u32,
    expected_total: Option<u16>,
    rx_complete_emitted: bool,

    events: Vec<LinkEvent>,
}

impl LinkSession {
    pub fn new(role: Role, psk: Vec<u8>, cfg: LinkConfig) -> Self {
        assert!(cfg.window >= 1 && cfg.window <= SEQ_MODULUS / 2);
        let assume = cfg.assume_authenticated;
        Self {
            role,
            psk,
            cfg,
            now: 0,
            verified_peer: assume,
            confirmed_by_peer: assume,
            failed: false,
            authenticated_emitted: assume,
            want_challenge: role == Role::Bs && !assume,
            my_challenge: None,
            challenge_out: None,
            response_out: None,
            auth_ack_wire: None,
            auth_ack_pending: false,
            data_seq: 0,
            ctrl_seq: 0,
            send_buf: VecDeque::new(),
            announce: None,
            pending: BTreeMap::new(),
            ctrl: VecDeque::new(),
            transfer_started: false,
            transfer_failed: false,
            complete_emitted: false,
            rx_base: 0,
            reorder: BTreeMap::new(),
            delivered: Vec::new(),
            delivered_data_pkts: 0,
            expected_total: None,
            rx_complete_emitted: false,
            events: Vec::new(),
        }
    }

    pub fn auth_phase(&self) -> AuthPhase {
        if self.failed {
            AuthPhase::Failed
        } else if self.verified_peer && self.confirmed_by_peer {
            AuthPhase::Mutual
        } else if self.verified_peer {
            AuthPhase::PeerAuthenticated
        } else if self.confirmed_by_peer {
            AuthPhase::SelfAuthenticated
        } else if self.challenge_out.is_some() {
            AuthPhase::ChallengeSent
        } else {
            AuthPhase::Idle
        }
    }

    pub fn is_mutual(&self) -> bool {
        self.verified_peer && self.confirmed_by_peer && !self.failed
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn transfer_failed(&self) -> bool {
        self.transfer_failed
    }

    pub fn delivered(&self) -> &[u8] {
        &self.delivered
    }

    /// Queue a covert byte stream for transfer. The address announcement
    /// goes out first (as a type-3 packet) and is itself acknowledged.
    pub fn queue_transfer(&mut self, bytes: &[u8], address: AddressInfo) {
        self.send_buf.extend(bytes);
        self.announce = Some(address);
        self.transfer_started = true;
    }

    /// True while anything covert is waiting to go out.
    pub fn has_pending_covert(&self) -> bool {
        !self.ctrl.is_empty()
            || !self.send_buf.is_empty()
            || self.announce.is_some()
            || !self.pending.is_empty()
            || self.auth_ack_pending
            || self.want_challenge
            || self
                .challenge_out
                .as_ref()
                .map(|c| c.eligible)
                .unwrap_or(false)
            || self
                .response_out
                .as_ref()
                .map(|r| r.eligible)
                .unwrap_or(false)
    }

    /// Advance timers. Expired pending packets become eligible for
    /// retransmission; expiries past the retry budget fail the transfer,
    /// and exhausted auth attempts fail authentication.
    pub fn tick(&mut self, subframe: u64) {
        self.now = subframe;
        let mut failed_pkts = Vec::new();
        for (&pkt, entry) in self.pending.iter_mut() {
            if !entry.eligible && entry.deadline <= subframe {
                entry.retries += 1;
                if entry.retries >= self.cfg.max_retries {
                    failed_pkts.push(pkt);
                } else {
                    entry.eligible = true;
                }
            }
        }
        for pkt in failed_pkts {
            self.pending.remove(&pkt);
            self.transfer_failed = true;
            self.events.push(LinkEvent::TransferFailed { pkt });
        }
        let max_attempts = self.cfg.auth_max_attempts;
        let mut auth_exhausted = false;
        for slot in [&mut self.challenge_out, &mut self.response_out] {
            if let Some(out) = slot {
                if !out.eligible && out.deadline <= subframe {
                    if out.attempts >= max_attempts {
                        auth_exhausted = true;
                    } else {
                        out.eligible = true;
                    }
                }
            }
        }
        if auth_exhausted && !self.failed && !self.is_mutual() {
            self.failed = true;
            self.events.push(LinkEvent::AuthFailed);
        }
    }

    /// Drain events raised outside `on_receive` (timer expiries).
    pub fn take_events(&mut self) -> Vec<LinkEvent> {
        std::mem::take(&mut self.events)
    }

    fn next_seq(&mut self, tracked: bool) -> u16 {
        let counter = if tracked {
            &mut self.data_seq
        } else {
            &mut self.ctrl_seq
        };
        let pkt = *counter;
        *counter = (*counter + 1) % SEQ_MODULUS;
        pkt
    }

    fn draw_flag(policy: &EmbedPolicy, flags_rng: &mut dyn RngCore) -> ThresholdFlag {
        let value = if policy.undetectable {
            (flags_rng.next_u32() & 0x3) as u8
        } else {
            0
        };
        ThresholdFlag::new(value).expect("2-bit value")
    }

    fn build_wire(
        &mut self,
        payload: &TypedPayload,
        policy: &EmbedPolicy,
        flags_rng: &mut dyn RngCore,
    ) -> (Vec<u8>, u16, usize) {
        let tracked = matches!(
            payload.packet_type(),
            PacketType::Data | PacketType::Address
        );
        let pkt = self.next_seq(tracked);
        let bytes = build_typed_payload(payload).expect("session payloads are well-formed");
        let flag = Self::draw_flag(policy, flags_rng);
        let wire = build_packet(
            payload.packet_type(),
            &bytes,
            pkt,
            policy.payload_modulation,
            flag,
        )
        .expect("session sequence numbers stay in range");
        (wire, pkt, bytes.len())
    }

    /// Pick the next packet for an opportunity with `capacity` payload
    /// bytes, in priority order: pending control feedback, authentication
    /// duties, retransmissions, then new data. Returns `None` when nothing
    /// fits or nothing is pending.
    pub fn next_outgoing(
        &mut self,
        capacity: usize,
        policy: &EmbedPolicy,
        flags_rng: &mut dyn RngCore,
        challenge_rng: &mut dyn RngCore,
    ) -> Option<OutgoingPacket> {
        if self.failed {
            // A failed session avoids all covert communication.
            return None;
        }

        // 1. ACK/NACK feedback.
        if let Some((kind, pkt)) = self.ctrl.front() {
            if capacity < 2 {
                return None;
            }
            let payload = match kind {
                ControlKind::Ack => TypedPayload::Ack(*pkt),
                ControlKind::Nack => TypedPayload::Nack(*pkt),
            };
            let ptype = payload.packet_type();
            let (wire, pkt, len) = self.build_wire(&payload, policy, flags_rng);
            self.ctrl.pop_front();
            return Some(OutgoingPacket {
                wire,
                record: TransmitRecord {
                    packet_number: pkt,
                    packet_type: ptype,
                    payload_bytes: len,
                    is_retransmission: false,
                },
            });
        }

        // 2. Authentication duties: answer first, finish handshakes, then
        // open our own challenge.
        if let Some(out) = &mut self.response_out {
            if out.eligible && capacity >= AUTH_PAYLOAD_LEN {
                out.eligible = false;
                out.attempts += 1;
                out.deadline = self.now + self.cfg.timeout_subframes;
                let retx = out.attempts > 1;
                return Some(OutgoingPacket {
                    wire: out.wire.clone(),
                    record: TransmitRecord {
                        packet_number: out.packet_number,
                        packet_type: PacketType::AuthResponse,
                        payload_bytes: out.payload_bytes,
                        is_retransmission: retx,
                    },
                });
            }
        }
        if self.auth_ack_pending {
            if let Some((wire, pkt)) = &self.auth_ack_wire {
                let (wire, pkt) = (wire.clone(), *pkt);
                self.auth_ack_pending = false;
                return Some(OutgoingPacket {
                    wire,
                    record: TransmitRecord {
                        packet_number: pkt,
                        packet_type: PacketType::AuthAck,
                        payload_bytes: 0,
                        is_retransmission: false,
                    },
                });
            }
        }
        if self.want_challenge && capacity >= AUTH_PAYLOAD_LEN {
            let mut challenge = [0u8; AUTH_PAYLOAD_LEN];
            challenge_rng.fill_bytes(&mut challenge);
            self.my_challenge = Some(challenge);
            self.want_challenge = false;
            let (wire, pkt, len) =
                self.build_wire(&TypedPayload::Challenge(challenge), policy, flags_rng);
            self.challenge_out = Some(AuthOutstanding {
                wire: wire.clone(),
                packet_number: pkt,
                payload_bytes: len,
                attempts: 1,
                deadline: self.now + self.cfg.timeout_subframes,
                eligible: false,
            });
            return Some(OutgoingPacket {
                wire,
                record: TransmitRecord {
                    packet_number: pkt,
                    packet_type: PacketType::AuthChallenge,
                    payload_bytes: len,
                    is_retransmission: false,
                },
            });
        }
        if let Some(out) = &mut self.challenge_out {
            if out.eligible && capacity >= AUTH_PAYLOAD_LEN {
                out.eligible = false;
                out.attempts += 1;
                out.deadline = self.now + self.cfg.timeout_subframes;
                return Some(OutgoingPacket {
                    wire: out.wire.clone(),
                    record: TransmitRecord {
                        packet_number: out.packet_number,
                        packet_type: PacketType::AuthChallenge,
                        payload_bytes: out.payload_bytes,
                        is_retransmission: true,
                    },
                });
            }
        }

        // 3. Retransmissions, least-recently-sent first.
        let retx_pick = self
            .pending
            .iter()
            .filter(|(_, e)| e.eligible && e.payload_bytes <= capacity)
            .min_by_key(|(_, e)| e.last_tx)
            .map(|(&pkt, _)| pkt);
        if let Some(pkt) = retx_pick {
            let timeout = self.cfg.timeout_subframes;
            let now = self.now;
            let entry = self.pending.get_mut(&pkt).unwrap();
            entry.eligible = false;
            entry.deadline = now + timeout;
            entry.last_tx = now;
            return Some(OutgoingPacket {
                wire: entry.wire.clone(),
                record: TransmitRecord {
                    packet_number: pkt,
                    packet_type: entry.packet_type,
                    payload_bytes: entry.payload_bytes,
                    is_retransmission: true,
                },
            });
        }

        // 4. New data, gated on mutual authentication and window room.
        // The window bounds the sequence span, not just the count: the
        // next sequence number must stay within `window` of the oldest
        // unacknowledged packet, or the receiver could not tell a new
        // packet from a behind-window duplicate.
        let window_full = self
            .pending
            .keys()
            .map(|&k| (self.data_seq + SEQ_MODULUS - k) % SEQ_MODULUS)
            .max()
            .map(|span| span >= self.cfg.window)
            .unwrap_or(false);
        if !self.is_mutual() || self.transfer_failed || window_full {
            return None;
        }
        if let Some(address) = self.announce {
            if capacity < ADDRESS_INFO_LEN {
                return None;
            }
            let (wire, pkt, len) =
                self.build_wire(&TypedPayload::Address(address), policy, flags_rng);
            self.announce = None;
            self.insert_pending(pkt, wire.clone(), PacketType::Address, len);
            return Some(OutgoingPacket {
                wire,
                record: TransmitRecord {
                    packet_number: pkt,
                    packet_type: PacketType::Address,
                    payload_bytes: len,
                    is_retransmission: false,
                },
            });
        }
        if !self.send_buf.is_empty() && capacity > 0 {
            let take = capacity.min(self.send_buf.len());
            let chunk: Vec<u8> = self.send_buf.drain(..take).collect();
            let (wire, pkt, len) = self.build_wire(&TypedPayload::Data(chunk), policy, flags_rng);
            self.insert_pending(pkt, wire.clone(), PacketType::Data, len);
            return Some(OutgoingPacket {
                wire,
                record: TransmitRecord {
                    packet_number: pkt,
                    packet_type: PacketType::Data,
                    payload_bytes: len,
                    is_retransmission: false,
                },
            });
        }
        None
    }

    fn insert_pending(&mut self, pkt: u16, wire: Vec<u8>, ptype: PacketType, len: usize) {
        self.pending.insert(
            pkt,
            PendingPacket {
                wire,
                packet_type: ptype,
                payload_bytes: len,
                retries: 0,
                deadline: self.now + self.cfg.timeout_subframes,
                eligible: false,
                last_tx: self.now,
            },
        );
    }

    /// Process one received opportunity block: detect, extract, dispatch.
    pub fn on_receive(&mut self, block: &[IqSymbol], policy: &EmbedPolicy) -> Vec<LinkEvent> {
        let before = self.events.len();
        self.receive_inner(block, policy);
        self.events.split_off(before)
    }

    fn receive_inner(&mut self, block: &[IqSymbol], policy: &EmbedPolicy) {
        if self.failed {
            return;
        }
        let Some(header) = stego::detect(block, crate::packet::MAX_PAYLOAD_LEN) else {
            return;
        };
        let payload = match stego::extract(block, &header, policy.mode()) {
            Ok(payload) => payload,
            Err(_) => {
                // Valid header, corrupt body: ask for that packet again.
                self.ctrl
                    .push_back((ControlKind::Nack, header.packet_number));
                self.events.push(LinkEvent::NackSent {
                    pkt: header.packet_number,
                });
                return;
            }
        };
        let Ok(typed) = parse_typed_payload(header.packet_type, &payload) else {
            return;
        };
        match typed {
            TypedPayload::Ack(pkt) => self.on_ack(pkt),
            TypedPayload::Nack(pkt) => {
                if let Some(entry) = self.pending.get_mut(&pkt) {
                    entry.eligible = true;
                }
            }
            TypedPayload::Challenge(challenge) => self.on_challenge(challenge, policy),
            TypedPayload::Response(response) => self.on_response(response, policy),
            TypedPayload::AuthAck => self.on_auth_ack(),
            data @ (TypedPayload::Data(_) | TypedPayload::Address(_)) => {
                self.on_data(header.packet_number, data)
            }
        }
    }

    fn on_ack(&mut self, pkt: u16) {
        if self.pending.remove(&pkt).is_some()
            && self.transfer_started
            && !self.complete_emitted
            && self.announce.is_none()
            && self.send_buf.is_empty()
            && self.pending.is_empty()
        {
            self.complete_emitted = true;
            self.events.push(LinkEvent::TransferComplete);
        }
    }

    fn on_challenge(&mut self, challenge: [u8; AUTH_PAYLOAD_LEN], policy: &EmbedPolicy) {
        let digest = hmac_sha256(&self.psk, &challenge);
        let pkt = self.next_seq(false);
        let flag = Self::draw_flag(policy, &mut FixedZeroRng);
        let wire = build_packet(
            PacketType::AuthResponse,
            &digest,
            pkt,
            policy.payload_modulation,
            flag,
        )
        .expect("response packet");
        self.response_out = Some(AuthOutstanding {
            wire,
            packet_number: pkt,
            payload_bytes: digest.len(),
            attempts: 0,
            deadline: self.now,
            eligible: true,
        });
    }

    fn on_response(&mut self, response: [u8; AUTH_PAYLOAD_LEN], policy: &EmbedPolicy) {
        let Some(challenge) = self.my_challenge else {
            return;
        };
        let expected = hmac_sha256(&self.psk, &challenge);
        if response == expected {
            self.challenge_out = None;
            if self.auth_ack_wire.is_none() {
                let pkt = self.next_seq(false);
                let flag = Self::draw_flag(policy, &mut FixedZeroRng);
                let wire =
                    build_packet(PacketType::AuthAck, &[], pkt, policy.payload_modulation, flag)
                        .expect("auth ack packet");
                self.auth_ack_wire = Some((wire, pkt));
            }
            self.verified_peer = true;
            self.auth_ack_pending = true;
            self.note_mutual();
        } else {
            self.failed = true;
            self.events.push(LinkEvent::AuthFailed);
        }
    }

    fn on_auth_ack(&mut self) {
        self.confirmed_by_peer = true;
        self.response_out = None;
        if self.role == Role::Ue && !self.verified_peer && self.my_challenge.is_none() {
            // Our turn: authenticate the peer with our own challenge.
            self.want_challenge = true;
        }
        self.note_mutual();
    }

    fn note_mutual(&mut self) {
        if self.is_mutual() && !self.authenticated_emitted {
            self.authenticated_emitted = true;
            self.events.push(LinkEvent::Authenticated);
        }
    }

    fn on_data(&mut self, pkt: u16, typed: TypedPayload) {
        if !self.is_mutual() {
            return;
        }
        let dist = (pkt + SEQ_MODULUS - self.rx_base) % SEQ_MODULUS;
        if dist >= self.cfg.window {
            if dist >= SEQ_MODULUS - self.cfg.window {
                // Behind the window: already delivered. Re-acknowledge so
                // a sender whose ACK was lost can move on.
                self.events.push(LinkEvent::DuplicateDiscarded { pkt });
                self.ctrl.push_back((ControlKind::Ack, pkt));
                self.events.push(LinkEvent::AckSent { pkt });
            }
            // Anything else is outside the protocol's reachable state;
            // drop it without feedback.
            return;
        }
        if self.reorder.contains_key(&pkt) {
            self.events.push(LinkEvent::DuplicateDiscarded { pkt });
        } else {
            self.reorder.insert(pkt, typed);
        }
        self.ctrl.push_back((ControlKind::Ack, pkt));
        self.events.push(LinkEvent::AckSent { pkt });
        while let Some(entry) = self.reorder.remove(&self.rx_base) {
            match entry {
                TypedPayload::Data(bytes) => {
                    self.delivered_data_pkts += 1;
                    self.events.push(LinkEvent::DataDelivered {
                        pkt: self.rx_base,
                        bytes: bytes.len(),
                    });
                    self.delivered.extend_from_slice(&bytes);
                }
                TypedPayload::Address(info) => {
                    if info.total_packets > 0 {
                        self.expected_total = Some(info.total_packets);
                    }
                }
                _ => unreachable!("only data types enter the reorder buffer"),
            }
            self.rx_base = (self.rx_base + 1) % SEQ_MODULUS;
        }
        if let Some(total) = self.expected_total {
            if !self.rx_complete_emitted && self.delivered_data_pkts >= total as u32 {
                self.rx_complete_emitted = true;
                self.events.push(LinkEvent::TransferComplete);
            }
        }
    }
}

/// Zero RNG for flag draws on packets built inside `on_receive`, where no
/// flag substream is in scope. Fixed-mode packets ignore the flag anyway;
/// undetectable-mode responses get flag 0, which is still demodulated
/// correctly because the flag travels in the header.
struct FixedZeroRng;

impl RngCore for FixedZeroRng {
    fn next_u32(&mut self) -> u32 {
        0
    }
    fn next_u64(&mut self) -> u64 {
        0
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        dest.fill(0);
    }
}
