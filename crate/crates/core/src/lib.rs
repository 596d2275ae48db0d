//! Link-level simulator for a covert channel carried on the amplitudes of
//! QPSK traffic.
//!
//! A transmitter embeds covert packets into blocks of primary QPSK symbols
//! by scaling symbol magnitudes with a low-order ASK constellation. The
//! receiver detects packets from a fixed-modulation header, demodulates the
//! payload with the constellation announced in that header, and runs an
//! ARQ loop (ACK/NACK, timeouts, retransmissions) on top. Both ends
//! mutually authenticate with an HMAC challenge/response exchange before
//! any covert data flows. A parameterizable channel model (AWGN, block
//! fading, opportunity loss) sits between the two, and an analysis layer
//! quantifies detectability via the Kolmogorov-Smirnov distance between
//! magnitude distributions.

pub mod analysis;
pub mod channel;
pub mod codec;
pub mod constellation;
pub mod link;
pub mod packet;
pub mod scenario;
pub mod sim;
pub mod stego;
pub mod traffic;

// pub use channel::{Channel, ChannelModel, Fading, PhaseOffset};
// pub use constellation::{ask_config, AskConfig, AskOrder, ConfigRole, IqSymbol, ThresholdFlag};
// pub use link::{LinkConfig, LinkEvent, LinkSession, Role};
// pub use packet::{AddressInfo, CovertHeader, PacketType};
// pub use scenario::{RunArtifacts, ScenarioConfig};
// pub use sim::{RunMeta, RunOutput, SimOutcome};
// pub use stego::{EmbedPolicy, PayloadMode, TransmissionOpportunity};
// pub use traffic::{PrimarySource, TrafficKind, TrafficModel};
