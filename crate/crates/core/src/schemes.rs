//! Two-slot transmission blocks for one (relayed user, direct user) pair.
//!
//! The orthogonal reference block serves the pair in separate slots: the
//! direct user gets a full slot on its BS link, the relayed user gets one
//! slot squeezing both amplify-and-forward hops into half slots. The four
//! coordinated blocks instead overlap one relayed-route packet and one
//! direct-link packet over two full slots, one block per combination of
//! transmission directions, accepting interference in exchange for longer
//! hops. Each block yields a [`RatePair`]: per-user delivered bits over the
//! two slots.
//!
//! The SINR expressions are closed forms in the per-link SNRs; the
//! `signal_model` module rebuilds each one from the raw received-signal
//! chains so the two routes can be checked against each other.

use std::fmt;

use crate::channel::{capacity, ChannelDraw};
use crate::error::Error;
use crate::mmse::{sinr_mmse_closed, NoisePosition, VirtualMimo};

// ======================================================================
// Block identities
// ======================================================================

/// Which two-slot block is run for a pair.
///
/// Coordinated blocks serve fixed transmission directions:
/// `S1` = (direct uplink, relayed downlink), `S2` = (direct downlink,
/// relayed uplink), `S3` = (direct downlink, relayed downlink),
/// `S4` = (direct uplink, relayed uplink). The reference block serves any
/// combination, which is why it carries no direction tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Reference,
    S1,
    S2,
    S3,
    S4,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Reference,
        SchemeKind::S1,
        SchemeKind::S2,
        SchemeKind::S3,
        SchemeKind::S4,
    ];

    pub const COORDINATED: [SchemeKind; 4] =
        [SchemeKind::S1, SchemeKind::S2, SchemeKind::S3, SchemeKind::S4];

    pub fn is_coordinated(self) -> bool {
        !matches!(self, SchemeKind::Reference)
    }

    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::Reference => "REF",
            SchemeKind::S1 => "S1",
            SchemeKind::S2 => "S2",
            SchemeKind::S3 => "S3",
            SchemeKind::S4 => "S4",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-user delivered bits of one two-slot block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    /// Bits delivered to/from the relayed user over the block.
    pub rate_relayed: f64,
    /// Bits delivered to/from the direct user over the block.
    pub rate_direct: f64,
    /// Block duration in slots.
    pub slots: f64,
    /// Total delivered bits, `rate_relayed + rate_direct`.
    pub bits: f64,
}

fn two_slot_block(rate_relayed: f64, rate_direct: f64) -> RatePair {
    RatePair {
        rate_relayed,
        rate_direct,
        slots: 2.0,
        bits: rate_relayed + rate_direct,
    }
}

/// Time-reallocation factor strictly inside (-1, 1).
///
/// Positive values shorten both coordinated slots and hand the freed time to
/// extra direct-link traffic; negative values hand it to an extra two-hop
/// relayed packet. Zero reproduces the plain coordinated block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorityFactor(f64);

impl PriorityFactor {
    pub const NEUTRAL: PriorityFactor = PriorityFactor(0.0);

    pub fn new(lambda: f64) -> Result<Self, Error> {
        if lambda.is_finite() && lambda.abs() < 1.0 {
            Ok(PriorityFactor(lambda))
        } else {
            Err(Error::PriorityOutOfRange(lambda))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

// ======================================================================
// Amplify-and-forward bookkeeping
// ======================================================================

/// Relay power normalization: transmit gain applied to everything the relay
/// heard in one slot, so that `gain * received_power = 1`.
fn amplify_gain(received_power: f64) -> f64 {
    1.0 / received_power
}

/// Virtual two-branch system the direct user solves when its downlink runs
/// next to a relayed uplink: branch 1 is the broadcast slot (desired downlink
/// packet plus the relayed user's packet leaking over the inter-user link),
/// branch 2 the relay's forward slot, which carries scaled copies of both
/// packets plus forwarded relay noise.
pub fn s2_direct_system(ch: &ChannelDraw) -> VirtualMimo {
    let g = amplify_gain(ch.bs_relay.norm_sqr() + ch.relay_user.norm_sqr() + ch.noise);
    let fwd = g.sqrt();
    VirtualMimo {
        desired: [ch.bs_direct, ch.bs_relay * ch.relay_direct * fwd],
        interferer: [ch.inter_user, ch.relay_user * ch.relay_direct * fwd],
        noise: ch.noise,
        alpha: 1.0 + g * ch.relay_direct.norm_sqr(),
        alpha_position: NoisePosition::SecondBranch,
    }
}

/// Virtual two-branch system the direct user solves when both downlinks run
/// coordinated: branch 1 is the first slot, where it overhears the relayed
/// user's packet; branch 2 the second slot, where its own packet arrives
/// next to the relay's forward of the same overheard packet.
pub fn s3_direct_system(ch: &ChannelDraw) -> VirtualMimo {
    let g = amplify_gain(ch.bs_relay.norm_sqr() + ch.noise);
    let fwd = g.sqrt();
    let zero = crate::channel::ComplexGain::new(0.0, 0.0);
    VirtualMimo {
        desired: [zero, ch.bs_direct],
        interferer: [ch.bs_direct, ch.bs_relay * ch.relay_direct * fwd],
        noise: ch.noise,
        alpha: 1.0 + g * ch.relay_direct.norm_sqr(),
        alpha_position: NoisePosition::SecondBranch,
    }
}

/// The two virtual systems the BS solves when both uplinks run coordinated:
/// branch 1 is the first slot (direct user's packet arrives straight),
/// branch 2 the relay's forward slot carrying both uplink packets. The first
/// returned system decodes the relayed user's packet, the second the direct
/// user's.
pub fn s4_uplink_systems(ch: &ChannelDraw) -> (VirtualMimo, VirtualMimo) {
    let g = amplify_gain(ch.relay_user.norm_sqr() + ch.relay_direct.norm_sqr() + ch.noise);
    let fwd = g.sqrt();
    let zero = crate::channel::ComplexGain::new(0.0, 0.0);
    let relayed_col = [zero, ch.bs_relay * ch.relay_user * fwd];
    let direct_col = [ch.bs_direct, ch.bs_relay * ch.relay_direct * fwd];
    let alpha = 1.0 + g * ch.bs_relay.norm_sqr();
    let relayed = VirtualMimo {
        desired: relayed_col,
        interferer: direct_col,
        noise: ch.noise,
        alpha,
        alpha_position: NoisePosition::SecondBranch,
    };
    let direct = VirtualMimo {
        desired: direct_col,
        interferer: relayed_col,
        noise: ch.noise,
        alpha,
        alpha_position: NoisePosition::SecondBranch,
    };
    (relayed, direct)
}

// ======================================================================
// Per-stream SINRs
// ======================================================================

/// Relayed-downlink SINR when the relayed user decodes the relay's forward
/// under interference from the direct user's concurrent uplink leaking over
/// the inter-user link.
pub fn sinr_s1_relayed(ch: &ChannelDraw) -> f64 {
    let g1 = ch.snr_bs_relay();
    let g2 = ch.snr_relay_user();
    let g4 = ch.snr_inter_user();
    g1 * g2 / (g1 + g2 + g4 + g1 * g4 + 1.0)
}

/// Direct-uplink SINR when the BS receives the direct user's packet during
/// the relay's forward slot and cancels its own forwarded packet, leaving
/// the forwarded relay noise.
pub fn sinr_s1_direct(ch: &ChannelDraw) -> f64 {
    let g1 = ch.snr_bs_relay();
    let g3 = ch.snr_bs_direct();
    g3 * (g1 + 1.0) / (2.0 * g1 + 1.0)
}

/// Relayed-uplink SINR when the BS decodes the forwarded packet after
/// canceling its own downlink packet, which the relay had picked up and
/// forwarded along.
pub fn sinr_s2_relayed(ch: &ChannelDraw) -> f64 {
    let g1 = ch.snr_bs_relay();
    let g2 = ch.snr_relay_user();
    g1 * g2 / (2.0 * g1 + g2 + 1.0)
}

/// Direct-downlink SINR of the two-branch MMSE receiver in the concurrent
/// downlink/relayed-uplink block.
pub fn sinr_s2_direct(ch: &ChannelDraw) -> f64 {
    sinr_mmse_closed(&s2_direct_system(ch))
}

/// Relayed-downlink SINR when the relay's forward slot is free of
/// interference: the plain two-hop route over a full slot.
pub fn sinr_s3_relayed(ch: &ChannelDraw) -> f64 {
    ch.relay_route_snr()
}

/// Direct-downlink SINR of the two-branch MMSE receiver that combines the
/// overheard first slot with its own second slot.
pub fn sinr_s3_direct(ch: &ChannelDraw) -> f64 {
    let g1 = ch.snr_bs_relay();
    let g3 = ch.snr_bs_direct();
    let g5 = ch.snr_relay_direct();
    g3 * (g3 + 1.0) * (g1 + 1.0) / ((g1 + g5 + 1.0) * (g3 + 1.0) + g1 * g5)
}

/// Relayed-uplink SINR at the BS when both uplinks share the relay's
/// forward.
pub fn sinr_s4_relayed(ch: &ChannelDraw) -> f64 {
    let g1 = ch.snr_bs_relay();
    let g2 = ch.snr_relay_user();
    let g3 = ch.snr_bs_direct();
    let g5 = ch.snr_relay_direct();
    g1 * g2 * (g3 + 1.0) / (g1 * g5 + (g1 + g2 + g5 + 1.0) * (g3 + 1.0))
}

/// Direct-uplink SINR at the BS when both uplinks share the relay's forward:
/// the straight first-slot copy plus a combining gain from the forward.
pub fn sinr_s4_direct(ch: &ChannelDraw) -> f64 {
    let g1 = ch.snr_bs_relay();
    let g2 = ch.snr_relay_user();
    let g3 = ch.snr_bs_direct();
    let g5 = ch.snr_relay_direct();
    g3 + g1 * g5 / (g1 + g2 + g5 + g1 * g2 + 1.0)
}

// ======================================================================
// Block rates
// ======================================================================

/// Orthogonal reference block: one full direct slot, one relayed slot with
/// half-slot hops.
pub fn rate_reference(ch: &ChannelDraw) -> RatePair {
    two_slot_block(
        0.5 * capacity(ch.relay_route_snr()),
        capacity(ch.snr_bs_direct()),
    )
}

pub fn rate_s1(ch: &ChannelDraw) -> RatePair {
    two_slot_block(capacity(sinr_s1_relayed(ch)), capacity(sinr_s1_direct(ch)))
}

pub fn rate_s2(ch: &ChannelDraw) -> RatePair {
    two_slot_block(capacity(sinr_s2_relayed(ch)), capacity(sinr_s2_direct(ch)))
}

pub fn rate_s3(ch: &ChannelDraw) -> RatePair {
    two_slot_block(capacity(sinr_s3_relayed(ch)), capacity(sinr_s3_direct(ch)))
}

pub fn rate_s4(ch: &ChannelDraw) -> RatePair {
    two_slot_block(capacity(sinr_s4_relayed(ch)), capacity(sinr_s4_direct(ch)))
}

pub fn rate_for(kind: SchemeKind, ch: &ChannelDraw) -> RatePair {
    match kind {
        SchemeKind::Reference => rate_reference(ch),
        SchemeKind::S1 => rate_s1(ch),
        SchemeKind::S2 => rate_s2(ch),
        SchemeKind::S3 => rate_s3(ch),
        SchemeKind::S4 => rate_s4(ch),
    }
}

/// Coordinated block with part of its time reallocated by `priority`.
///
/// For `priority >= 0` both coordinated slots shrink by that fraction and
/// the freed time carries extra direct-link traffic; for `priority < 0` the
/// freed time carries an extra two-hop relayed packet, each hop taking half
/// of it. At zero this is exactly the plain block.
pub fn rate_prioritized(
    kind: SchemeKind,
    ch: &ChannelDraw,
    priority: PriorityFactor,
) -> Result<RatePair, Error> {
    if !kind.is_coordinated() {
        return Err(Error::SchemeNotCoordinated(kind));
    }
    let base = rate_for(kind, ch);
    let lam = priority.get();
    let (relayed, direct) = if lam >= 0.0 {
        (
            (1.0 - lam) * base.rate_relayed,
            (1.0 - lam) * base.rate_direct + 2.0 * lam * capacity(ch.snr_bs_direct()),
        )
    } else {
        // Time share written as the block rate plus the scaled gap to the
        // dedicated relay-route rate, so a zero gap stays exactly flat.
        let dedicated = capacity(ch.relay_route_snr());
        (
            base.rate_relayed + lam * (base.rate_relayed - dedicated),
            (1.0 + lam) * base.rate_direct,
        )
    };
    Ok(two_slot_block(relayed, direct))
}

// ======================================================================
// Tests
// ======================================================================
