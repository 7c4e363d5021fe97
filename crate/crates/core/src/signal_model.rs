//! SINRs rebuilt from the raw received-signal chains.
//!
//! Each function here walks one block's physical signal path, tracking
//! signal, interference, and noise powers through the amplify-and-forward
//! hops explicitly, without ever forming the normalized per-link SNRs the
//! closed forms in [`crate::schemes`] are written in. The self-check command
//! and the test suite compare the two routes; keep them independent.

use crate::channel::ChannelDraw;

/// Reference relayed slot: the relay hears the BS packet plus its own noise,
/// normalizes, and forwards; the user decodes against the forwarded noise.
pub fn reference_relayed_sinr(ch: &ChannelDraw) -> f64 {
    let relay_heard = ch.bs_relay.norm_sqr() + ch.noise;
    let g = 1.0 / relay_heard;
    let signal = g * ch.bs_relay.norm_sqr() * ch.relay_user.norm_sqr();
    let forwarded_noise = g * ch.relay_user.norm_sqr() * ch.noise;
    signal / (forwarded_noise + ch.noise)
}

/// Coordinated (direct uplink, relayed downlink), relayed side: like the
/// reference forward but with the direct user's concurrent uplink leaking
/// over the inter-user link.
pub fn s1_relayed_sinr(ch: &ChannelDraw) -> f64 {
    let g = 1.0 / (ch.bs_relay.norm_sqr() + ch.noise);
    let signal = g * ch.bs_relay.norm_sqr() * ch.relay_user.norm_sqr();
    let forwarded_noise = g * ch.relay_user.norm_sqr() * ch.noise;
    let interference = ch.inter_user.norm_sqr();
    signal / (forwarded_noise + interference + ch.noise)
}

/// Coordinated (direct uplink, relayed downlink), direct side: the BS
/// receives the uplink packet during the forward slot and cancels its own
/// forwarded packet, leaving the forwarded relay noise on the floor.
pub fn s1_direct_sinr(ch: &ChannelDraw) -> f64 {
    let g = 1.0 / (ch.bs_relay.norm_sqr() + ch.noise);
    let signal = ch.bs_direct.norm_sqr();
    let forwarded_noise = g * ch.bs_relay.norm_sqr() * ch.noise;
    signal / (forwarded_noise + ch.noise)
}

/// Coordinated (direct downlink, relayed uplink), relayed side: the relay
/// heard both the uplink packet and the BS's own downlink packet; the BS
/// cancels the latter from the forward and decodes the former.
pub fn s2_relayed_sinr(ch: &ChannelDraw) -> f64 {
    let relay_heard = ch.bs_relay.norm_sqr() + ch.relay_user.norm_sqr() + ch.noise;
    let g = 1.0 / relay_heard;
    let signal = g * ch.bs_relay.norm_sqr() * ch.relay_user.norm_sqr();
    let forwarded_noise = g * ch.bs_relay.norm_sqr() * ch.noise;
    signal / (forwarded_noise + ch.noise)
}
