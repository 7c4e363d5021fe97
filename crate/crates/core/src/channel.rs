//! Rayleigh-fading channel state for the relay-aided cell.
//!
//! Every link fades independently with unit mean power gain, every receiver
//! sees the same noise power, and all nodes transmit at unit power, so the
//! instantaneous SNR of a link is `|h|^2 / noise` and rates are Shannon
//! capacities at unit bandwidth. Two granularities are exposed: a
//! [`ChannelDraw`] holds the five links involved in one (relayed user,
//! direct user) pair, while a [`NetworkChannelState`] holds the whole cell
//! for a frame and hands out pair views of itself.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;

/// Complex baseband gain of one fading link.
pub type ComplexGain = Complex64;

// ======================================================================
// Scalar building blocks
// ======================================================================

/// Draws one unit-mean Rayleigh fading gain.
///
/// Each quadrature component is zero-mean Gaussian with variance 1/2, so the
/// power gain `|h|^2` is unit-mean exponential.
pub fn draw_rayleigh<R: Rng + ?Sized>(rng: &mut R) -> ComplexGain {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ComplexGain::new(
        re * std::f64::consts::FRAC_1_SQRT_2,
        im * std::f64::consts::FRAC_1_SQRT_2,
    )
}

/// Instantaneous SNR of a link with gain `h` under unit transmit power.
///
/// Panics if `noise` is not strictly positive.
pub fn snr(h: ComplexGain, noise: f64) -> f64 {
    assert!(noise > 0.0, "noise power must be positive, got {noise}");
    h.norm_sqr() / noise
}

/// Shannon capacity `log2(1 + snr)` at unit bandwidth.
///
/// Panics if `snr` is negative.
pub fn capacity(snr: f64) -> f64 {
    assert!(snr >= 0.0, "SNR must be nonnegative, got {snr}");
    snr.ln_1p() / std::f64::consts::LN_2
}

/// End-to-end SNR of the two-hop amplify-and-forward route through the relay.
///
/// With per-hop SNRs `a` (first hop) and `b` (second hop) and the relay
/// normalizing its transmit power to 1, the cascaded SNR is
/// `a * b / (a + b + 1)`.
pub fn relay_route_snr(first_hop_snr: f64, second_hop_snr: f64) -> f64 {
    first_hop_snr * second_hop_snr / (first_hop_snr + second_hop_snr + 1.0)
}

// ======================================================================
// Random substreams
// ======================================================================

/// Deterministic factory of independent random substreams from one master
/// seed.
///
/// Identical seeds reproduce identical streams, and distinct substream ids
/// yield statistically independent sequences, so parallel work items can each
/// take their own stream and results stay independent of evaluation order and
/// worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamFactory {
    seed: u64,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        StreamFactory { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Returns the generator for one substream.
    pub fn stream(&self, substream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(substream);
        rng
    }
}

// ======================================================================
// Pair-level state
// ======================================================================

/// Fading state of the five links involved in one (relayed user, direct
/// user) pair, plus the common receiver noise power.
#[derive(Debug, Clone, Copy)]
pub struct ChannelDraw {
    /// BS-RS link.
    pub bs_relay: ComplexGain,
    /// RS-(relayed user) link.
    pub relay_user: ComplexGain,
    /// BS-(direct user) link.
    pub bs_direct: ComplexGain,
    /// (relayed user)-(direct user) link.
    pub inter_user: ComplexGain,
    /// RS-(direct user) link.
    pub relay_direct: ComplexGain,
    /// Noise power common to all receivers. Must be strictly positive.
    pub noise: f64,
}

impl ChannelDraw {
    /// Draws all five links independently.
    pub fn sample<R: Rng + ?Sized>(noise: f64, rng: &mut R) -> Result<Self, Error> {
        if noise <= 0.0 || !noise.is_finite() {
            return Err(Error::NonPositiveNoise(noise));
        }
        Ok(ChannelDraw {
            bs_relay: draw_rayleigh(rng),
            relay_user: draw_rayleigh(rng),
            bs_direct: draw_rayleigh(rng),
            inter_user: draw_rayleigh(rng),
            relay_direct: draw_rayleigh(rng),
            noise,
        })
    }

    pub fn snr_bs_relay(&self) -> f64 {
        snr(self.bs_relay, self.noise)
    }

    pub fn snr_relay_user(&self) -> f64 {
        snr(self.relay_user, self.noise)
    }

    pub fn snr_bs_direct(&self) -> f64 {
        snr(self.bs_direct, self.noise)
    }

    pub fn snr_inter_user(&self) -> f64 {
        snr(self.inter_user, self.noise)
    }

    pub fn snr_relay_direct(&self) -> f64 {
        snr(self.relay_direct, self.noise)
    }

    /// End-to-end SNR of the BS-RS-user amplify-and-forward route.
    pub fn relay_route_snr(&self) -> f64 {
        relay_route_snr(self.snr_bs_relay(), self.snr_relay_user())
    }
}

// ======================================================================
// Cell-level state
// ======================================================================

/// Fading state of the whole cell for one frame: `k` relayed users and `k`
/// direct users share one BS-RS link, and every (relayed, direct) pair has
/// its own inter-user link.
#[derive(Debug, Clone)]
pub struct NetworkChannelState {
    bs_relay: ComplexGain,
    relay_user: Vec<ComplexGain>,
    bs_direct: Vec<ComplexGain>,
    relay_direct: Vec<ComplexGain>,
    /// Row-major `[relayed * k + direct]`.
    inter_user: Vec<ComplexGain>,
    noise: f64,
}

/// Draws the full network fading state for `k` users per side.
pub fn draw_network<R: Rng + ?Sized>(
    k: usize,
    noise: f64,
    rng: &mut R,
) -> Result<NetworkChannelState, Error> {
    if k == 0 {
        return Err(Error::EmptyNetwork);
    }
    if noise <= 0.0 || !noise.is_finite() {
        return Err(Error::NonPositiveNoise(noise));
    }
    fn draw_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<ComplexGain> {
        (0..len).map(|_| draw_rayleigh(rng)).collect()
    }
    Ok(NetworkChannelState {
        bs_relay: draw_rayleigh(rng),
        relay_user: draw_vec(rng, k),
        bs_direct: draw_vec(rng, k),
        relay_direct: draw_vec(rng, k),
        inter_user: draw_vec(rng, k * k),
        noise,
    })
}

impl NetworkChannelState {
    /// Assembles a state from explicit link gains, mainly for deterministic
    /// experiments and tests. `relay_user` and `bs_direct` / `relay_direct`
    /// must have one entry per user of their side, and `inter_user` holds the
    /// `k * k` cross links in row-major `[relayed * k + direct]` order.
    pub fn from_gains(
        bs_relay: ComplexGain,
        relay_user: Vec<ComplexGain>,
        bs_direct: Vec<ComplexGain>,
        relay_direct: Vec<ComplexGain>,
        inter_user: Vec<ComplexGain>,
        noise: f64,
    ) -> Result<Self, Error> {
        let k = relay_user.len();
        if k == 0 {
            return Err(Error::EmptyNetwork);
        }
        if noise <= 0.0 || !noise.is_finite() {
            return Err(Error::NonPositiveNoise(noise));
        }
        assert_eq!(bs_direct.len(), k, "one BS link per direct user");
        assert_eq!(relay_direct.len(), k, "one RS link per direct user");
        assert_eq!(inter_user.len(), k * k, "one cross link per pair");
        Ok(NetworkChannelState {
            bs_relay,
            relay_user,
            bs_direct,
            relay_direct,
            inter_user,
            noise,
        })
    }

    pub fn users_per_side(&self) -> usize {
        self.relay_user.len()
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    fn check(&self, index: usize) -> Result<(), Error> {
        if index < self.users_per_side() {
            Ok(())
        } else {
            Err(Error::UserIndexOutOfRange {
                index,
                count: self.users_per_side(),
            })
        }
    }

    /// SNR of the BS link of one direct user (both uplink and downlink use
    /// the same reciprocal gain).
    pub fn direct_snr(&self, direct: usize) -> Result<f64, Error> {
        self.check(direct)?;
        Ok(snr(self.bs_direct[direct], self.noise))
    }

    /// End-to-end amplify-and-forward SNR of one relayed user's route.
    pub fn relay_route_snr(&self, relayed: usize) -> Result<f64, Error> {
        self.check(relayed)?;
        Ok(relay_route_snr(
            snr(self.bs_relay, self.noise),
            snr(self.relay_user[relayed], self.noise),
        ))
    }

    /// Extracts the five-link view of one (relayed, direct) pair.
    pub fn pair(&self, relayed: usize, direct: usize) -> Result<ChannelDraw, Error> {
        self.check(relayed)?;
        self.check(direct)?;
        Ok(ChannelDraw {
            bs_relay: self.bs_relay,
            relay_user: self.relay_user[relayed],
            bs_direct: self.bs_direct[direct],
            inter_user: self.inter_user[relayed * self.users_per_side() + direct],
            relay_direct: self.relay_direct[direct],
            noise: self.noise,
        })
    }
}

// ======================================================================
// Tests
// ======================================================================
