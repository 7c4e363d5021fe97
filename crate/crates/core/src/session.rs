//! Monte Carlo simulation of scheduling sessions.
//!
//! A session starts with `k` direct and `k` relayed users, each posting one
//! request whose direction is uplink with probability `p_u`. Frames are then
//! built under one scheduling discipline, with an independent network fading
//! state per frame, until the waiting list drains. Session throughput is
//! delivered bits over occupied slots, idle slots included.
//!
//! Randomness is laid out in substreams keyed by (session, slot): slot 0
//! feeds traffic generation, slot `f + 1` feeds frame `f`. Every draw is
//! therefore a pure function of the master seed and those indices, so runs
//! are reproducible, independent of worker count, and disciplines compared
//! under the same seed see identical traffic and fading (common random
//! numbers).

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{draw_network, ChannelDraw, NetworkChannelState, StreamFactory};
use crate::error::Error;
use crate::scheduler::{build_frame, FrameSchedule, SchedulerKind, TrafficType, WaitingList};
use crate::schemes::{rate_prioritized, rate_reference, PriorityFactor, RatePair, SchemeKind};

// ======================================================================
// Configuration
// ======================================================================

/// Parameters of one Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    /// Users per side (`k` direct and `k` relayed).
    pub users_per_side: usize,
    /// Probability that a request is uplink.
    pub uplink_probability: f64,
    /// Receiver noise power.
    pub noise: f64,
    /// Prioritizing factor applied when settling coordinated pair blocks.
    pub priority: PriorityFactor,
    pub scheduler: SchedulerKind,
    pub sessions: usize,
    pub seed: u64,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.users_per_side == 0 {
            return Err(Error::EmptyNetwork);
        }
        if !self.uplink_probability.is_finite()
            || !(0.0..=1.0).contains(&self.uplink_probability)
        {
            return Err(Error::ProbabilityOutOfRange(self.uplink_probability));
        }
        if self.noise <= 0.0 || !self.noise.is_finite() {
            return Err(Error::NonPositiveNoise(self.noise));
        }
        if self.sessions == 0 {
            return Err(Error::NoSessions);
        }
        assert!(
            (self.sessions as u64) < (1 << 40),
            "session indices above 2^40 would collide in the substream layout"
        );
        Ok(())
    }
}

// ======================================================================
// Substream layout
// ======================================================================

const SLOT_BITS: u32 = 24;

fn traffic_stream_id(session: u64) -> u64 {
    session << SLOT_BITS
}

fn frame_stream_id(session: u64, frame: u64) -> u64 {
    assert!(
        frame + 1 < (1 << SLOT_BITS),
        "frame index {frame} exceeds the substream layout"
    );
    (session << SLOT_BITS) | (frame + 1)
}

// ======================================================================
// Session mechanics
// ======================================================================

/// Draws one request per user on each side: uplink with probability
/// `uplink_probability`, downlink otherwise, direct users first.
pub fn generate_waiting_list<R: Rng + ?Sized>(
    users_per_side: usize,
    uplink_probability: f64,
    rng: &mut R,
) -> WaitingList {
    let mut wl = WaitingList::new();
    for d in 0..users_per_side {
        let t = if rng.gen_bool(uplink_probability) {
            TrafficType::DirectUplink
        } else {
            TrafficType::DirectDownlink
        };
        wl.push(t, d);
    }
    for r in 0..users_per_side {
        let t = if rng.gen_bool(uplink_probability) {
            TrafficType::RelayedUplink
        } else {
            TrafficType::RelayedDownlink
        };
        wl.push(t, r);
    }
    wl
}

/// Re-settles the delivered bits of coordinated pair blocks under a nonzero
/// prioritizing factor. Selection already happened at neutral priority; only
/// what a formed pair delivers changes. Leftover and idle blocks keep their
/// reference-style service.
fn settle_priority(
    frame: &mut FrameSchedule,
    state: &NetworkChannelState,
    priority: PriorityFactor,
) -> Result<(), Error> {
    if priority.get() == 0.0 {
        return Ok(());
    }
    let mut bits = 0.0;
    let mut slots = 0.0;
    for a in &mut frame.assignments {
        if a.is_pair() {
            let draw = state.pair(a.relayed.unwrap(), a.direct.unwrap())?;
            a.rate = rate_prioritized(a.scheme, &draw, priority)?;
        }
        bits += a.rate.bits;
        slots += a.rate.slots;
    }
    frame.frame_bits = bits;
    frame.frame_slots = slots;
    Ok(())
}

/// Accumulated outcome of one session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionResult {
    pub total_bits: f64,
    pub total_slots: f64,
    pub frames: usize,
    pub relayed_bits: f64,
    pub direct_bits: f64,
}

impl SessionResult {
    pub fn throughput(&self) -> f64 {
        self.total_bits / self.total_slots
    }
}

/// Runs one complete session: generates traffic, then builds frames until
/// the waiting list drains.
pub fn run_session(cfg: &SessionConfig, session: u64) -> Result<SessionResult, Error> {
    cfg.validate()?;
    let factory = StreamFactory::new(cfg.seed);
    let mut traffic_rng = factory.stream(traffic_stream_id(session));
    let mut wl = generate_waiting_list(
        cfg.users_per_side,
        cfg.uplink_probability,
        &mut traffic_rng,
    );
    let total_requests = wl.total_pending();

    let mut result = SessionResult {
        total_bits: 0.0,
        total_slots: 0.0,
        frames: 0,
        relayed_bits: 0.0,
        direct_bits: 0.0,
    };
    while !wl.is_empty() {
        let mut frame_rng = factory.stream(frame_stream_id(session, result.frames as u64));
        let state = draw_network(cfg.users_per_side, cfg.noise, &mut frame_rng)?;
        let mut frame = build_frame(cfg.scheduler, &mut wl, &state)?;
        settle_priority(&mut frame, &state, cfg.priority)?;
        result.total_bits += frame.frame_bits;
        result.total_slots += frame.frame_slots;
        result.frames += 1;
        for a in &frame.assignments {
            result.relayed_bits += a.rate.rate_relayed;
            result.direct_bits += a.rate.rate_direct;
        }
        assert!(
            result.frames <= total_requests,
            "scheduler failed to make progress"
        );
    }
    Ok(result)
}

// ======================================================================
// Monte Carlo aggregation
// ======================================================================

/// Sample statistics over sessions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    /// Mean of per-session throughput (bits per slot).
    pub mean_throughput: f64,
    /// Standard error of that mean.
    pub std_error: f64,
    /// Mean per-session relayed-side bits per slot.
    pub mean_rate_relayed: f64,
    /// Mean per-session direct-side bits per slot.
    pub mean_rate_direct: f64,
    pub sessions: usize,
}

fn kahan_sum<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Mean and standard error of the mean; the error is 0 for a single value.
fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = kahan_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    let variance = ss / (n - 1.0);
    (mean, (variance / n).sqrt())
}

/// Runs `cfg.sessions` independent sessions in parallel and aggregates them.
///
/// Sessions are keyed by index, collected in index order, and reduced
/// sequentially, so the result does not depend on the number of worker
/// threads.
pub fn run_monte_carlo(cfg: &SessionConfig) -> Result<AggregateStats, Error> {
    cfg.validate()?;
    let results: Result<Vec<SessionResult>, Error> = (0..cfg.sessions as u64)
        .into_par_iter()
        .map(|session| run_session(cfg, session))
        .collect();
    let results = results?;

    let throughputs: Vec<f64> = results.iter().map(SessionResult::throughput).collect();
    let (mean_throughput, std_error) = mean_and_std_error(&throughputs);
    let relayed: Vec<f64> = results
        .iter()
        .map(|r| r.relayed_bits / r.total_slots)
        .collect();
    let direct: Vec<f64> = results
        .iter()
        .map(|r| r.direct_bits / r.total_slots)
        .collect();
    Ok(AggregateStats {
        mean_throughput,
        std_error,
        mean_rate_relayed: mean_and_std_error(&relayed).0,
        mean_rate_direct: mean_and_std_error(&direct).0,
        sessions: cfg.sessions,
    })
}

// ======================================================================
// Two-user rate sweep
// ======================================================================

/// Parameters of a two-user prioritizing-factor sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub noise: f64,
    /// Independent channel draws averaged per grid point.
    pub draws: usize,
    pub seed: u64,
}

/// Mean rates of one scheme at one prioritizing factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub scheme: SchemeKind,
    pub rate_relayed_mean: f64,
    pub rate_direct_mean: f64,
    pub sum_mean: f64,
    pub std_err: f64,
}

/// Sweeps the prioritizing factor over `grid` for a single (relayed, direct)
/// pair and every scheme.
///
/// The same channel draws are reused for every grid point and scheme, so
/// curves differ only through the rate formulas, not through sampling noise.
/// The reference scheme ignores the prioritizing factor; its row repeats at
/// each grid point as the baseline.
pub fn lambda_sweep(cfg: &SweepConfig, grid: &[f64]) -> Result<Vec<SweepRow>, Error> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if cfg.draws == 0 {
        return Err(Error::NoSessions);
    }
    let priorities: Vec<PriorityFactor> = grid
        .iter()
        .map(|&l| PriorityFactor::new(l))
        .collect::<Result<_, _>>()?;

    let factory = StreamFactory::new(cfg.seed);
    let mut rng = factory.stream(0);
    let draws: Vec<ChannelDraw> = (0..cfg.draws)
        .map(|_| ChannelDraw::sample(cfg.noise, &mut rng))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(grid.len() * SchemeKind::ALL.len());
    for (&lambda, &priority) in grid.iter().zip(&priorities) {
        for scheme in SchemeKind::ALL {
            let rates: Vec<RatePair> = draws
                .iter()
                .map(|d| {
                    if scheme == SchemeKind::Reference {
                        Ok(rate_reference(d))
                    } else {
                        rate_prioritized(scheme, d, priority)
                    }
                })
                .collect::<Result<_, _>>()?;
            let relayed: Vec<f64> = rates.iter().map(|r| r.rate_relayed).collect();
            let direct: Vec<f64> = rates.iter().map(|r| r.rate_direct).collect();
            let sums: Vec<f64> = rates.iter().map(|r| r.bits).collect();
            let (sum_mean, std_err) = mean_and_std_error(&sums);
            rows.push(SweepRow {
                lambda,
                scheme,
                rate_relayed_mean: mean_and_std_error(&relayed).0,
                rate_direct_mean: mean_and_std_error(&direct).0,
                sum_mean,
                std_err,
            });
        }
    }
    Ok(rows)
}

// ======================================================================
// Tests
// ======================================================================
