//! Multi-user frame scheduling over four traffic queues.
//!
//! Pending requests sit in FIFO queues keyed by [`TrafficType`]. A frame is
//! four slots long either way it is built: the reference discipline spends
//! one slot per traffic type, the coordinated disciplines run two two-slot
//! blocks whose schemes serve disjoint traffic types (S1+S2 or S3+S4).
//! Disciplines differ only in how they pick the users a block serves; given
//! the same waiting list and channel state they are all deterministic,
//! including tie-breaks (lowest user index, lexicographic over
//! (direct, relayed) for pairs, family S34 over S12).
//!
//! When a coordinated block cannot form a pair, the head-of-line leftover on
//! the nonempty side (if any) is served reference-style inside the block:
//! one active slot at the reference rate, the rest of the block idle. Idle
//! slots still count toward frame time.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::channel::{capacity, NetworkChannelState};
use crate::error::Error;
use crate::schemes::{rate_for, RatePair, SchemeKind};

// ======================================================================
// Traffic vocabulary
// ======================================================================

/// The four request types a user can wait with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrafficType {
    DirectDownlink,
    DirectUplink,
    RelayedDownlink,
    RelayedUplink,
}

impl TrafficType {
    /// All types, in the slot order of a reference frame.
    pub const ALL: [TrafficType; 4] = [
        TrafficType::DirectDownlink,
        TrafficType::DirectUplink,
        TrafficType::RelayedDownlink,
        TrafficType::RelayedUplink,
    ];

    pub fn is_direct(self) -> bool {
        matches!(self, TrafficType::DirectDownlink | TrafficType::DirectUplink)
    }

    pub fn is_uplink(self) -> bool {
        matches!(self, TrafficType::DirectUplink | TrafficType::RelayedUplink)
    }

    fn index(self) -> usize {
        match self {
            TrafficType::DirectDownlink => 0,
            TrafficType::DirectUplink => 1,
            TrafficType::RelayedDownlink => 2,
            TrafficType::RelayedUplink => 3,
        }
    }
}

impl SchemeKind {
    /// The (direct-side, relayed-side) traffic types a coordinated block
    /// serves; the reference block serves any combination.
    pub fn served_traffic(self) -> Option<(TrafficType, TrafficType)> {
        match self {
            SchemeKind::Reference => None,
            SchemeKind::S1 => Some((TrafficType::DirectUplink, TrafficType::RelayedDownlink)),
            SchemeKind::S2 => Some((TrafficType::DirectDownlink, TrafficType::RelayedUplink)),
            SchemeKind::S3 => Some((TrafficType::DirectDownlink, TrafficType::RelayedDownlink)),
            SchemeKind::S4 => Some((TrafficType::DirectUplink, TrafficType::RelayedUplink)),
        }
    }
}

/// Four FIFO queues of pending requests.
///
/// Queue entries are user indices into the matching side of the network
/// state: direct queues hold direct-user indices, relayed queues hold
/// relayed-user indices. A user appears in at most one queue of its side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WaitingList {
    queues: [VecDeque<usize>; 4],
}

impl WaitingList {
    pub fn new() -> Self {
        WaitingList::default()
    }

    pub fn push(&mut self, traffic: TrafficType, user: usize) {
        debug_assert!(
            !self.on_same_side(traffic, user),
            "user {user} already queued on this side"
        );
        self.queues[traffic.index()].push_back(user);
    }

    fn on_same_side(&self, traffic: TrafficType, user: usize) -> bool {
        TrafficType::ALL
            .iter()
            .filter(|t| t.is_direct() == traffic.is_direct())
            .any(|t| self.queues[t.index()].contains(&user))
    }

    pub fn queue(&self, traffic: TrafficType) -> &VecDeque<usize> {
        &self.queues[traffic.index()]
    }

    pub fn pop_front(&mut self, traffic: TrafficType) -> Option<usize> {
        self.queues[traffic.index()].pop_front()
    }

    /// Removes `user` from the given queue regardless of position.
    pub fn remove(&mut self, traffic: TrafficType, user: usize) -> bool {
        let q = &mut self.queues[traffic.index()];
        match q.iter().position(|&u| u == user) {
            Some(at) => {
                q.remove(at);
                true
            }
            None => false,
        }
    }

    pub fn total_pending(&self) -> usize {
        self.queues.iter().map(VecDeque::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.queues.iter().all(VecDeque::is_empty)
    }
}

// ======================================================================
// Frame structure
// ======================================================================

/// The two coordinated block pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordFamily {
    S12,
    S34,
}

impl CoordFamily {
    pub const BOTH: [CoordFamily; 2] = [CoordFamily::S12, CoordFamily::S34];

    pub fn blocks(self) -> [SchemeKind; 2] {
        match self {
            CoordFamily::S12 => [SchemeKind::S1, SchemeKind::S2],
            CoordFamily::S34 => [SchemeKind::S3, SchemeKind::S4],
        }
    }

    pub fn frame_family(self) -> FrameFamily {
        match self {
            CoordFamily::S12 => FrameFamily::S12,
            CoordFamily::S34 => FrameFamily::S34,
        }
    }
}

/// How a built frame ended up structured: a coordinated family that formed
/// at least one pair, a pure reference frame, or a coordinated frame that
/// degenerated to leftovers only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFamily {
    S12,
    S34,
    Reference,
    Partial,
}

/// One block (or reference slot) of a frame: the scheme that ran, the users
/// it served, and the realized rates. A coordinated block that could not
/// form a pair keeps its scheme tag and serves at most one leftover
/// reference-style.
#[derive(Debug, Clone, Copy)]
pub struct Assignment {
    pub scheme: SchemeKind,
    pub relayed: Option<usize>,
    pub direct: Option<usize>,
    pub rate: RatePair,
}

impl Assignment {
    pub fn is_pair(&self) -> bool {
        self.relayed.is_some() && self.direct.is_some()
    }
}

/// The scheduler's decision for one frame.
#[derive(Debug, Clone)]
pub struct FrameSchedule {
    pub family: FrameFamily,
    pub assignments: Vec<Assignment>,
    /// Sum of the assignments' delivered bits.
    pub frame_bits: f64,
    /// Sum of the assignments' slots, idle ones included.
    pub frame_slots: f64,
}

impl FrameSchedule {
    fn from_assignments(family: FrameFamily, assignments: Vec<Assignment>) -> Self {
        let frame_bits = assignments.iter().map(|a| a.rate.bits).sum();
        let frame_slots = assignments.iter().map(|a| a.rate.slots).sum();
        FrameSchedule {
            family,
            assignments,
            frame_bits,
            frame_slots,
        }
    }
}

// ======================================================================
// Disciplines
// ======================================================================

/// The scheduling disciplines under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    /// One slot per traffic type, FIFO heads, no coordination.
    Reference,
    /// FIFO heads into fixed S1+S2 blocks.
    FixedS12,
    /// FIFO heads into fixed S3+S4 blocks.
    FixedS34,
    /// Per-block search over all candidate pairs, better family wins.
    Exhaustive,
    /// Direct side fixed by best direct-link SNR, relayed partner searched.
    BestDirect,
    /// Relayed side fixed by best relay-route SNR, direct partner searched.
    BestRelayed,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 6] = [
        SchedulerKind::Reference,
        SchedulerKind::FixedS12,
        SchedulerKind::FixedS34,
        SchedulerKind::Exhaustive,
        SchedulerKind::BestDirect,
        SchedulerKind::BestRelayed,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SchedulerKind::Reference => "REFERENCE",
            SchedulerKind::FixedS12 => "FIXED_S12",
            SchedulerKind::FixedS34 => "FIXED_S34",
            SchedulerKind::Exhaustive => "EXHAUSTIVE",
            SchedulerKind::BestDirect => "BDCDR",
            SchedulerKind::BestRelayed => "BRCDR",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        SchedulerKind::ALL
            .into_iter()
            .find(|k| k.label() == upper)
            .ok_or_else(|| {
                format!(
                    "unknown scheduler {s:?}; expected one of {}",
                    SchedulerKind::ALL.map(|k| k.label()).join(", ")
                )
            })
    }
}

/// How a coordinated block picks the users it serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Selection {
    FifoHeads,
    BestPair,
    BestDirectFirst,
    BestRelayedFirst,
}

fn ensure_nonempty(wl: &WaitingList) -> Result<(), Error> {
    if wl.is_empty() {
        Err(Error::EmptyWaitingList)
    } else {
        Ok(())
    }
}

fn direct_slot(bits: f64, slots: f64) -> RatePair {
    RatePair {
        rate_relayed: 0.0,
        rate_direct: bits,
        slots,
        bits,
    }
}

fn relayed_slot(bits: f64, slots: f64) -> RatePair {
    RatePair {
        rate_relayed: bits,
        rate_direct: 0.0,
        slots,
        bits,
    }
}

fn idle(slots: f64) -> RatePair {
    RatePair {
        rate_relayed: 0.0,
        rate_direct: 0.0,
        slots,
        bits: 0.0,
    }
}

/// Reference-style service rates: a direct request gets one full slot on its
/// BS link, a relayed request one slot with both forward hops in half slots.
fn reference_direct_bits(state: &NetworkChannelState, user: usize) -> Result<f64, Error> {
    Ok(capacity(state.direct_snr(user)?))
}

fn reference_relayed_bits(state: &NetworkChannelState, user: usize) -> Result<f64, Error> {
    Ok(0.5 * capacity(state.relay_route_snr(user)?))
}

// ======================================================================
// Frame builders
// ======================================================================

/// Builds one reference frame: the FIFO head of each traffic queue gets its
/// slot; empty queues leave the slot idle.
pub fn build_frame_reference(
    wl: &mut WaitingList,
    state: &NetworkChannelState,
) -> Result<FrameSchedule, Error> {
    ensure_nonempty(wl)?;
    let mut assignments = Vec::with_capacity(4);
    for traffic in TrafficType::ALL {
        let assignment = match wl.pop_front(traffic) {
            Some(user) if traffic.is_direct() => Assignment {
                scheme: SchemeKind::Reference,
                relayed: None,
                direct: Some(user),
                rate: direct_slot(reference_direct_bits(state, user)?, 1.0),
            },
            Some(user) => Assignment {
                scheme: SchemeKind::Reference,
                relayed: Some(user),
                direct: None,
                rate: relayed_slot(reference_relayed_bits(state, user)?, 1.0),
            },
            None => Assignment {
                scheme: SchemeKind::Reference,
                relayed: None,
                direct: None,
                rate: idle(1.0),
            },
        };
        assignments.push(assignment);
    }
    Ok(FrameSchedule::from_assignments(
        FrameFamily::Reference,
        assignments,
    ))
}

/// Plans one coordinated block without touching the queues.
fn plan_block(
    scheme: SchemeKind,
    wl: &WaitingList,
    state: &NetworkChannelState,
    rule: Selection,
) -> Result<Assignment, Error> {
    let (direct_tt, relayed_tt) = scheme
        .served_traffic()
        .expect("coordinated blocks carry a traffic pairing");
    let dq = wl.queue(direct_tt);
    let rq = wl.queue(relayed_tt);
    let assignment = match (dq.front(), rq.front()) {
        (Some(&d_head), Some(&r_head)) => {
            let (direct, relayed) = match rule {
                Selection::FifoHeads => (d_head, r_head),
                Selection::BestPair => {
                    best_pair(scheme, state, dq.iter().copied(), rq.iter().copied())?
                }
                Selection::BestDirectFirst => {
                    let direct = argmax_by_snr(dq.iter().copied(), |d| state.direct_snr(d))?;
                    let (_, relayed) =
                        best_pair(scheme, state, std::iter::once(direct), rq.iter().copied())?;
                    (direct, relayed)
                }
                Selection::BestRelayedFirst => {
                    let relayed = argmax_by_snr(rq.iter().copied(), |r| state.relay_route_snr(r))?;
                    let (direct, _) =
                        best_pair(scheme, state, dq.iter().copied(), std::iter::once(relayed))?;
                    (direct, relayed)
                }
            };
            Assignment {
                scheme,
                relayed: Some(relayed),
                direct: Some(direct),
                rate: rate_for(scheme, &state.pair(relayed, direct)?),
            }
        }
        (Some(&d_head), None) => Assignment {
            scheme,
            relayed: None,
            direct: Some(d_head),
            rate: direct_slot(reference_direct_bits(state, d_head)?, 2.0),
        },
        (None, Some(&r_head)) => Assignment {
            scheme,
            relayed: Some(r_head),
            direct: None,
            rate: relayed_slot(reference_relayed_bits(state, r_head)?, 2.0),
        },
        (None, None) => Assignment {
            scheme,
            relayed: None,
            direct: None,
            rate: idle(2.0),
        },
    };
    Ok(assignment)
}

/// Highest-SNR user, ties to the lowest index.
fn argmax_by_snr<I, F>(users: I, mut snr: F) -> Result<usize, Error>
where
    I: Iterator<Item = usize>,
    F: FnMut(usize) -> Result<f64, Error>,
{
    let mut best: Option<(f64, usize)> = None;
    for user in users {
        let value = snr(user)?;
        let better = match best {
            None => true,
            Some((b, u)) => value > b || (value == b && user < u),
        };
        if better {
            best = Some((value, user));
        }
    }
    Ok(best.expect("argmax over a nonempty queue").1)
}

/// Highest block sum-rate over the candidate product, ties lexicographic on
/// (direct, relayed) index.
fn best_pair<D, R>(
    scheme: SchemeKind,
    state: &NetworkChannelState,
    directs: D,
    relayeds: R,
) -> Result<(usize, usize), Error>
where
    D: Iterator<Item = usize>,
    R: Iterator<Item = usize> + Clone,
{
    let mut best: Option<(f64, usize, usize)> = None;
    for d in directs {
        for r in relayeds.clone() {
            let bits = rate_for(scheme, &state.pair(r, d)?).bits;
            let better = match best {
                None => true,
                Some((b, bd, br)) => bits > b || (bits == b && (d, r) < (bd, br)),
            };
            if better {
                best = Some((bits, d, r));
            }
        }
    }
    let (_, d, r) = best.expect("best pair over nonempty candidate sets");
    Ok((d, r))
}

fn plan_family(
    family: CoordFamily,
    wl: &WaitingList,
    state: &NetworkChannelState,
    rule: Selection,
) -> Result<(f64, [Assignment; 2]), Error> {
    let [first, second] = family.blocks();
    let a = plan_block(first, wl, state, rule)?;
    let b = plan_block(second, wl, state, rule)?;
    Ok((a.rate.bits + b.rate.bits, [a, b]))
}

fn commit(wl: &mut WaitingList, plan: &[Assignment; 2]) {
    for a in plan {
        let (direct_tt, relayed_tt) = a
            .scheme
            .served_traffic()
            .expect("coordinated plans only contain coordinated blocks");
        if let Some(d) = a.direct {
            let removed = wl.remove(direct_tt, d);
            debug_assert!(removed);
        }
        if let Some(r) = a.relayed {
            let removed = wl.remove(relayed_tt, r);
            debug_assert!(removed);
        }
    }
}

fn build_frame_coordinated(
    wl: &mut WaitingList,
    state: &NetworkChannelState,
    rule: Selection,
) -> Result<FrameSchedule, Error> {
    ensure_nonempty(wl)?;
    let s12 = plan_family(CoordFamily::S12, wl, state, rule)?;
    let s34 = plan_family(CoordFamily::S34, wl, state, rule)?;
    // Ties go to the S3/S4 family.
    let (family, plan) = if s34.0 >= s12.0 {
        (CoordFamily::S34, s34.1)
    } else {
        (CoordFamily::S12, s12.1)
    };
    commit(wl, &plan);
    let tag = if plan.iter().any(Assignment::is_pair) {
        family.frame_family()
    } else {
        FrameFamily::Partial
    };
    Ok(FrameSchedule::from_assignments(tag, plan.to_vec()))
}

/// Builds one frame of two fixed-scheme blocks fed by FIFO heads.
pub fn build_frame_fixed(
    family: CoordFamily,
    wl: &mut WaitingList,
    state: &NetworkChannelState,
) -> Result<FrameSchedule, Error> {
    ensure_nonempty(wl)?;
    let (_, plan) = plan_family(family, wl, state, Selection::FifoHeads)?;
    commit(wl, &plan);
    let tag = if plan.iter().any(Assignment::is_pair) {
        family.frame_family()
    } else {
        FrameFamily::Partial
    };
    Ok(FrameSchedule::from_assignments(tag, plan.to_vec()))
}

/// Builds one frame maximizing each block's sum rate over every candidate
/// pair, then keeping the better family. Within a family the two blocks draw
/// from disjoint queues, so the per-block maxima jointly maximize the frame.
pub fn build_frame_exhaustive(
    wl: &mut WaitingList,
    state: &NetworkChannelState,
) -> Result<FrameSchedule, Error> {
    build_frame_coordinated(wl, state, Selection::BestPair)
}

/// Builds one frame fixing each block's direct-side user first (best
/// direct-link SNR in the block's traffic type), then searching the relayed
/// partner that maximizes the block sum rate.
pub fn build_frame_best_direct(
    wl: &mut WaitingList,
    state: &NetworkChannelState,
) -> Result<FrameSchedule, Error> {
    build_frame_coordinated(wl, state, Selection::BestDirectFirst)
}

/// Builds one frame fixing each block's relayed-side user first (best
/// relay-route SNR in the block's traffic type), then searching the direct
/// partner that maximizes the block sum rate.
pub fn build_frame_best_relayed(
    wl: &mut WaitingList,
    state: &NetworkChannelState,
) -> Result<FrameSchedule, Error> {
    build_frame_coordinated(wl, state, Selection::BestRelayedFirst)
}

/// Builds one frame under the given discipline.
pub fn build_frame(
    kind: SchedulerKind,
    wl: &mut WaitingList,
    state: &NetworkChannelState,
) -> Result<FrameSchedule, Error> {
    match kind {
        SchedulerKind::Reference => build_frame_reference(wl, state),
        SchedulerKind::FixedS12 => build_frame_fixed(CoordFamily::S12, wl, state),
        SchedulerKind::FixedS34 => build_frame_fixed(CoordFamily::S34, wl, state),
        SchedulerKind::Exhaustive => build_frame_exhaustive(wl, state),
        SchedulerKind::BestDirect => build_frame_best_direct(wl, state),
        SchedulerKind::BestRelayed => build_frame_best_relayed(wl, state),
    }
}

// ======================================================================
// Tests
// ======================================================================
