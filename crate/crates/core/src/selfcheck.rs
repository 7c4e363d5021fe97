//! Runtime self-validation of the rate formulas and the scheduler.
//!
//! Every closed-form expression in this crate has an independent counterpart
//! here or in [`crate::signal_model`]: receiver SINRs are rebuilt from
//! explicit matrix algebra or power chains, and the exhaustive scheduler is
//! rechecked against a brute-force enumeration of whole frames. [`run_all`]
//! runs the full battery and reports one outcome per check, which the
//! command-line `validate` subcommand prints.

use rand::Rng;

use crate::channel::{capacity, draw_network, ChannelDraw, NetworkChannelState, StreamFactory};
use crate::error::Error;
use crate::mmse::sinr_mmse_oracle;
use crate::scheduler::{
    build_frame, Assignment, CoordFamily, FrameSchedule, SchedulerKind, TrafficType, WaitingList,
};
use crate::schemes::{
    rate_for, rate_prioritized, s2_direct_system, s3_direct_system, s4_uplink_systems,
    sinr_s1_direct, sinr_s1_relayed, sinr_s2_direct, sinr_s2_relayed, sinr_s3_direct,
    sinr_s3_relayed, sinr_s4_direct, sinr_s4_relayed, PriorityFactor, RatePair, SchemeKind,
};
use crate::signal_model;

// ======================================================================
// Outcomes
// ======================================================================

/// Result of one self-check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Runs every self-check with substreams derived from `seed`.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_mmse_closed_form(seed),
        check_scheme_rate_formulas(seed),
        check_rate_orderings(seed),
        check_priority_continuity(seed),
        check_scheduler_equivalence(seed),
        check_scheduler_dominance(seed),
    ]
}

// ======================================================================
// Comparators
// ======================================================================

/// Worst relative disagreement between two rate functions over random draws.
fn max_rel_err<F, G>(n: usize, seed: u64, substream: u64, mut actual: F, mut oracle: G) -> f64
where
    F: FnMut(&ChannelDraw) -> f64,
    G: FnMut(&ChannelDraw) -> f64,
{
    let mut rng = StreamFactory::new(seed).stream(substream);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let noise = 10f64.powf(rng.gen_range(-2.0..0.5));
        let draw = ChannelDraw::sample(noise, &mut rng).unwrap();
        let a = actual(&draw);
        let b = oracle(&draw);
        let denom = a.abs().max(b.abs()).max(1e-12);
        worst = worst.max((a - b).abs() / denom);
    }
    worst
}

const FORMULA_TOL: f64 = 1e-9;

// ======================================================================
// Formula checks
// ======================================================================

fn check_mmse_closed_form(seed: u64) -> CheckOutcome {
    use crate::channel::draw_rayleigh;
    use crate::mmse::{sinr_mmse_closed, NoisePosition, VirtualMimo};

    let n = 10_000;
    let mut rng = StreamFactory::new(seed).stream(100);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let system = VirtualMimo {
            desired: [draw_rayleigh(&mut rng), draw_rayleigh(&mut rng)],
            interferer: [draw_rayleigh(&mut rng), draw_rayleigh(&mut rng)],
            noise: 10f64.powf(rng.gen_range(-2.0..1.0)),
            alpha: 10f64.powf(rng.gen_range(-1.0..1.0)),
            alpha_position: if rng.gen_bool(0.5) {
                NoisePosition::FirstBranch
            } else {
                NoisePosition::SecondBranch
            },
        };
        let closed = sinr_mmse_closed(&system);
        let oracle = sinr_mmse_oracle(&system);
        let denom = closed.abs().max(oracle.abs()).max(1e-12);
        worst = worst.max((closed - oracle).abs() / denom);
    }
    CheckOutcome {
        name: "mmse_closed_form",
        passed: worst <= FORMULA_TOL,
        detail: format!("{n} random systems, worst relative error {worst:.3e}"),
    }
}

fn check_scheme_rate_formulas(seed: u64) -> CheckOutcome {
    let n = 10_000;
    let comparisons: [(&str, f64); 9] = [
        (
            "REF relayed",
            max_rel_err(
                n,
                seed,
                200,
                |d| d.relay_route_snr(),
                signal_model::reference_relayed_sinr,
            ),
        ),
        (
            "S1 relayed",
            max_rel_err(n, seed, 201, sinr_s1_relayed, signal_model::s1_relayed_sinr),
        ),
        (
            "S1 direct",
            max_rel_err(n, seed, 202, sinr_s1_direct, signal_model::s1_direct_sinr),
        ),
        (
            "S2 relayed",
            max_rel_err(n, seed, 203, sinr_s2_relayed, signal_model::s2_relayed_sinr),
        ),
        (
            "S2 direct",
            max_rel_err(n, seed, 204, sinr_s2_direct, |d| {
                sinr_mmse_oracle(&s2_direct_system(d))
            }),
        ),
        (
            "S3 relayed",
            max_rel_err(
                n,
                seed,
                205,
                sinr_s3_relayed,
                signal_model::reference_relayed_sinr,
            ),
        ),
        (
            "S3 direct",
            max_rel_err(n, seed, 206, sinr_s3_direct, |d| {
                sinr_mmse_oracle(&s3_direct_system(d))
            }),
        ),
        (
            "S4 relayed",
            max_rel_err(n, seed, 207, sinr_s4_relayed, |d| {
                sinr_mmse_oracle(&s4_uplink_systems(d).0)
            }),
        ),
        (
            "S4 direct",
            max_rel_err(n, seed, 208, sinr_s4_direct, |d| {
                sinr_mmse_oracle(&s4_uplink_systems(d).1)
            }),
        ),
    ];
    let (worst_name, worst) = comparisons
        .iter()
        .fold(("", 0.0f64), |acc, &(name, err)| {
            if err > acc.1 {
                (name, err)
            } else {
                acc
            }
        });
    CheckOutcome {
        name: "scheme_rate_formulas",
        passed: worst <= FORMULA_TOL,
        detail: format!(
            "9 rates x {n} draws, worst relative error {worst:.3e} ({worst_name})"
        ),
    }
}

fn check_rate_orderings(seed: u64) -> CheckOutcome {
    let n = 100_000;
    let mut rng = StreamFactory::new(seed).stream(300);
    let mut violations = 0usize;
    let mut accidental_equalities = 0usize;
    for _ in 0..n {
        let draw = ChannelDraw::sample(0.1, &mut rng).unwrap();
        let route = draw.relay_route_snr();
        let direct = draw.snr_bs_direct();
        if sinr_s4_direct(&draw) < direct {
            violations += 1;
        }
        if sinr_s3_direct(&draw) > direct {
            violations += 1;
        }
        if sinr_s3_relayed(&draw) != route {
            violations += 1;
        }
        let s1 = sinr_s1_relayed(&draw);
        if s1 > route {
            violations += 1;
        }
        if s1 == route {
            accidental_equalities += 1;
        }
    }
    // Without inter-user interference S1's relayed branch must meet the
    // plain route exactly.
    let mut quiet = ChannelDraw::sample(0.1, &mut rng).unwrap();
    quiet.inter_user = crate::channel::ComplexGain::new(0.0, 0.0);
    if sinr_s1_relayed(&quiet) != quiet.relay_route_snr() {
        violations += 1;
    }
    CheckOutcome {
        name: "rate_orderings",
        passed: violations == 0 && accidental_equalities == 0,
        detail: format!(
            "{n} draws, {violations} ordering violations, {accidental_equalities} spurious ties"
        ),
    }
}

fn check_priority_continuity(seed: u64) -> CheckOutcome {
    let n = 1_000;
    let mut rng = StreamFactory::new(seed).stream(400);
    let eps = PriorityFactor::new(1e-9).unwrap();
    let neg = PriorityFactor::new(-1e-9).unwrap();
    let mut worst = 0.0f64;
    let mut exact_mismatches = 0usize;
    for _ in 0..n {
        let draw = ChannelDraw::sample(0.1, &mut rng).unwrap();
        for scheme in SchemeKind::COORDINATED {
            let base = rate_for(scheme, &draw);
            let at_zero = rate_prioritized(scheme, &draw, PriorityFactor::NEUTRAL).unwrap();
            if at_zero != base {
                exact_mismatches += 1;
            }
            for p in [eps, neg] {
                let r = rate_prioritized(scheme, &draw, p).unwrap();
                worst = worst
                    .max((r.rate_relayed - base.rate_relayed).abs())
                    .max((r.rate_direct - base.rate_direct).abs())
                    .max((r.bits - base.bits).abs());
            }
        }
    }
    CheckOutcome {
        name: "priority_continuity",
        passed: worst < 1e-6 && exact_mismatches == 0,
        detail: format!(
            "{n} draws, worst jump across zero {worst:.3e}, {exact_mismatches} neutral mismatches"
        ),
    }
}

// ======================================================================
// Brute-force frame enumeration
// ======================================================================

struct Candidate {
    assignment: Assignment,
    /// Tie-break key: (direct index, relayed index), absent side saturated.
    key: (usize, usize),
}

fn block_candidates(
    scheme: SchemeKind,
    wl: &WaitingList,
    state: &NetworkChannelState,
) -> Result<Vec<Candidate>, Error> {
    let (direct_tt, relayed_tt) = scheme.served_traffic().expect("coordinated scheme");
    let dq = wl.queue(direct_tt);
    let rq = wl.queue(relayed_tt);
    let mut out = Vec::new();
    if !dq.is_empty() && !rq.is_empty() {
        for &d in dq {
            for &r in rq {
                out.push(Candidate {
                    assignment: Assignment {
                        scheme,
                        relayed: Some(r),
                        direct: Some(d),
                        rate: rate_for(scheme, &state.pair(r, d)?),
                    },
                    key: (d, r),
                });
            }
        }
    } else if let Some(&d) = dq.front() {
        let bits = capacity(state.direct_snr(d)?);
        out.push(Candidate {
            assignment: Assignment {
                scheme,
                relayed: None,
                direct: Some(d),
                rate: RatePair {
                    rate_relayed: 0.0,
                    rate_direct: bits,
                    slots: 2.0,
                    bits,
                },
            },
            key: (d, usize::MAX),
        });
    } else if let Some(&r) = rq.front() {
        let bits = 0.5 * capacity(state.relay_route_snr(r)?);
        out.push(Candidate {
            assignment: Assignment {
                scheme,
                relayed: Some(r),
                direct: None,
                rate: RatePair {
                    rate_relayed: bits,
                    rate_direct: 0.0,
                    slots: 2.0,
                    bits,
                },
            },
            key: (usize::MAX, r),
        });
    } else {
        out.push(Candidate {
            assignment: Assignment {
                scheme,
                relayed: None,
                direct: None,
                rate: RatePair {
                    rate_relayed: 0.0,
                    rate_direct: 0.0,
                    slots: 2.0,
                    bits: 0.0,
                },
            },
            key: (usize::MAX, usize::MAX),
        });
    }
    Ok(out)
}

/// Brute-force reference for the exhaustive discipline: enumerates every
/// joint way to fill both blocks of both families, maximizing total frame
/// bits with ties broken toward lower (direct, relayed) indices per block
/// and the S3/S4 family on equal totals. Does not consume the waiting list.
pub fn enumerate_best_frame(
    wl: &WaitingList,
    state: &NetworkChannelState,
) -> Result<FrameSchedule, Error> {
    if wl.is_empty() {
        return Err(Error::EmptyWaitingList);
    }
    let mut family_best: Vec<(f64, Vec<Assignment>)> = Vec::with_capacity(2);
    for family in CoordFamily::BOTH {
        let [first, second] = family.blocks();
        let ca = block_candidates(first, wl, state)?;
        let cb = block_candidates(second, wl, state)?;
        let mut best: Option<(f64, (usize, usize), (usize, usize), &Candidate, &Candidate)> =
            None;
        for a in &ca {
            for b in &cb {
                let total = a.assignment.rate.bits + b.assignment.rate.bits;
                let better = match &best {
                    None => true,
                    Some((t, ka, kb, _, _)) => {
                        total > *t || (total == *t && (a.key, b.key) < (*ka, *kb))
                    }
                };
                if better {
                    best = Some((total, a.key, b.key, a, b));
                }
            }
        }
        let (total, _, _, a, b) = best.expect("both blocks always have a candidate");
        family_best.push((total, vec![a.assignment, b.assignment]));
    }
    let (s12, s34) = (&family_best[0], &family_best[1]);
    let (family, plan) = if s34.0 >= s12.0 {
        (CoordFamily::S34, s34.1.clone())
    } else {
        (CoordFamily::S12, s12.1.clone())
    };
    let tag = if plan.iter().any(Assignment::is_pair) {
        family.frame_family()
    } else {
        crate::scheduler::FrameFamily::Partial
    };
    let frame_bits = plan.iter().map(|a| a.rate.bits).sum();
    let frame_slots = plan.iter().map(|a| a.rate.slots).sum();
    Ok(FrameSchedule {
        family: tag,
        assignments: plan,
        frame_bits,
        frame_slots,
    })
}

// ======================================================================
// Scheduler checks
// ======================================================================

/// Random waiting list where each user independently posts a request; always
/// leaves at least one request so a frame can be built.
fn random_partial_list<R: Rng>(k: usize, rng: &mut R) -> WaitingList {
    let mut wl = WaitingList::new();
    for d in 0..k {
        if rng.gen_bool(0.8) {
            let t = if rng.gen_bool(0.5) {
                TrafficType::DirectUplink
            } else {
                TrafficType::DirectDownlink
            };
            wl.push(t, d);
        }
    }
    for r in 0..k {
        if rng.gen_bool(0.8) {
            let t = if rng.gen_bool(0.5) {
                TrafficType::RelayedUplink
            } else {
                TrafficType::RelayedDownlink
            };
            wl.push(t, r);
        }
    }
    if wl.is_empty() {
        wl.push(TrafficType::DirectDownlink, 0);
    }
    wl
}

fn frames_match(a: &FrameSchedule, b: &FrameSchedule) -> bool {
    a.family == b.family
        && a.frame_bits == b.frame_bits
        && a.frame_slots == b.frame_slots
        && a.assignments.len() == b.assignments.len()
        && a.assignments.iter().zip(&b.assignments).all(|(x, y)| {
            x.scheme == y.scheme
                && x.relayed == y.relayed
                && x.direct == y.direct
                && x.rate.bits == y.rate.bits
        })
}

fn check_scheduler_equivalence(seed: u64) -> CheckOutcome {
    let factory = StreamFactory::new(seed);
    let mut rng = factory.stream(500);
    let per_size = 100;
    let mut instances = 0usize;
    let mut mismatches = 0usize;
    for k in 1..=3usize {
        for i in 0..per_size {
            let mut srng = factory.stream(((k as u64) << 32) | (600 + i as u64));
            let state = draw_network(k, 0.1, &mut srng).unwrap();
            let wl = random_partial_list(k, &mut rng);
            let built = build_frame(SchedulerKind::Exhaustive, &mut wl.clone(), &state).unwrap();
            let enumerated = enumerate_best_frame(&wl, &state).unwrap();
            instances += 1;
            if !frames_match(&built, &enumerated) {
                mismatches += 1;
            }
        }
    }
    CheckOutcome {
        name: "scheduler_exhaustive_equivalence",
        passed: mismatches == 0,
        detail: format!("{instances} instances over k in 1..=3, {mismatches} mismatches"),
    }
}

fn check_scheduler_dominance(seed: u64) -> CheckOutcome {
    let factory = StreamFactory::new(seed);
    let mut rng = factory.stream(700);
    let per_size = 100;
    let mut instances = 0usize;
    let mut violations = 0usize;
    let others = [
        SchedulerKind::FixedS12,
        SchedulerKind::FixedS34,
        SchedulerKind::BestDirect,
        SchedulerKind::BestRelayed,
    ];
    for k in 1..=3usize {
        for i in 0..per_size {
            let mut srng = factory.stream(((k as u64) << 32) | (800 + i as u64));
            let state = draw_network(k, 0.1, &mut srng).unwrap();
            let wl = random_partial_list(k, &mut rng);
            let exhaustive = build_frame(SchedulerKind::Exhaustive, &mut wl.clone(), &state)
                .unwrap()
                .frame_bits;
            instances += 1;
            for kind in others {
                let bits = build_frame(kind, &mut wl.clone(), &state).unwrap().frame_bits;
                if bits > exhaustive {
                    violations += 1;
                }
            }
        }
    }
    CheckOutcome {
        name: "scheduler_dominance",
        passed: violations == 0,
        detail: format!("{instances} instances x 4 disciplines, {violations} violations"),
    }
}

// ======================================================================
// Tests
// ======================================================================
