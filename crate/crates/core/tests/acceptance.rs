//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`) and asserting its pinned
//! tolerances and runtime budget.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use cdr_core::channel::{
    draw_network, draw_rayleigh, ChannelDraw, ComplexGain, NetworkChannelState, StreamFactory,
};
use cdr_core::mmse::{sinr_mmse_closed, sinr_mmse_oracle, NoisePosition, VirtualMimo};
use cdr_core::scheduler::{
    build_frame, FrameFamily, FrameSchedule, SchedulerKind, TrafficType, WaitingList,
};
use cdr_core::schemes::{
    rate_for, rate_prioritized, s2_direct_system, s3_direct_system, s4_uplink_systems,
    sinr_s1_direct, sinr_s1_relayed, sinr_s2_direct, sinr_s2_relayed, sinr_s3_direct,
    sinr_s3_relayed, sinr_s4_direct, sinr_s4_relayed, PriorityFactor, SchemeKind,
};
use cdr_core::selfcheck::enumerate_best_frame;
use cdr_core::session::{lambda_sweep, run_monte_carlo, SessionConfig, SweepConfig};
use cdr_core::signal_model;
use rand::Rng;

// Pinned tolerances.
const FORMULA_TOL: f64 = 1e-9;
const CONTINUITY_TOL: f64 = 1e-6;
const SE_SEPARATION: f64 = 3.0;
const BD_GAP_FRACTION: f64 = 0.05;

/// Budgeted criteria take this lock so their wall-clock measurements do not
/// contend with each other under the parallel test runner.
static BUDGET: Mutex<()> = Mutex::new(());

fn budget_guard() -> std::sync::MutexGuard<'static, ()> {
    BUDGET.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(idx: u32, name: &str, ok: bool, detail: String) {
    let word = if ok { "PASS" } else { "FAIL" };
    println!("criterion {idx:02} {name}: {word} ({detail})");
    assert!(ok, "criterion {idx:02} {name}: {detail}");
}

fn within_budget(elapsed: Duration, budget: Duration) -> bool {
    elapsed < budget
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

// ======================================================================
// 1: closed-form MMSE SINR against covariance inversion
// ======================================================================

#[test]
fn criterion_01_mmse_closed_form_matches_the_matrix_oracle() {
    let _g = budget_guard();
    let start = Instant::now();
    let mut rng = StreamFactory::new(1).stream(0);
    let mut worst = 0.0f64;
    let n = 10_000;
    for position in [NoisePosition::FirstBranch, NoisePosition::SecondBranch] {
        for _ in 0..n {
            let system = VirtualMimo {
                desired: [draw_rayleigh(&mut rng), draw_rayleigh(&mut rng)],
                interferer: [draw_rayleigh(&mut rng), draw_rayleigh(&mut rng)],
                noise: 10f64.powf(rng.gen_range(-2.0..1.0)),
                alpha: 10f64.powf(rng.gen_range(-1.0..1.0)),
                alpha_position: position,
            };
            worst = worst.max(rel_err(sinr_mmse_closed(&system), sinr_mmse_oracle(&system)));
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= FORMULA_TOL && within_budget(elapsed, Duration::from_secs(1));
    verdict(
        1,
        "mmse_closed_form_vs_matrix_oracle",
        ok,
        format!(
            "{n} systems per noise position, worst relative error {worst:.3e}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    );
}

// ======================================================================
// 2: every scheme rate against an independent oracle
// ======================================================================

#[test]
fn criterion_02_scheme_rates_match_independent_oracles() {
    let _g = budget_guard();
    let start = Instant::now();
    let n = 10_000;

    fn worst_of<F, G>(n: usize, substream: u64, mut actual: F, mut oracle: G) -> f64
    where
        F: FnMut(&ChannelDraw) -> f64,
        G: FnMut(&ChannelDraw) -> f64,
    {
        let mut rng = StreamFactory::new(2).stream(substream);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let noise = 10f64.powf(rng.gen_range(-2.0..0.5));
            let draw = ChannelDraw::sample(noise, &mut rng).unwrap();
            worst = worst.max(rel_err(actual(&draw), oracle(&draw)));
        }
        worst
    }

    let comparisons: [(&str, f64); 9] = [
        (
            "reference relayed",
            worst_of(
                n,
                0,
                |d| d.relay_route_snr(),
                signal_model::reference_relayed_sinr,
            ),
        ),
        (
            "S1 relayed",
            worst_of(n, 1, sinr_s1_relayed, signal_model::s1_relayed_sinr),
        ),
        (
            "S1 direct",
            worst_of(n, 2, sinr_s1_direct, signal_model::s1_direct_sinr),
        ),
        (
            "S2 relayed",
            worst_of(n, 3, sinr_s2_relayed, signal_model::s2_relayed_sinr),
        ),
        (
            "S2 direct",
            worst_of(n, 4, sinr_s2_direct, |d| {
                sinr_mmse_oracle(&s2_direct_system(d))
            }),
        ),
        (
            "S3 relayed",
            worst_of(n, 5, sinr_s3_relayed, signal_model::reference_relayed_sinr),
        ),
        (
            "S3 direct",
            worst_of(n, 6, sinr_s3_direct, |d| {
                sinr_mmse_oracle(&s3_direct_system(d))
            }),
        ),
        (
            "S4 relayed",
            worst_of(n, 7, sinr_s4_relayed, |d| {
                sinr_mmse_oracle(&s4_uplink_systems(d).0)
            }),
        ),
        (
            "S4 direct",
            worst_of(n, 8, sinr_s4_direct, |d| {
                sinr_mmse_oracle(&s4_uplink_systems(d).1)
            }),
        ),
    ];
    let (worst_name, worst) = comparisons
        .iter()
        .fold(("", 0.0f64), |acc, &(name, e)| if e > acc.1 { (name, e) } else { acc });
    let elapsed = start.elapsed();
    let ok = worst <= FORMULA_TOL && within_budget(elapsed, Duration::from_secs(5));
    verdict(
        2,
        "scheme_rates_vs_signal_model",
        ok,
        format!(
            "9 rates x {n} draws, worst relative error {worst:.3e} ({worst_name}), {:.3} s",
            elapsed.as_secs_f64()
        ),
    );
}

// ======================================================================
// 3: structural rate orderings
// ======================================================================

#[test]
fn criterion_03_rate_orderings_hold_without_exception() {
    let _g = budget_guard();
    let start = Instant::now();
    let n = 100_000;
    let mut rng = StreamFactory::new(3).stream(0);
    let mut violations = 0usize;
    let mut spurious_ties = 0usize;
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
            // Equality is reserved for a silent inter-user link.
            spurious_ties += 1;
        }
    }
    // With the inter-user link silenced, S1's relayed branch must equal the
    // plain relay route exactly.
    let mut equality_misses = 0usize;
    for _ in 0..100 {
        let mut draw = ChannelDraw::sample(0.1, &mut rng).unwrap();
        draw.inter_user = ComplexGain::new(0.0, 0.0);
        if sinr_s1_relayed(&draw) != draw.relay_route_snr() {
            equality_misses += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = violations == 0
        && spurious_ties == 0
        && equality_misses == 0
        && within_budget(elapsed, Duration::from_secs(5));
    verdict(
        3,
        "rate_orderings",
        ok,
        format!(
            "{n} draws: {violations} violations, {spurious_ties} spurious ties, \
             {equality_misses} equality misses at zero interference, {:.3} s",
            elapsed.as_secs_f64()
        ),
    );
}

// ======================================================================
// 4: prioritizing factor continuous at zero, exact at zero
// ======================================================================

#[test]
fn criterion_04_priority_is_continuous_and_exact_at_zero() {
    let n = 1_000;
    let mut rng = StreamFactory::new(4).stream(0);
    let up = PriorityFactor::new(1e-9).unwrap();
    let down = PriorityFactor::new(-1e-9).unwrap();
    let mut worst = 0.0f64;
    let mut neutral_mismatches = 0usize;
    for _ in 0..n {
        let draw = ChannelDraw::sample(0.1, &mut rng).unwrap();
        for scheme in SchemeKind::COORDINATED {
            let base = rate_for(scheme, &draw);
            if rate_prioritized(scheme, &draw, PriorityFactor::NEUTRAL).unwrap() != base {
                neutral_mismatches += 1;
            }
            for p in [up, down] {
                let r = rate_prioritized(scheme, &draw, p).unwrap();
                worst = worst
                    .max((r.rate_relayed - base.rate_relayed).abs())
                    .max((r.rate_direct - base.rate_direct).abs())
                    .max((r.bits - base.bits).abs());
            }
        }
    }
    let ok = worst < CONTINUITY_TOL && neutral_mismatches == 0;
    verdict(
        4,
        "priority_continuity_at_zero",
        ok,
        format!(
            "{n} draws x 4 schemes: worst jump {worst:.3e} bits, \
             {neutral_mismatches} neutral mismatches"
        ),
    );
}

// ======================================================================
// 5 and 6: exhaustive scheduler against joint enumeration, and dominance
// ======================================================================

/// Waiting list where each user independently posts one request (never all
/// silent), matching the instance recipe the dominance criterion reuses.
fn scattered_list<R: Rng>(k: usize, rng: &mut R) -> WaitingList {
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

fn criterion_instances(per_size: usize) -> Vec<(WaitingList, NetworkChannelState)> {
    let factory = StreamFactory::new(5);
    let mut traffic_rng = factory.stream(0);
    let mut out = Vec::with_capacity(3 * per_size);
    for k in 1..=3usize {
        for i in 0..per_size {
            let mut srng = factory.stream(((k as u64) << 32) | (1 + i as u64));
            let state = draw_network(k, 0.1, &mut srng).unwrap();
            let wl = scattered_list(k, &mut traffic_rng);
            out.push((wl, state));
        }
    }
    out
}

fn frames_agree(a: &FrameSchedule, b: &FrameSchedule) -> bool {
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

#[test]
fn criterion_05_exhaustive_scheduler_equals_joint_enumeration() {
    let _g = budget_guard();
    let start = Instant::now();
    let instances = criterion_instances(400);
    let mut mismatches = 0usize;
    for (wl, state) in &instances {
        let built = build_frame(SchedulerKind::Exhaustive, &mut wl.clone(), state).unwrap();
        let enumerated = enumerate_best_frame(wl, state).unwrap();
        if !frames_agree(&built, &enumerated) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = instances.len() >= 1_000
        && mismatches == 0
        && within_budget(elapsed, Duration::from_secs(30));
    verdict(
        5,
        "exhaustive_equals_enumeration",
        ok,
        format!(
            "{} instances over k in 1..=3: {mismatches} mismatches \
             (exact bits and selection), {:.3} s",
            instances.len(),
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_06_exhaustive_dominates_per_draw() {
    let instances = criterion_instances(400);
    let others = [
        SchedulerKind::BestDirect,
        SchedulerKind::BestRelayed,
        SchedulerKind::FixedS12,
        SchedulerKind::FixedS34,
    ];
    let mut violations = 0usize;
    for (wl, state) in &instances {
        let exhaustive = build_frame(SchedulerKind::Exhaustive, &mut wl.clone(), state)
            .unwrap()
            .frame_bits;
        for kind in others {
            let bits = build_frame(kind, &mut wl.clone(), state).unwrap().frame_bits;
            if bits > exhaustive {
                violations += 1;
            }
        }
    }
    verdict(
        6,
        "exhaustive_dominates_per_draw",
        violations == 0,
        format!(
            "{} instances x 4 disciplines: {violations} violations",
            instances.len()
        ),
    );
}

// ======================================================================
// 7: multi-user throughput ordering
// ======================================================================

fn db_to_noise(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

fn throughput_at(scheduler: SchedulerKind, snr_db: f64, sessions: usize) -> (f64, f64) {
    let cfg = SessionConfig {
        users_per_side: 10,
        uplink_probability: 0.5,
        noise: db_to_noise(snr_db),
        priority: PriorityFactor::NEUTRAL,
        scheduler,
        sessions,
        seed: 7,
    };
    let stats = run_monte_carlo(&cfg).unwrap();
    (stats.mean_throughput, stats.std_error)
}

#[test]
fn criterion_07_multi_user_throughput_ordering() {
    let _g = budget_guard();
    let start = Instant::now();
    let sessions = 10_000;
    let (reference, se_ref) = throughput_at(SchedulerKind::Reference, 10.0, sessions);
    let (f12, se_f12) = throughput_at(SchedulerKind::FixedS12, 10.0, sessions);
    let (f34, se_f34) = throughput_at(SchedulerKind::FixedS34, 10.0, sessions);
    let (exh, _) = throughput_at(SchedulerKind::Exhaustive, 10.0, sessions);
    let (bd, _) = throughput_at(SchedulerKind::BestDirect, 10.0, sessions);

    let separation = |hi: f64, lo: f64, se_hi: f64, se_lo: f64| {
        (hi - lo) / (se_hi * se_hi + se_lo * se_lo).sqrt()
    };

    let order_ok = exh >= bd && bd >= f34;
    let fixed_gap = separation(f34, f12, se_f34, se_f12);
    let ref_gap = separation(reference, f12, se_ref, se_f12);
    let bd_close = (exh - bd) <= BD_GAP_FRACTION * exh;
    let f12_below_ref = f12 < reference;

    if !f12_below_ref {
        // The relation may be SNR-dependent: report where it does hold
        // instead of failing silently.
        let mut holds_at = Vec::new();
        for snr_db in [0.0, 5.0, 15.0, 20.0] {
            let (r, _) = throughput_at(SchedulerKind::Reference, snr_db, 2_000);
            let (f, _) = throughput_at(SchedulerKind::FixedS12, snr_db, 2_000);
            if f < r {
                holds_at.push(snr_db);
            }
        }
        println!(
            "NOTE: FIXED_S12 < REFERENCE does not hold at 10 dB; \
             it holds at {holds_at:?} dB (2000 sessions each)"
        );
    }

    let elapsed = start.elapsed();
    let ok = order_ok
        && fixed_gap >= SE_SEPARATION
        && ref_gap >= SE_SEPARATION
        && bd_close
        && f12_below_ref
        && within_budget(elapsed, Duration::from_secs(300));
    verdict(
        7,
        "multi_user_throughput_ordering",
        ok,
        format!(
            "{sessions} sessions at 10 dB: EXH {exh:.4} >= BD {bd:.4} >= F34 {f34:.4} \
             > F12 {f12:.4} ({fixed_gap:.1} SE), F12 < REF {reference:.4} ({ref_gap:.1} SE), \
             BD within {:.2}% of EXH, {:.1} s",
            100.0 * (exh - bd) / exh,
            elapsed.as_secs_f64()
        ),
    );
}

// ======================================================================
// 8: two-user sweep shape
// ======================================================================

#[test]
fn criterion_08_two_user_sweep_shape() {
    let _g = budget_guard();
    let start = Instant::now();
    let cfg = SweepConfig {
        noise: db_to_noise(10.0),
        draws: 10_000,
        seed: 8,
    };
    let grid = [-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8];
    let rows = lambda_sweep(&cfg, &grid).unwrap();
    let at = |lambda: f64, scheme: SchemeKind| {
        rows.iter()
            .find(|r| r.lambda == lambda && r.scheme == scheme)
            .unwrap()
    };

    // At neutral priority the relayed-side ranking pins S3 on top and S1 at
    // the bottom, across every scheme including the reference.
    let relayed_at_zero: Vec<f64> = SchemeKind::ALL
        .iter()
        .map(|&s| at(0.0, s).rate_relayed_mean)
        .collect();
    let s3_relayed = at(0.0, SchemeKind::S3).rate_relayed_mean;
    let s1_relayed = at(0.0, SchemeKind::S1).rate_relayed_mean;
    let s3_is_top = relayed_at_zero.iter().all(|&v| v <= s3_relayed);
    let s1_is_bottom = relayed_at_zero.iter().all(|&v| v >= s1_relayed);

    // Direct-side ranking around the plain BS link rate.
    let ref_direct = at(0.0, SchemeKind::Reference).rate_direct_mean;
    let s4_above = at(0.0, SchemeKind::S4).rate_direct_mean > ref_direct;
    let s3_below = at(0.0, SchemeKind::S3).rate_direct_mean < ref_direct;

    // Prioritizing the relayed user cannot move S3's relayed rate at all.
    let flat = grid
        .iter()
        .filter(|&&l| l < 0.0)
        .all(|&l| at(l, SchemeKind::S3).rate_relayed_mean == s3_relayed);

    let elapsed = start.elapsed();
    let ok = s3_is_top
        && s1_is_bottom
        && s4_above
        && s3_below
        && flat
        && within_budget(elapsed, Duration::from_secs(60));
    verdict(
        8,
        "two_user_sweep_shape",
        ok,
        format!(
            "{} draws/point: relayed S3 {s3_relayed:.3} top, S1 {s1_relayed:.3} bottom; \
             direct S4 {:.3} > REF {ref_direct:.3} > S3 {:.3}; S3 relayed flat for \
             negative factors: {flat}; {:.2} s",
            cfg.draws,
            at(0.0, SchemeKind::S4).rate_direct_mean,
            at(0.0, SchemeKind::S3).rate_direct_mean,
            elapsed.as_secs_f64()
        ),
    );
}

// ======================================================================
// 9: one reference rate serves all four traffic directions
// ======================================================================

#[test]
fn criterion_09_reference_rate_is_direction_blind() {
    let factory = StreamFactory::new(9);
    let mut mismatches = 0usize;
    let trials = 200;
    for trial in 0..trials {
        let k = 1 + (trial % 4) as usize;
        let mut rng = factory.stream(trial);
        let state = draw_network(k, 0.1, &mut rng).unwrap();
        for u in 0..k {
            // Uplink and downlink singleton requests must earn identical
            // frames under the reference discipline.
            let bits_of = |t: TrafficType| {
                let mut wl = WaitingList::new();
                wl.push(t, u);
                build_frame(SchedulerKind::Reference, &mut wl, &state)
                    .unwrap()
                    .frame_bits
            };
            let dd = bits_of(TrafficType::DirectDownlink);
            if dd != bits_of(TrafficType::DirectUplink) {
                mismatches += 1;
            }
            let rd = bits_of(TrafficType::RelayedDownlink);
            if rd != bits_of(TrafficType::RelayedUplink) {
                mismatches += 1;
            }
            // The same two values are what the rate pair and the coordinated
            // leftover path report, bit for bit.
            let pair = rate_for(SchemeKind::Reference, &state.pair(u, u).unwrap());
            if pair.rate_direct != dd || pair.rate_relayed != rd {
                mismatches += 1;
            }
            let mut wl = WaitingList::new();
            wl.push(TrafficType::DirectDownlink, u);
            let partial = build_frame(SchedulerKind::Exhaustive, &mut wl, &state).unwrap();
            if partial.frame_bits != dd {
                mismatches += 1;
            }
        }
    }
    verdict(
        9,
        "reference_rate_direction_blind",
        mismatches == 0,
        format!("{trials} states: {mismatches} mismatches across directions and code paths"),
    );
}

// ======================================================================
// 10: worked ten-user example replay
// ======================================================================

fn ten_user_list() -> WaitingList {
    let mut wl = WaitingList::new();
    for d in [0, 3, 4] {
        wl.push(TrafficType::DirectDownlink, d);
    }
    for d in [1, 2] {
        wl.push(TrafficType::DirectUplink, d);
    }
    for r in [0, 1, 3] {
        wl.push(TrafficType::RelayedDownlink, r);
    }
    for r in [2, 4] {
        wl.push(TrafficType::RelayedUplink, r);
    }
    wl
}

#[test]
fn criterion_10_ten_user_example_replays_verbatim() {
    let mut rng = StreamFactory::new(10).stream(0);
    let state = draw_network(5, 0.1, &mut rng).unwrap();

    let mut wl = ten_user_list();
    let mut reference_frames = Vec::new();
    while !wl.is_empty() {
        reference_frames.push(build_frame(SchedulerKind::Reference, &mut wl, &state).unwrap());
    }
    let reference_slots: Vec<Vec<Option<usize>>> = reference_frames
        .iter()
        .map(|f| f.assignments.iter().map(|a| a.direct.or(a.relayed)).collect())
        .collect();
    let reference_ok = reference_frames.len() == 3
        && reference_slots
            == vec![
                vec![Some(0), Some(1), Some(0), Some(2)],
                vec![Some(3), Some(2), Some(1), Some(4)],
                vec![Some(4), None, Some(3), None],
            ]
        && reference_frames
            .iter()
            .all(|f| f.family == FrameFamily::Reference && f.frame_slots == 4.0);

    let mut wl = ten_user_list();
    let mut fixed_frames = Vec::new();
    while !wl.is_empty() {
        fixed_frames.push(build_frame(SchedulerKind::FixedS34, &mut wl, &state).unwrap());
    }
    let fixed_blocks: Vec<Vec<(SchemeKind, Option<usize>, Option<usize>)>> = fixed_frames
        .iter()
        .map(|f| {
            f.assignments
                .iter()
                .map(|a| (a.scheme, a.direct, a.relayed))
                .collect()
        })
        .collect();
    let fixed_ok = fixed_frames.len() == 3
        && fixed_blocks
            == vec![
                vec![
                    (SchemeKind::S3, Some(0), Some(0)),
                    (SchemeKind::S4, Some(1), Some(2)),
                ],
                vec![
                    (SchemeKind::S3, Some(3), Some(1)),
                    (SchemeKind::S4, Some(2), Some(4)),
                ],
                vec![
                    (SchemeKind::S3, Some(4), Some(3)),
                    (SchemeKind::S4, None, None),
                ],
            ]
        && fixed_frames.iter().all(|f| f.family == FrameFamily::S34);

    verdict(
        10,
        "ten_user_example_replay",
        reference_ok && fixed_ok,
        format!(
            "reference frames match: {reference_ok}; fixed S3/S4 frames match: {fixed_ok}"
        ),
    );
}
