//! Random-waypoint blockers in a square arena around a UE at the origin.
//!
//! Each BS link is represented by its effective sub-segment, the stretch of
//! the BS-UE ray near the UE that is low enough for a blocker to cut. Blocker
//! paths are piecewise linear, so crossings are found exactly per leg.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};

use super::intervals::{intersect, measure_within, union};
use super::{ordered_map, substream_seed, SimEstimate};
use crate::error::{Error, Result};
use crate::params::{derive, DerivedConstants, SystemParams};

/// How a blocker passing a link turns into blocked time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockageMode {
    /// Every crossing starts an independent Exp(μ) blocked interval.
    ExponentialMark,
    /// Blockers are discs; the link is blocked while a disc touches it.
    GeometricDisc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Side of the square arena (m), centered on the UE.
    pub arena_side: f64,
    pub num_runs: usize,
    /// Observed time per run after warm-up (s).
    pub run_duration: f64,
    /// Range of the uniform move time of a waypoint leg (s).
    pub move_time_bounds: (f64, f64),
    pub rng_seed: u64,
    pub blockage_mode: BlockageMode,
    /// Disc diameter (m), geometric mode only.
    pub blocker_diameter: f64,
    /// Step (s), geometric mode only.
    pub time_step: f64,
    /// Discarded initial time (s).
    pub warmup: f64,
    /// Record per-link block/unblock events.
    pub trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            arena_side: 200.0,
            num_runs: 10_000,
            run_duration: 10_800.0,
            move_time_bounds: (0.0, 60.0),
            rng_seed: 0,
            blockage_mode: BlockageMode::ExponentialMark,
            blocker_diameter: 0.5,
            time_step: 0.01,
            warmup: 60.0,
            trace: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        let bad = |field: &str, reason: String| Err(Error::invalid(field, reason));
        if self.arena_side.is_nan() || self.arena_side < 2.0 * params.los_range {
            return bad(
                "arena_side",
                format!(
                    "arena side {} m must be at least 2R = {} m",
                    self.arena_side,
                    2.0 * params.los_range
                ),
            );
        }
        if self.num_runs == 0 {
            return bad("num_runs", "at least one run is required".into());
        }
        if !(self.run_duration > 0.0 && self.run_duration.is_finite()) {
            return bad(
                "run_duration",
                format!("must be positive, got {}", self.run_duration),
            );
        }
        let (lo, hi) = self.move_time_bounds;
        if !(lo >= 0.0 && hi > 0.0 && hi >= lo && hi.is_finite()) {
            return bad(
                "move_time_bounds",
                format!("need 0 <= lo <= hi, hi > 0; got [{lo}, {hi}]"),
            );
        }
        if !(self.warmup >= 0.0 && self.warmup.is_finite()) {
            return bad(
                "warmup",
                format!("must be non-negative, got {}", self.warmup),
            );
        }
        if self.blockage_mode == BlockageMode::GeometricDisc {
            if !(self.blocker_diameter > 0.0 && self.blocker_diameter.is_finite()) {
                return bad(
                    "blocker_diameter",
                    format!("must be positive, got {}", self.blocker_diameter),
                );
            }
            if !(self.time_step > 0.0 && self.time_step.is_finite()) {
                return bad(
                    "time_step",
                    format!("must be positive, got {}", self.time_step),
                );
            }
        }
        Ok(())
    }
}

/// Summary of a single replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub num_bs: usize,
    /// BSs left after self-blockage.
    pub num_links: usize,
    pub blocked_fraction: f64,
    pub events: usize,
    /// Events per second of observed time.
    pub event_rate: f64,
    /// Mean length of the all-blocked intervals starting in the window.
    pub mean_duration: Option<f64>,
}

impl RunRecord {
    pub fn covered(&self) -> bool {
        self.num_links > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraceKind {
    Block,
    Unblock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub run_id: usize,
    pub time: f64,
    /// `None` for the all-links-blocked indicator.
    pub link: Option<usize>,
    pub kind: TraceKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// Time-averaged blocked fraction over covered runs.
    pub prob: SimEstimate,
    /// Blockage events per second over covered runs.
    pub freq: SimEstimate,
    /// Mean blockage duration over runs with at least one event.
    pub duration: SimEstimate,
    pub runs: Vec<RunRecord>,
    pub trace: Vec<TraceEvent>,
}

/// Simulates `sim.num_runs` independent replications of the open-park scenario.
///
/// Every run redraws the BSs, the self-blockage orientation and the blockers.
/// Runs without any link are excluded from the estimates.
pub fn run_open_park_sim(params: &SystemParams, sim: &SimConfig) -> Result<SimOutput> {
    let consts = derive(*params)?;
    if params.static_density != 0.0 {
        return Err(Error::RequiresOpenPark);
    }
    sim.validate(params)?;

    let outcomes = ordered_map(sim.num_runs, |i| simulate_run(&consts, sim, i));
    let mut runs = Vec::with_capacity(outcomes.len());
    let mut trace = Vec::new();
    for (rec, events) in outcomes {
        runs.push(rec);
        trace.extend(events);
    }

    let covered: Vec<&RunRecord> = runs.iter().filter(|r| r.covered()).collect();
    let probs: Vec<f64> = covered.iter().map(|r| r.blocked_fraction).collect();
    let freqs: Vec<f64> = covered.iter().map(|r| r.event_rate).collect();
    let durations: Vec<f64> = covered.iter().filter_map(|r| r.mean_duration).collect();
    Ok(SimOutput {
        prob: SimEstimate::from_values("block_prob_cond", &probs, sim.rng_seed),
        freq: SimEstimate::from_values("block_freq_hz", &freqs, sim.rng_seed),
        duration: SimEstimate::from_values("block_duration_s", &durations, sim.rng_seed),
        runs,
        trace,
    })
}

/// Effective segment of one link: from the UE at the origin to `end`.
#[derive(Debug, Clone, Copy)]
struct Link {
    end: [f64; 2],
}

fn simulate_run(
    k: &DerivedConstants,
    sim: &SimConfig,
    run_id: usize,
) -> (RunRecord, Vec<TraceEvent>) {
    let seed = substream_seed(sim.rng_seed, run_id as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = &k.params;

    let num_bs = poisson(&mut rng, k.mean_bs_in_disc());
    let sector_start = rng.random::<f64>() * 2.0 * PI;
    let omega = p.self_block_angle;
    let mut links = Vec::with_capacity(num_bs);
    for _ in 0..num_bs {
        let r = p.los_range * rng.random::<f64>().sqrt();
        let theta = rng.random::<f64>() * 2.0 * PI;
        if (theta - sector_start).rem_euclid(2.0 * PI) < omega {
            continue;
        }
        let len = k.eff_fraction * r;
        links.push(Link {
            end: [len * theta.cos(), len * theta.sin()],
        });
    }

    let window = (sim.warmup, sim.warmup + sim.run_duration);
    let mut record = RunRecord {
        run_id,
        seed,
        num_bs,
        num_links: links.len(),
        blocked_fraction: 0.0,
        events: 0,
        event_rate: 0.0,
        mean_duration: None,
    };
    if links.is_empty() {
        return (record, Vec::new());
    }

    let per_link = link_blocked_spans(k, sim, &links, &mut rng);
    let mut all = per_link[0].clone();
    for spans in &per_link[1..] {
        all = intersect(&all, spans);
    }

    let starts: Vec<&(f64, f64)> = all
        .iter()
        .filter(|s| s.0 >= window.0 && s.0 < window.1)
        .collect();
    record.blocked_fraction = measure_within(&all, window.0, window.1) / sim.run_duration;
    record.events = starts.len();
    record.event_rate = starts.len() as f64 / sim.run_duration;
    if !starts.is_empty() {
        record.mean_duration =
            Some(starts.iter().map(|s| s.1 - s.0).sum::<f64>() / starts.len() as f64);
    }

    let mut trace = Vec::new();
    if sim.trace {
        let mut push = |spans: &[(f64, f64)], link: Option<usize>| {
            for &(a, b) in spans {
                if a >= window.0 && a < window.1 {
                    trace.push(TraceEvent {
                        run_id,
                        time: a,
                        link,
                        kind: TraceKind::Block,
                    });
                }
                if b >= window.0 && b < window.1 {
                    trace.push(TraceEvent {
                        run_id,
                        time: b,
                        link,
                        kind: TraceKind::Unblock,
                    });
                }
            }
        };
        for (i, spans) in per_link.iter().enumerate() {
            push(spans, Some(i));
        }
        push(&all, None);
        trace.sort_by(|a, b| {
            a.time
                .total_cmp(&b.time)
                .then(a.link.cmp(&b.link))
                .then(a.kind.cmp(&b.kind))
        });
    }
    (record, trace)
}

/// Blocked intervals of every link over the simulated horizon.
fn link_blocked_spans(
    k: &DerivedConstants,
    sim: &SimConfig,
    links: &[Link],
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<(f64, f64)>> {
    let p = &k.params;
    let half = 0.5 * sim.arena_side;
    let num_blockers = poisson(rng, p.blocker_density * sim.arena_side * sim.arena_side);
    let reach = links
        .iter()
        .map(|l| l.end[0].hypot(l.end[1]))
        .fold(0.0, f64::max);
    let mut spans: Vec<Vec<(f64, f64)>> = vec![Vec::new(); links.len()];

    match sim.blockage_mode {
        BlockageMode::ExponentialMark => {
            // long enough that an interval opened inside the window is not cut short
            let horizon = sim.warmup + sim.run_duration + 40.0 * p.inv_mu;
            let hold = Exp::new(k.mu()).expect("μ > 0");
            let mut crossings: Vec<(usize, f64)> = Vec::new();
            for _ in 0..num_blockers {
                let start = [
                    rng.random_range(-half..=half),
                    rng.random_range(-half..=half),
                ];
                crossings.clear();
                walk(
                    rng,
                    half,
                    p.blocker_speed,
                    sim.move_time_bounds,
                    horizon,
                    start,
                    |t0, a, b, dur| {
                        if near_origin(a, b, reach).is_none() {
                            return;
                        }
                        for (i, link) in links.iter().enumerate() {
                            if let Some(s) = crossing(a, b, link.end) {
                                crossings.push((i, t0 + s * dur));
                            }
                        }
                    },
                );
                for &(i, t) in &crossings {
                    spans[i].push((t, t + hold.sample(rng)));
                }
            }
        }
        BlockageMode::GeometricDisc => {
            let horizon = sim.warmup + sim.run_duration;
            let radius = 0.5 * sim.blocker_diameter;
            let dt = sim.time_step;
            for _ in 0..num_blockers {
                let start = [
                    rng.random_range(-half..=half),
                    rng.random_range(-half..=half),
                ];
                walk(
                    rng,
                    half,
                    p.blocker_speed,
                    sim.move_time_bounds,
                    horizon,
                    start,
                    |t0, a, b, dur| {
                        let Some((s0, s1)) = near_origin(a, b, reach + radius) else {
                            return;
                        };
                        let first = ((t0 + s0 * dur) / dt).ceil() as i64;
                        let last = ((t0 + s1 * dur) / dt).floor() as i64;
                        for step in first..=last {
                            let t = step as f64 * dt;
                            let s = if dur > 0.0 {
                                ((t - t0) / dur).clamp(0.0, 1.0)
                            } else {
                                0.0
                            };
                            // half-open leg ownership avoids counting a joint twice
                            if dur > 0.0 && s >= 1.0 {
                                continue;
                            }
                            let pos = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                            for (i, link) in links.iter().enumerate() {
                                if dist_to_segment(pos, link.end) <= radius {
                                    spans[i].push((t, t + dt));
                                }
                            }
                        }
                    },
                );
            }
        }
    }
    spans.into_iter().map(union).collect()
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng) as usize
}

/// Moves one blocker by random waypoint with specular reflection at the
/// arena walls, calling `f(t0, from, to, duration)` for each straight piece.
fn walk(
    rng: &mut ChaCha8Rng,
    half: f64,
    speed: f64,
    bounds: (f64, f64),
    horizon: f64,
    start: [f64; 2],
    mut f: impl FnMut(f64, [f64; 2], [f64; 2], f64),
) {
    if speed == 0.0 {
        f(0.0, start, start, horizon);
        return;
    }
    let mut t = 0.0;
    let mut pos = start;
    while t < horizon {
        let heading = rng.random::<f64>() * 2.0 * PI;
        let leg = if bounds.1 > bounds.0 {
            rng.random_range(bounds.0..bounds.1)
        } else {
            bounds.0
        };
        let mut vel = [speed * heading.cos(), speed * heading.sin()];
        let mut left = leg.min(horizon - t);
        while left > 0.0 {
            let tx = wall_time(pos[0], vel[0], half);
            let ty = wall_time(pos[1], vel[1], half);
            let step = left.min(tx).min(ty);
            let next = [
                (pos[0] + vel[0] * step).clamp(-half, half),
                (pos[1] + vel[1] * step).clamp(-half, half),
            ];
            if step > 0.0 {
                f(t, pos, next, step);
            }
            t += step;
            left -= step;
            pos = next;
            if tx <= step {
                vel[0] = -vel[0];
            }
            if ty <= step {
                vel[1] = -vel[1];
            }
        }
        if leg == 0.0 && bounds.1 == 0.0 {
            break;
        }
    }
}

fn wall_time(x: f64, v: f64, half: f64) -> f64 {
    if v > 0.0 {
        ((half - x) / v).max(0.0)
    } else if v < 0.0 {
        ((-half - x) / v).max(0.0)
    } else {
        f64::INFINITY
    }
}

fn cross(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// Fraction along `a → b` where it cuts the segment from the origin to `end`.
fn crossing(a: [f64; 2], b: [f64; 2], end: [f64; 2]) -> Option<f64> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let denom = cross(d, end);
    if denom == 0.0 {
        return None;
    }
    let s = cross(end, a) / denom;
    let u = cross(a, d) / -denom;
    ((0.0..1.0).contains(&s) && (0.0..=1.0).contains(&u)).then_some(s)
}

/// Sub-range of `a → b` (as fractions) lying within `radius` of the origin.
fn near_origin(a: [f64; 2], b: [f64; 2], radius: f64) -> Option<(f64, f64)> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    let ad = a[0] * d[0] + a[1] * d[1];
    let aa = a[0] * a[0] + a[1] * a[1] - radius * radius;
    if dd == 0.0 {
        return (aa <= 0.0).then_some((0.0, 1.0));
    }
    let disc = ad * ad - dd * aa;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let s0 = ((-ad - root) / dd).max(0.0);
    let s1 = ((-ad + root) / dd).min(1.0);
    (s0 <= s1).then_some((s0, s1))
}

fn dist_to_segment(pt: [f64; 2], end: [f64; 2]) -> f64 {
    let len2 = end[0] * end[0] + end[1] * end[1];
    let s = if len2 > 0.0 {
        ((pt[0] * end[0] + pt[1] * end[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (pt[0] - s * end[0]).hypot(pt[1] - s * end[1])
}

/// Estimates for one fixed link in exponential-mark mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLinkEstimate {
    /// Crossings per second.
    pub crossing_rate: SimEstimate,
    pub blocked_fraction: SimEstimate,
    /// Mean length of a single exponential mark.
    pub mean_mark: SimEstimate,
    /// Mean length of a maximal blocked period (overlapping marks merged).
    pub mean_busy: SimEstimate,
}

/// Simulates a single BS at distance `r` and angle `theta` from the UE.
pub fn run_single_link_sim(
    params: &SystemParams,
    sim: &SimConfig,
    r: f64,
    theta: f64,
) -> Result<SingleLinkEstimate> {
    let k = derive(*params)?;
    sim.validate(params)?;
    if !(r > 0.0 && r <= params.los_range) {
        return Err(Error::invalid("r", format!("need 0 < r <= R, got {r}")));
    }
    let len = k.eff_fraction * r;
    let link = Link {
        end: [len * theta.cos(), len * theta.sin()],
    };
    let per_run = ordered_map(sim.num_runs, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(sim.rng_seed, i as u64));
        let p = &k.params;
        let half = 0.5 * sim.arena_side;
        let window = (sim.warmup, sim.warmup + sim.run_duration);
        let horizon = window.1 + 40.0 * p.inv_mu;
        let hold = Exp::new(k.mu()).expect("μ > 0");
        let blockers = poisson(
            &mut rng,
            p.blocker_density * sim.arena_side * sim.arena_side,
        );
        let mut marks = Vec::new();
        for _ in 0..blockers {
            let start = [
                rng.random_range(-half..=half),
                rng.random_range(-half..=half),
            ];
            let mut hits = Vec::new();
            walk(
                &mut rng,
                half,
                p.blocker_speed,
                sim.move_time_bounds,
                horizon,
                start,
                |t0, a, b, dur| {
                    if let Some(s) = crossing(a, b, link.end) {
                        hits.push(t0 + s * dur);
                    }
                },
            );
            for t in hits {
                marks.push((t, t + hold.sample(&mut rng)));
            }
        }
        let in_window: Vec<f64> = marks
            .iter()
            .filter(|m| m.0 >= window.0 && m.0 < window.1)
            .map(|m| m.1 - m.0)
            .collect();
        let busy = union(marks);
        let fraction = measure_within(&busy, window.0, window.1) / sim.run_duration;
        let busy_lengths: Vec<f64> = busy
            .iter()
            .filter(|s| s.0 >= window.0 && s.0 < window.1)
            .map(|s| s.1 - s.0)
            .collect();
        (in_window, fraction, busy_lengths)
    });

    let rates: Vec<f64> = per_run
        .iter()
        .map(|r| r.0.len() as f64 / sim.run_duration)
        .collect();
    let fractions: Vec<f64> = per_run.iter().map(|r| r.1).collect();
    let marks: Vec<f64> = per_run.iter().flat_map(|r| r.0.iter().copied()).collect();
    let busy: Vec<f64> = per_run.iter().flat_map(|r| r.2.iter().copied()).collect();
    Ok(SingleLinkEstimate {
        crossing_rate: SimEstimate::from_values("crossing_rate_hz", &rates, sim.rng_seed),
        blocked_fraction: SimEstimate::from_values("blocked_fraction", &fractions, sim.rng_seed),
        mean_mark: SimEstimate::from_values("mark_length_s", &marks, sim.rng_seed),
        mean_busy: SimEstimate::from_values("busy_period_s", &busy, sim.rng_seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamKey;

    fn small(runs: usize, duration: f64) -> SimConfig {
        SimConfig {
            num_runs: runs,
            run_duration: duration,
            rng_seed: 11,
            ..Default::default()
        }
    }

    #[test]
    fn crossing_geometry() {
        let end = [10.0, 0.0];
        assert_eq!(crossing([5.0, -1.0], [5.0, 1.0], end), Some(0.5));
        assert_eq!(crossing([5.0, 1.0], [5.0, 3.0], end), None);
        assert_eq!(crossing([12.0, -1.0], [12.0, 1.0], end), None);
        assert_eq!(crossing([0.0, 1.0], [10.0, 1.0], end), None);
        // the joint between consecutive pieces is owned by the later piece
        assert_eq!(crossing([5.0, -1.0], [5.0, 0.0], end), None);
        assert_eq!(crossing([5.0, 0.0], [5.0, 1.0], end), Some(0.0));
    }

    #[test]
    fn near_origin_window() {
        let (s0, s1) = near_origin([-10.0, 0.0], [10.0, 0.0], 5.0).unwrap();
        assert!((s0 - 0.25).abs() < 1e-15 && (s1 - 0.75).abs() < 1e-15);
        assert!(near_origin([-10.0, 6.0], [10.0, 6.0], 5.0).is_none());
        assert!(near_origin([20.0, 0.0], [10.0, 0.0], 5.0).is_none());
        assert_eq!(near_origin([1.0, 1.0], [1.0, 1.0], 5.0), Some((0.0, 1.0)));
    }

    #[test]
    fn segment_distance() {
        assert_eq!(dist_to_segment([5.0, 3.0], [10.0, 0.0]), 3.0);
        assert_eq!(dist_to_segment([-4.0, 3.0], [10.0, 0.0]), 5.0);
        assert_eq!(dist_to_segment([13.0, 4.0], [10.0, 0.0]), 5.0);
    }

    #[test]
    fn walker_stays_in_the_arena() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pieces = 0;
        let mut clock = 0.0;
        walk(
            &mut rng,
            10.0,
            1.5,
            (0.0, 60.0),
            5000.0,
            [9.0, -9.0],
            |t0, a, b, dur| {
                pieces += 1;
                assert!((t0 - clock).abs() < 1e-9);
                clock = t0 + dur;
                for p in [a, b] {
                    assert!(p[0].abs() <= 10.0 && p[1].abs() <= 10.0);
                }
                let travelled = (b[0] - a[0]).hypot(b[1] - a[1]);
                assert!((travelled - 1.5 * dur).abs() < 1e-9);
            },
        );
        assert!((clock - 5000.0).abs() < 1e-9);
        assert!(pieces > 100);
    }

    #[test]
    fn rejects_small_arena_and_static_blockage() {
        let p = SystemParams::default();
        let sim = SimConfig {
            arena_side: 150.0,
            ..small(1, 10.0)
        };
        let err = run_open_park_sim(&p, &sim).unwrap_err();
        assert!(matches!(err, Error::InvalidParam { ref field, .. } if field == "arena_side"));
        let urban = p.with_cli(ParamKey::StaticDensity, 100.0);
        assert_eq!(
            run_open_park_sim(&urban, &small(1, 10.0)).unwrap_err(),
            Error::RequiresOpenPark
        );
    }

    #[test]
    fn no_blockers_never_block() {
        let p = SystemParams {
            blocker_density: 0.0,
            ..Default::default()
        };
        let out = run_open_park_sim(&p, &small(50, 100.0)).unwrap();
        assert!(out
            .runs
            .iter()
            .all(|r| r.blocked_fraction == 0.0 && r.events == 0));
        assert_eq!(out.prob.point_estimate, 0.0);
        assert_eq!(out.freq.point_estimate, 0.0);
        assert_eq!(out.duration.num_runs, 0);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let p = SystemParams::default().with_cli(ParamKey::BsDensity, 50.0);
        let a = run_open_park_sim(&p, &small(20, 200.0)).unwrap();
        let b = run_open_park_sim(&p, &small(20, 200.0)).unwrap();
        assert_eq!(a, b);
        let c = run_open_park_sim(
            &p,
            &SimConfig {
                rng_seed: 12,
                ..small(20, 200.0)
            },
        )
        .unwrap();
        assert_ne!(a.runs, c.runs);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn thread_count_does_not_matter() {
        let p = SystemParams::default().with_cli(ParamKey::BsDensity, 50.0);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_open_park_sim(&p, &small(24, 200.0)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn trace_is_ordered_and_paired() {
        let p = SystemParams::default()
            .with_cli(ParamKey::BsDensity, 30.0)
            .with_cli(ParamKey::BlockerDensity, 0.1);
        let sim = SimConfig {
            trace: true,
            ..small(3, 300.0)
        };
        let out = run_open_park_sim(&p, &sim).unwrap();
        assert!(!out.trace.is_empty());
        for w in out.trace.windows(2) {
            assert!(
                w[0].run_id < w[1].run_id || (w[0].run_id == w[1].run_id && w[0].time <= w[1].time)
            );
        }
        let all_blocks = out
            .trace
            .iter()
            .filter(|e| e.link.is_none() && e.kind == TraceKind::Block)
            .count();
        assert_eq!(all_blocks, out.runs.iter().map(|r| r.events).sum::<usize>());
    }

    #[test]
    fn crossing_rate_matches_link_rate() {
        // one link at r = 100 m, λ_B = 0.01: α = C·r ≈ 0.0707 crossings/s
        let p = SystemParams::default();
        let k = derive(p).unwrap();
        let sim = small(400, 600.0);
        let est = run_single_link_sim(&p, &sim, 100.0, 0.3).unwrap();
        let alpha = k.c * 100.0;
        assert!((alpha - 0.0707).abs() < 1e-4);
        assert!(
            est.crossing_rate.z_score(alpha) < 3.0,
            "{:?} vs {alpha}",
            est.crossing_rate
        );
        assert!(est.mean_mark.z_score(0.5) < 3.0, "{:?}", est.mean_mark);
    }

    #[test]
    fn geometric_mode_blocks_longer_with_wider_discs() {
        let p = SystemParams::default()
            .with_cli(ParamKey::BsDensity, 30.0)
            .with_cli(ParamKey::BlockerDensity, 0.1);
        let base = SimConfig {
            blockage_mode: BlockageMode::GeometricDisc,
            ..small(8, 200.0)
        };
        let thin = run_open_park_sim(&p, &base).unwrap();
        let wide = run_open_park_sim(
            &p,
            &SimConfig {
                blocker_diameter: 2.0,
                ..base
            },
        )
        .unwrap();
        assert!(wide.prob.point_estimate >= thin.prob.point_estimate);
        assert!(wide.prob.point_estimate > 0.0);
    }
}
