//! Planned hexagonal deployment: the 37-BS grid around a central cell.
//!
//! Geometry convention: the central cell is a flat-top hexagon of
//! circumradius `d` (corners at angles 0, ±π/3, ±2π/3, π), so neighbouring
//! sites are √3·d apart and each site serves an area of (3√3/2)·d².
//! The UE is uniform in the central cell; its position average is a
//! deterministic midpoint rule over six affine triangles.

use std::f64::consts::PI;

use crate::params::DerivedConstants;

/// Population of each ring of the layout, innermost first.
pub const LEVEL_COUNTS: [usize; 6] = [1, 6, 6, 6, 12, 6];
/// Number of orientations tried by the worst-case self-blockage search.
pub const ORIENTATION_STEPS: usize = 720;

const ODD: [f64; 6] = [
    PI / 6.0,
    -PI / 6.0,
    PI / 2.0,
    -PI / 2.0,
    5.0 * PI / 6.0,
    -5.0 * PI / 6.0,
];
const EVEN: [f64; 6] = [
    0.0,
    PI / 3.0,
    -PI / 3.0,
    2.0 * PI / 3.0,
    -2.0 * PI / 3.0,
    PI,
];
const OFFSET: f64 = 0.06 * PI;

/// One BS of the layout, in polar coordinates about the central BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexBs {
    pub level: u8,
    pub distance: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HexLayout {
    /// Circumradius of a cell (m).
    pub half_d: f64,
    pub bs_list: Vec<HexBs>,
}

/// UE location inside the central cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UePosition {
    pub delta: f64,
    pub rho: f64,
}

/// Builds the five rings of BSs around the central site.
pub fn build_layout(d: f64) -> HexLayout {
    assert!(d > 0.0, "cell size must be positive");
    let s3 = 3f64.sqrt();
    let mut bs_list = vec![HexBs {
        level: 0,
        distance: 0.0,
        angle: 0.0,
    }];
    let ring = |level: u8, dist: f64, angles: &[f64], out: &mut Vec<HexBs>| {
        out.extend(angles.iter().map(|&angle| HexBs {
            level,
            distance: dist,
            angle,
        }));
    };
    ring(1, s3 * d, &ODD, &mut bs_list);
    ring(2, 3.0 * d, &EVEN, &mut bs_list);
    ring(3, 2.0 * s3 * d, &ODD, &mut bs_list);
    let level4: Vec<f64> = [
        OFFSET,
        -OFFSET,
        PI / 3.0 + OFFSET,
        PI / 3.0 - OFFSET,
        -PI / 3.0 + OFFSET,
        -PI / 3.0 - OFFSET,
        2.0 * PI / 3.0 + OFFSET,
        2.0 * PI / 3.0 - OFFSET,
        -2.0 * PI / 3.0 + OFFSET,
        -2.0 * PI / 3.0 - OFFSET,
        PI - OFFSET,
        -(PI - OFFSET),
    ]
    .to_vec();
    ring(4, 21f64.sqrt() * d, &level4, &mut bs_list);
    ring(5, 3.0 * s3 * d, &ODD, &mut bs_list);
    HexLayout { half_d: d, bs_list }
}

/// BS density (per m²) of a hexagonal grid with cell circumradius `d`.
pub fn density_from_d(d: f64) -> f64 {
    1.0 / (1.5 * 3f64.sqrt() * d * d)
}

/// Cell circumradius giving the requested BS density (per m²).
pub fn d_from_density(density: f64) -> f64 {
    (1.0 / (1.5 * 3f64.sqrt() * density)).sqrt()
}

/// Law-of-cosines distance from the UE to BS `bs_index`.
pub fn ue_bs_distance(layout: &HexLayout, pos: UePosition, bs_index: usize) -> f64 {
    let bs = layout.bs_list[bs_index];
    let sq = bs.distance * bs.distance + pos.delta * pos.delta
        - 2.0 * bs.distance * pos.delta * (bs.angle - pos.rho).cos();
    sq.max(0.0).sqrt()
}

/// Angle (rad, in [0, 2π)) of BS `bs_index` seen from the UE.
fn bearing(layout: &HexLayout, pos: UePosition, bs_index: usize) -> f64 {
    let bs = layout.bs_list[bs_index];
    let x = bs.distance * bs.angle.cos() - pos.delta * pos.rho.cos();
    let y = bs.distance * bs.angle.sin() - pos.delta * pos.rho.sin();
    y.atan2(x).rem_euclid(2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfBlockMode {
    NoSelf,
    /// Place the self-blockage sector where it removes the most BSs.
    WorstCase,
}

/// Resolution of the UE-position average: each of the six triangles of the
/// central hexagon gets `radial × lateral` midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HexGrid {
    pub radial: usize,
    pub lateral: usize,
}

impl Default for HexGrid {
    fn default() -> Self {
        HexGrid {
            radial: 128,
            lateral: 128,
        }
    }
}

impl HexGrid {
    /// Midpoint nodes and normalized area weights covering the central cell.
    pub fn nodes(&self, d: f64) -> Vec<(UePosition, f64)> {
        let mut out = Vec::with_capacity(6 * self.radial * self.lateral);
        let mut total = 0.0;
        for tri in 0..6 {
            let a0 = tri as f64 * PI / 3.0;
            let a1 = a0 + PI / 3.0;
            let (c0x, c0y) = (d * a0.cos(), d * a0.sin());
            let (c1x, c1y) = (d * a1.cos(), d * a1.sin());
            for i in 0..self.radial {
                let s = (i as f64 + 0.5) / self.radial as f64;
                for j in 0..self.lateral {
                    let t = (j as f64 + 0.5) / self.lateral as f64;
                    let x = s * (c0x + t * (c1x - c0x));
                    let y = s * (c0y + t * (c1y - c0y));
                    // the affine map has Jacobian proportional to s
                    out.push((
                        UePosition {
                            delta: x.hypot(y),
                            rho: y.atan2(x),
                        },
                        s,
                    ));
                    total += s;
                }
            }
        }
        for node in &mut out {
            node.1 /= total;
        }
        out
    }
}

/// Outcome at one UE position.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionOutcome {
    /// Indices of BSs within range.
    pub in_range: Vec<usize>,
    /// Indices removed by the self-blockage sector.
    pub excluded: Vec<usize>,
    /// Orientation (rad) of the sector start, if a sector was placed.
    pub sector_start: Option<f64>,
    pub block_prob: f64,
}

/// Blockage probability at a single UE position.
pub fn blockage_at(
    layout: &HexLayout,
    consts: &DerivedConstants,
    omega: f64,
    mode: SelfBlockMode,
    pos: UePosition,
) -> PositionOutcome {
    let range = consts.params.los_range;
    let load = consts.c * consts.params.inv_mu;
    let dists: Vec<f64> = (0..layout.bs_list.len())
        .map(|i| ue_bs_distance(layout, pos, i))
        .collect();
    let in_range: Vec<usize> = (0..dists.len()).filter(|&i| dists[i] <= range).collect();

    let (excluded, sector_start) = match mode {
        SelfBlockMode::NoSelf => (Vec::new(), None),
        SelfBlockMode::WorstCase => worst_sector(layout, pos, &in_range, &dists, omega),
    };

    let mut prob = 1.0;
    for &i in &in_range {
        if excluded.contains(&i) {
            continue;
        }
        let x = load * dists[i];
        prob *= x / (1.0 + x);
    }
    PositionOutcome {
        in_range,
        excluded,
        sector_start,
        block_prob: prob,
    }
}

/// Sweeps the sector start over [`ORIENTATION_STEPS`] orientations and keeps
/// the one excluding the most in-range BSs; ties go to the orientation whose
/// excluded BSs are nearest in total.
fn worst_sector(
    layout: &HexLayout,
    pos: UePosition,
    in_range: &[usize],
    dists: &[f64],
    omega: f64,
) -> (Vec<usize>, Option<f64>) {
    // a BS co-located with the UE has no bearing and cannot sit in the sector
    let mut cands: Vec<(f64, f64, usize)> = in_range
        .iter()
        .filter(|&&i| dists[i] > 1e-9)
        .map(|&i| (bearing(layout, pos, i), dists[i], i))
        .collect();
    if cands.is_empty() || omega <= 0.0 {
        return (Vec::new(), None);
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    // doubled list unwraps the circle; prefix sums give O(log n) window queries
    let n = cands.len();
    let angles: Vec<f64> = (0..2 * n)
        .map(|j| cands[j % n].0 + if j >= n { 2.0 * PI } else { 0.0 })
        .collect();
    let mut dist_prefix = vec![0.0; 2 * n + 1];
    for j in 0..2 * n {
        dist_prefix[j + 1] = dist_prefix[j] + cands[j % n].1;
    }

    let mut best: Option<(usize, f64, usize, f64)> = None; // (count, dist_sum, first index, start)
    for step in 0..ORIENTATION_STEPS {
        let start = 2.0 * PI * step as f64 / ORIENTATION_STEPS as f64;
        let lo = angles.partition_point(|&a| a < start);
        let hi = angles.partition_point(|&a| a <= start + omega);
        let count = (hi - lo).min(n);
        let hi = lo + count;
        let dsum = dist_prefix[hi] - dist_prefix[lo];
        let better = match best {
            None => true,
            Some((bc, bd, _, _)) => count > bc || (count == bc && dsum < bd - 1e-12),
        };
        if better {
            best = Some((count, dsum, lo, start));
        }
    }
    let (count, _, lo, start) = best.expect("at least one orientation");
    let excluded = (lo..lo + count).map(|j| cands[j % n].2).collect();
    (excluded, Some(start))
}

/// Number of BSs the worst-case sector removes at `pos`.
pub fn worst_case_exclusions(
    layout: &HexLayout,
    consts: &DerivedConstants,
    omega: f64,
    pos: UePosition,
) -> usize {
    blockage_at(layout, consts, omega, SelfBlockMode::WorstCase, pos)
        .excluded
        .len()
}

/// Grid average of the blockage probability plus the largest number of BSs
/// the self-blockage sector removed at any grid position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexSummary {
    pub block_prob: f64,
    pub max_excluded: usize,
}

/// Evaluates every grid position once; see [`hex_blockage_prob`].
pub fn hex_evaluate(
    layout: &HexLayout,
    consts: &DerivedConstants,
    omega: f64,
    mode: SelfBlockMode,
    grid: HexGrid,
) -> HexSummary {
    let nodes = grid.nodes(layout.half_d);
    let eval = |&(pos, w): &(UePosition, f64)| {
        let out = blockage_at(layout, consts, omega, mode, pos);
        (w * out.block_prob, out.excluded.len())
    };
    #[cfg(feature = "parallel")]
    let terms: Vec<(f64, usize)> = {
        use rayon::prelude::*;
        nodes.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let terms: Vec<(f64, usize)> = nodes.iter().map(eval).collect();
    // sequential sum keeps the result independent of the thread count
    HexSummary {
        block_prob: terms.iter().map(|t| t.0).sum(),
        max_excluded: terms.iter().map(|t| t.1).max().unwrap_or(0),
    }
}

/// Blockage probability averaged over a uniform UE position in the central cell.
///
/// Uses the open-park per-link probability Cr/μ/(1 + Cr/μ) for every BS within
/// range that the self-blockage sector (if any) leaves available.
pub fn hex_blockage_prob(
    layout: &HexLayout,
    consts: &DerivedConstants,
    omega: f64,
    mode: SelfBlockMode,
    grid: HexGrid,
) -> f64 {
    hex_evaluate(layout, consts, omega, mode, grid).block_prob
}

/// Largest worst-case exclusion count over the grid.
pub fn max_worst_case_exclusions(
    layout: &HexLayout,
    consts: &DerivedConstants,
    omega: f64,
    grid: HexGrid,
) -> usize {
    hex_evaluate(layout, consts, omega, SelfBlockMode::WorstCase, grid).max_excluded
}
