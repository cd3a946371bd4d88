//! Browser bindings for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` so the page can plot without
//! any serialization layer. Densities are in BS/km², angles in degrees.

use mmwave_blockage::hex::{build_layout, d_from_density, hex_evaluate, HexGrid, SelfBlockMode};
use mmwave_blockage::los::{blockage_prob_open_park, expected_duration_los, expected_frequency};
use mmwave_blockage::planner::height_density_tradeoff;
use mmwave_blockage::{derive, Conditional, Error, ParamKey, SystemParams};
use wasm_bindgen::prelude::*;

fn open_park(range: f64, blocker_density: f64, omega_deg: f64) -> SystemParams {
    SystemParams::default()
        .open_park()
        .with_cli(ParamKey::LosRange, range)
        .with_cli(ParamKey::BlockerDensity, blocker_density)
        .with_cli(ParamKey::SelfBlockAngle, omega_deg)
}

fn value(c: Conditional) -> f64 {
    c.value().unwrap_or(f64::NAN)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, Error> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Error::invalid(
            "grid",
            "need 0 < min < max and at least 2 points",
        ));
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    Ok((0..points).map(|i| lo * (step * i as f64).exp()).collect())
}

/// Rows of `[λ_T, conditional blockage probability, duration s, frequency Hz]`
/// for log-spaced λ_T in `[lt_min, lt_max]`.
pub fn blockage_curve_rows(
    range: f64,
    blocker_density: f64,
    omega_deg: f64,
    lt_min: f64,
    lt_max: f64,
    points: usize,
) -> Result<Vec<f64>, Error> {
    let mut out = Vec::with_capacity(points * 4);
    for lt in log_grid(lt_min, lt_max, points)? {
        let k =
            derive(open_park(range, blocker_density, omega_deg).with_cli(ParamKey::BsDensity, lt))?;
        out.extend([
            lt,
            value(blockage_prob_open_park(&k)?.cond),
            value(expected_duration_los(&k)),
            value(expected_frequency(&k)?),
        ]);
    }
    Ok(out)
}

/// `[d m, hexagonal blockage probability, max excluded BSs, random-placement
/// conditional probability]` at one density.
pub fn hex_probe_values(
    density: f64,
    blocker_density: f64,
    omega_deg: f64,
    worst_case: bool,
    grid: usize,
) -> Result<Vec<f64>, Error> {
    if density.is_nan() || density <= 0.0 {
        return Err(Error::invalid("density", "must be positive"));
    }
    if grid == 0 {
        return Err(Error::invalid("grid", "must be at least 1"));
    }
    let p = open_park(100.0, blocker_density, omega_deg).with_cli(ParamKey::BsDensity, density);
    let k = derive(p)?;
    let d = d_from_density(p.bs_density);
    let mode = if worst_case {
        SelfBlockMode::WorstCase
    } else {
        SelfBlockMode::NoSelf
    };
    let summary = hex_evaluate(
        &build_layout(d),
        &k,
        p.self_block_angle,
        mode,
        HexGrid {
            radial: grid,
            lateral: grid,
        },
    );
    let mut ppp = p;
    if !worst_case {
        ppp.self_block_angle = 0.0;
    }
    let random = value(blockage_prob_open_park(&derive(ppp)?)?.cond);
    Ok(vec![
        d,
        summary.block_prob,
        summary.max_excluded as f64,
        random,
    ])
}

/// Rows of `[BS height m, required density BS/km²]`.
pub fn height_tradeoff_rows(
    blocker_density: f64,
    omega_deg: f64,
    target_prob: f64,
    h_min: f64,
    h_max: f64,
    points: usize,
) -> Result<Vec<f64>, Error> {
    if !(target_prob > 0.0 && target_prob < 1.0) {
        return Err(Error::invalid("target_prob", "must lie in (0, 1)"));
    }
    if !(h_max > h_min && points >= 2) {
        return Err(Error::invalid(
            "heights",
            "need min < max and at least 2 points",
        ));
    }
    let heights: Vec<f64> = (0..points)
        .map(|i| h_min + (h_max - h_min) * i as f64 / (points - 1) as f64)
        .collect();
    let p = open_park(100.0, blocker_density, omega_deg);
    Ok(height_density_tradeoff(&p, target_prob, &heights)?
        .into_iter()
        .flat_map(|(h, d)| [h, d])
        .collect())
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn blockage_curve(
    range: f64,
    blocker_density: f64,
    omega_deg: f64,
    lt_min: f64,
    lt_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    blockage_curve_rows(range, blocker_density, omega_deg, lt_min, lt_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn hex_probe(
    density: f64,
    blocker_density: f64,
    omega_deg: f64,
    worst_case: bool,
    grid: usize,
) -> Result<Vec<f64>, JsError> {
    hex_probe_values(density, blocker_density, omega_deg, worst_case, grid).map_err(js)
}

#[wasm_bindgen]
pub fn height_tradeoff(
    blocker_density: f64,
    omega_deg: f64,
    target_prob: f64,
    h_min: f64,
    h_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    height_tradeoff_rows(
        blocker_density,
        omega_deg,
        target_prob,
        h_min,
        h_max,
        points,
    )
    .map_err(js)
}
