//! Independence-sampling oracle: draws the random quantities the closed forms
//! average over and counts how often every path is blocked.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{ordered_map, substream_seed, SimEstimate};
use crate::error::{Error, Result};
use crate::nlos::b_tilde;
use crate::params::DerivedConstants;

const CHUNK: usize = 1 << 16;
/// Fewest samples accepted by [`run_sampling_oracle`].
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleModel {
    Los,
    /// Adds K ~ max{Poisson(κ), 1} reflected paths for BSs within R̃.
    Nlos,
}

/// Empirical unconditional probability that every path is blocked.
///
/// `std_dev` is the per-sample (Bernoulli) standard deviation, so
/// [`SimEstimate::std_error`] is the binomial standard error.
pub fn run_sampling_oracle(
    k: &DerivedConstants,
    samples: usize,
    model: OracleModel,
    seed: u64,
) -> Result<SimEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!("need at least {MIN_SAMPLES}, got {samples}"),
        ));
    }
    let chunks = samples.div_ceil(CHUNK);
    let counts = ordered_map(chunks, |c| {
        let n = CHUNK.min(samples - c * CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, c as u64));
        (0..n).filter(|_| all_blocked(k, model, &mut rng)).count()
    });
    let hits: usize = counts.iter().sum();
    let frac = hits as f64 / samples as f64;
    let name = match model {
        OracleModel::Los => "block_prob_los",
        OracleModel::Nlos => "block_prob_nlos",
    };
    Ok(SimEstimate {
        statistic: name.to_string(),
        point_estimate: frac,
        std_dev: (frac * (1.0 - frac)).sqrt(),
        num_runs: samples,
        seed,
    })
}

fn all_blocked(k: &DerivedConstants, model: OracleModel, rng: &mut ChaCha8Rng) -> bool {
    let p = &k.params;
    let mean = k.mean_bs_in_disc();
    let m = if mean > 0.0 {
        Poisson::new(mean).expect("finite mean").sample(rng) as usize
    } else {
        0
    };
    let kappa = Poisson::new(p.nlos_kappa).expect("κ > 0");
    let mut blocked = true;
    for _ in 0..m {
        let r = p.los_range * rng.random::<f64>().sqrt();
        // self, static and dynamic blockage are independent per link
        let self_free = rng.random::<f64>() < k.p;
        let static_free = rng.random::<f64>() < (-(k.beta * r + k.beta0)).exp();
        let load = k.c * r * p.inv_mu;
        let dynamic_free = rng.random::<f64>() < 1.0 / (1.0 + load);
        if self_free && static_free && dynamic_free {
            blocked = false;
        }
        if model == OracleModel::Nlos && r <= k.r_tilde {
            let paths = (kappa.sample(rng) as usize).max(1);
            let b = b_tilde(k, r);
            for _ in 0..paths {
                if rng.random::<f64>() < b {
                    blocked = false;
                }
            }
        }
    }
    blocked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive, ParamKey, SystemParams};

    #[test]
    fn no_blockage_leaves_only_empty_discs() {
        let k = derive(SystemParams {
            blocker_density: 0.0,
            self_block_angle: 0.0,
            bs_density: 5e-5,
            ..Default::default()
        })
        .unwrap();
        let est = run_sampling_oracle(&k, 200_000, OracleModel::Los, 5).unwrap();
        let empty = (-k.mean_bs_in_disc()).exp();
        assert!(est.z_score(empty) < 3.0, "{est:?} vs {empty}");
    }

    #[test]
    fn chunking_is_deterministic() {
        let k = derive(SystemParams::default().with_cli(ParamKey::BsDensity, 20.0)).unwrap();
        let a = run_sampling_oracle(&k, 100_000, OracleModel::Nlos, 9).unwrap();
        let b = run_sampling_oracle(&k, 100_000, OracleModel::Nlos, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_tiny_sample_counts() {
        let k = derive(SystemParams::default()).unwrap();
        assert!(run_sampling_oracle(&k, 100, OracleModel::Los, 0)
            .unwrap_err()
            .is_validation());
    }

    #[test]
    fn nlos_paths_only_help() {
        let k = derive(
            SystemParams::default()
                .with_cli(ParamKey::BsDensity, 30.0)
                .with_cli(ParamKey::StaticDensity, 100.0)
                .with_cli(ParamKey::BlockerDensity, 0.1),
        )
        .unwrap();
        let los = run_sampling_oracle(&k, 100_000, OracleModel::Los, 1).unwrap();
        let nlos = run_sampling_oracle(&k, 100_000, OracleModel::Nlos, 1).unwrap();
        assert!(nlos.point_estimate < los.point_estimate);
    }
}
