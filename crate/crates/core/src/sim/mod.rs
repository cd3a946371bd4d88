//! Monte-Carlo cross-checks: a random-waypoint mobility simulator for the
//! open-park scenario and an independence-sampling oracle for the closed forms.

pub mod intervals;
pub mod mobility;
pub mod oracle;

pub use mobility::{
    run_open_park_sim, run_single_link_sim, BlockageMode, RunRecord, SimConfig, SimOutput,
    SingleLinkEstimate, TraceEvent, TraceKind,
};
pub use oracle::{run_sampling_oracle, OracleModel};

/// Monte-Carlo estimate of one statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub statistic: String,
    pub point_estimate: f64,
    /// Sample standard deviation of the per-replication values.
    pub std_dev: f64,
    /// Replications that entered the estimate.
    pub num_runs: usize,
    pub seed: u64,
}

impl SimEstimate {
    /// Mean and sample standard deviation of `values`.
    pub fn from_values(statistic: &str, values: &[f64], seed: u64) -> Self {
        let n = values.len();
        let mean = if n == 0 {
            0.0
        } else {
            values.iter().sum::<f64>() / n as f64
        };
        let std_dev = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        SimEstimate {
            statistic: statistic.to_string(),
            point_estimate: mean,
            std_dev,
            num_runs: n,
            seed,
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.num_runs == 0 {
            0.0
        } else {
            self.std_dev / (self.num_runs as f64).sqrt()
        }
    }

    /// |estimate − reference| in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        let se = self.std_error();
        let diff = (self.point_estimate - reference).abs();
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Seed of replication `index` derived from `master`: one splitmix64 step
/// applied to `master + (index + 1)·0x9E3779B97F4A7C15`.
pub fn substream_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps `f` over `0..n` in index order, in parallel when enabled.
pub(crate) fn ordered_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
