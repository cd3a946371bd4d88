//! Network planning: the smallest BS density meeting a reliability and
//! latency target, the BS height versus density tradeoff, and a reader for
//! per-application QoS tables.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::los::{a_integral, a_prime, bisect_density, blockage_from_a, expected_duration_los};
use crate::nlos::{a_tilde, blockage_from_a_tilde, expected_duration_nlos};
use crate::params::{derive, DerivedConstants, SystemParams};

/// Reliability and latency requirement of one application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosTarget {
    /// Required probability of not being blocked, in (0, 1).
    pub reliability: f64,
    pub max_latency_ms: f64,
    /// When true the latency budget can be bridged by caching and the
    /// duration constraint is dropped.
    pub caching_allowed: bool,
}

impl QosTarget {
    pub fn validate(&self) -> Result<()> {
        if !(self.reliability > 0.0 && self.reliability < 1.0) {
            return Err(Error::invalid(
                "reliability",
                format!("must lie in (0, 1), got {}", self.reliability),
            ));
        }
        if !(self.max_latency_ms > 0.0 && self.max_latency_ms.is_finite()) {
            return Err(Error::invalid(
                "max_latency_ms",
                format!("must be positive, got {}", self.max_latency_ms),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingConstraint {
    Reliability,
    Duration,
}

impl fmt::Display for BindingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BindingConstraint::Reliability => "reliability",
            BindingConstraint::Duration => "duration",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanResult {
    /// BS/km².
    pub required_density: f64,
    pub binding_constraint: BindingConstraint,
    /// Conditional blockage probability at the required density.
    pub achieved_block_prob: f64,
    /// Expected blockage duration (s) at the required density.
    pub achieved_duration_s: f64,
}

/// Which closed forms the planner inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanModel {
    /// Dynamic and self-blockage only, with the closed form a′.
    OpenPark,
    UrbanLos,
    UrbanNlos,
}

impl FromStr for PlanModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open-park" | "open_park" => Ok(PlanModel::OpenPark),
            "urban-los" | "urban_los" | "los" => Ok(PlanModel::UrbanLos),
            "urban-nlos" | "urban_nlos" | "nlos" => Ok(PlanModel::UrbanNlos),
            other => Err(Error::invalid(
                "model",
                format!("unknown model `{other}` (open-park, urban-los, urban-nlos)"),
            )),
        }
    }
}

impl fmt::Display for PlanModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanModel::OpenPark => "open-park",
            PlanModel::UrbanLos => "urban-los",
            PlanModel::UrbanNlos => "urban-nlos",
        })
    }
}

/// Blockage probability and duration as functions of λ_T, with the
/// density-independent integral computed once.
struct DensityCurve {
    consts: DerivedConstants,
    model: PlanModel,
    integral: f64,
}

impl DensityCurve {
    fn new(consts: DerivedConstants, model: PlanModel) -> Result<Self> {
        let integral = match model {
            PlanModel::OpenPark => {
                if !consts.is_open_park() {
                    return Err(Error::RequiresOpenPark);
                }
                a_prime(&consts)
            }
            PlanModel::UrbanLos => a_integral(&consts)?,
            PlanModel::UrbanNlos => a_tilde(&consts)?,
        };
        Ok(DensityCurve {
            consts,
            model,
            integral,
        })
    }

    fn at(&self, density: f64) -> DerivedConstants {
        let mut k = self.consts;
        k.params.bs_density = density;
        k
    }

    fn block_prob(&self, density: f64) -> f64 {
        let k = self.at(density);
        let prob = match self.model {
            PlanModel::UrbanNlos => blockage_from_a_tilde(&k, self.integral),
            _ => blockage_from_a(&k, self.integral),
        };
        prob.cond.value().unwrap_or(1.0)
    }

    fn duration(&self, density: f64) -> f64 {
        let k = self.at(density);
        let d = match self.model {
            PlanModel::UrbanNlos => expected_duration_nlos(&k),
            _ => expected_duration_los(&k),
        };
        d.value().unwrap_or(f64::INFINITY)
    }
}

/// Smallest λ_T meeting `target` under `model`; bisection on log₁₀ λ_T over
/// [1e−8, 1e−1] BS/m².
pub fn plan_density(
    params: &SystemParams,
    target: QosTarget,
    model: PlanModel,
) -> Result<PlanResult> {
    target.validate()?;
    let curve = DensityCurve::new(derive(*params)?, model)?;
    let max_block = 1.0 - target.reliability;
    let max_dur = target.max_latency_ms / 1000.0;

    let reliable = bisect_density(
        |d| curve.block_prob(d) <= max_block,
        |d| curve.block_prob(d),
        max_block,
    )?;
    let (density, binding) = if target.caching_allowed {
        (reliable, BindingConstraint::Reliability)
    } else {
        let joint = bisect_density(
            |d| curve.block_prob(d) <= max_block && curve.duration(d) <= max_dur,
            |d| curve.duration(d),
            max_dur,
        )?;
        if joint > reliable {
            (joint, BindingConstraint::Duration)
        } else {
            (reliable, BindingConstraint::Reliability)
        }
    };
    Ok(PlanResult {
        required_density: density * 1e6,
        binding_constraint: binding,
        achieved_block_prob: curve.block_prob(density),
        achieved_duration_s: curve.duration(density),
    })
}

/// Required λ_T (BS/km²) for each BS height so that the conditional
/// blockage probability is at most `target_block_prob`.
///
/// Uses the open-park closed form when there is no static blockage and the
/// integrated LOS model otherwise.
pub fn height_density_tradeoff(
    params: &SystemParams,
    target_block_prob: f64,
    heights: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let model = if params.static_density == 0.0 {
        PlanModel::OpenPark
    } else {
        PlanModel::UrbanLos
    };
    let target = QosTarget {
        reliability: 1.0 - target_block_prob,
        max_latency_ms: f64::MAX,
        caching_allowed: true,
    };
    heights
        .iter()
        .map(|&h| {
            if h.is_nan() || h <= params.blocker_height {
                return Err(Error::invalid(
                    "height_bs_hT",
                    format!("h_T > h_B violated: {h} <= {}", params.blocker_height),
                ));
            }
            let p = SystemParams {
                bs_height: h,
                ..*params
            };
            Ok((h, plan_density(&p, target, model)?.required_density))
        })
        .collect()
}

/// Handovers per second per UE: the blockage rate C·(2R/3) of a link at the
/// mean BS distance.
pub fn handover_rate(params: &SystemParams) -> Result<f64> {
    let k = derive(*params)?;
    if !k.is_open_park() {
        return Err(Error::RequiresOpenPark);
    }
    Ok(k.c * 2.0 * params.los_range / 3.0)
}

/// One row of a QoS table.
#[derive(Debug, Clone, PartialEq)]
pub struct QosRow {
    pub application: String,
    pub target: QosTarget,
}

#[derive(Deserialize)]
struct RawRow {
    application: String,
    reliability_pct: f64,
    latency_ms: f64,
    caching: String,
}

/// Reads a CSV with columns `application,reliability_pct,latency_ms,caching`
/// (`caching` is yes/no, true/false or 1/0).
pub fn parse_qos_table(text: &str) -> Result<Vec<QosRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, rec) in reader.deserialize::<RawRow>().enumerate() {
        let raw = rec.map_err(|e| Error::Config(format!("QoS table row {}: {e}", line + 1)))?;
        let caching = match raw.caching.to_ascii_lowercase().as_str() {
            "yes" | "true" | "1" | "y" => true,
            "no" | "false" | "0" | "n" => false,
            other => {
                return Err(Error::Config(format!(
                    "QoS table row {}: caching must be yes/no, got `{other}`",
                    line + 1
                )))
            }
        };
        let target = QosTarget {
            reliability: raw.reliability_pct / 100.0,
            max_latency_ms: raw.latency_ms,
            caching_allowed: caching,
        };
        target.validate()?;
        rows.push(QosRow {
            application: raw.application,
            target,
        });
    }
    if rows.is_empty() {
        return Err(Error::Config("QoS table has no rows".into()));
    }
    Ok(rows)
}
