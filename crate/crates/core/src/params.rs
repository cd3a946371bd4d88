//! Model inputs, their validation, and the constants derived from them.
//!
//! Everything inside the library is SI: meters, seconds, per-square-meter
//! densities and radians. The configuration file and the command line use
//! "deployment" units instead (BS/km², static blockages/km², degrees); the
//! conversion lives in [`ParamKey`] and nowhere else.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PER_KM2: f64 = 1e-6;
const DEG: f64 = PI / 180.0;

/// Physical and model inputs, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Radius of the disc holding candidate LOS base stations (m).
    pub los_range: f64,
    /// Base-station density (BS/m²).
    pub bs_density: f64,
    /// Mobile blocker density (blockers/m²).
    pub blocker_density: f64,
    /// Static blockage (building) density (per m²).
    pub static_density: f64,
    /// Blocker speed (m/s).
    pub blocker_speed: f64,
    pub blocker_height: f64,
    pub ue_height: f64,
    pub bs_height: f64,
    /// Mean duration of a single blockage, 1/μ (s).
    pub inv_mu: f64,
    /// Self-blockage sector angle (rad).
    pub self_block_angle: f64,
    pub mean_block_length: f64,
    pub mean_block_width: f64,
    /// Poisson parameter of the NLOS path count.
    pub nlos_kappa: f64,
    /// Extra attenuation of a reflected path (dB).
    pub nlos_attenuation_db: f64,
    pub path_loss_exponent: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            los_range: 100.0,
            bs_density: 200.0 * PER_KM2,
            blocker_density: 0.01,
            static_density: 0.0,
            blocker_speed: 1.0,
            blocker_height: 1.8,
            ue_height: 1.4,
            bs_height: 5.0,
            inv_mu: 0.5,
            self_block_angle: 60.0 * DEG,
            mean_block_length: 10.0,
            mean_block_width: 10.0,
            nlos_kappa: 3.0,
            nlos_attenuation_db: 5.0,
            path_loss_exponent: 2.69,
        }
    }
}

/// A named, unit-aware handle on one [`SystemParams`] field.
///
/// `name()` is the key used by configuration files and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamKey {
    LosRange,
    BsDensity,
    BlockerDensity,
    StaticDensity,
    BlockerSpeed,
    BlockerHeight,
    UeHeight,
    BsHeight,
    InvMu,
    SelfBlockAngle,
    MeanBlockLength,
    MeanBlockWidth,
    NlosKappa,
    NlosAttenuation,
    PathLossExponent,
}

impl ParamKey {
    pub const ALL: [ParamKey; 15] = [
        ParamKey::LosRange,
        ParamKey::BsDensity,
        ParamKey::BlockerDensity,
        ParamKey::StaticDensity,
        ParamKey::BlockerSpeed,
        ParamKey::BlockerHeight,
        ParamKey::UeHeight,
        ParamKey::BsHeight,
        ParamKey::InvMu,
        ParamKey::SelfBlockAngle,
        ParamKey::MeanBlockLength,
        ParamKey::MeanBlockWidth,
        ParamKey::NlosKappa,
        ParamKey::NlosAttenuation,
        ParamKey::PathLossExponent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamKey::LosRange => "los_range_R",
            ParamKey::BsDensity => "bs_density_lambda_T",
            ParamKey::BlockerDensity => "blocker_density_lambda_B",
            ParamKey::StaticDensity => "static_density_lambda_S",
            ParamKey::BlockerSpeed => "blocker_speed_V",
            ParamKey::BlockerHeight => "height_blocker_hB",
            ParamKey::UeHeight => "height_ue_hR",
            ParamKey::BsHeight => "height_bs_hT",
            ParamKey::InvMu => "inv_mu",
            ParamKey::SelfBlockAngle => "self_block_angle_omega",
            ParamKey::MeanBlockLength => "mean_block_length_l",
            ParamKey::MeanBlockWidth => "mean_block_width_w",
            ParamKey::NlosKappa => "nlos_kappa",
            ParamKey::NlosAttenuation => "nlos_attenuation_gamma_dB",
            ParamKey::PathLossExponent => "path_loss_exponent_PLE",
        }
    }

    /// Unit used on the command line and in config files.
    pub fn cli_unit(self) -> &'static str {
        match self {
            ParamKey::LosRange
            | ParamKey::BlockerHeight
            | ParamKey::UeHeight
            | ParamKey::BsHeight
            | ParamKey::MeanBlockLength
            | ParamKey::MeanBlockWidth => "m",
            ParamKey::BsDensity => "BS/km2",
            ParamKey::BlockerDensity => "bl/m2",
            ParamKey::StaticDensity => "sbl/km2",
            ParamKey::BlockerSpeed => "m/s",
            ParamKey::InvMu => "s",
            ParamKey::SelfBlockAngle => "deg",
            ParamKey::NlosKappa | ParamKey::PathLossExponent => "-",
            ParamKey::NlosAttenuation => "dB",
        }
    }

    /// Multiplier taking a CLI-unit value to SI.
    fn to_si(self) -> f64 {
        match self {
            ParamKey::BsDensity | ParamKey::StaticDensity => PER_KM2,
            ParamKey::SelfBlockAngle => DEG,
            _ => 1.0,
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        ParamKey::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::UnknownParam(name.to_string()))
    }

    fn slot(self, p: &mut SystemParams) -> &mut f64 {
        match self {
            ParamKey::LosRange => &mut p.los_range,
            ParamKey::BsDensity => &mut p.bs_density,
            ParamKey::BlockerDensity => &mut p.blocker_density,
            ParamKey::StaticDensity => &mut p.static_density,
            ParamKey::BlockerSpeed => &mut p.blocker_speed,
            ParamKey::BlockerHeight => &mut p.blocker_height,
            ParamKey::UeHeight => &mut p.ue_height,
            ParamKey::BsHeight => &mut p.bs_height,
            ParamKey::InvMu => &mut p.inv_mu,
            ParamKey::SelfBlockAngle => &mut p.self_block_angle,
            ParamKey::MeanBlockLength => &mut p.mean_block_length,
            ParamKey::MeanBlockWidth => &mut p.mean_block_width,
            ParamKey::NlosKappa => &mut p.nlos_kappa,
            ParamKey::NlosAttenuation => &mut p.nlos_attenuation_db,
            ParamKey::PathLossExponent => &mut p.path_loss_exponent,
        }
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl SystemParams {
    /// Reads a field in CLI units.
    pub fn get_cli(&self, key: ParamKey) -> f64 {
        let mut copy = *self;
        *key.slot(&mut copy) / key.to_si()
    }

    /// Writes a field given in CLI units.
    pub fn set_cli(&mut self, key: ParamKey, value: f64) {
        *key.slot(self) = value * key.to_si();
    }

    /// Builder-style variant of [`set_cli`](Self::set_cli).
    pub fn with_cli(mut self, key: ParamKey, value: f64) -> Self {
        self.set_cli(key, value);
        self
    }

    /// Applies a `key=value` override in CLI units.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        let key = ParamKey::parse(key.trim())?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Error::invalid(key.name(), format!("`{}` is not a number", value.trim()))
        })?;
        self.set_cli(key, value);
        Ok(())
    }

    /// The same parameters with static blockage removed.
    pub fn open_park(mut self) -> Self {
        self.static_density = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for key in ParamKey::ALL {
            let v = self.get_cli(key);
            if !v.is_finite() {
                return Err(Error::invalid(key.name(), "must be finite"));
            }
        }
        let non_negative = [
            (ParamKey::BsDensity, self.bs_density),
            (ParamKey::BlockerDensity, self.blocker_density),
            (ParamKey::StaticDensity, self.static_density),
            (ParamKey::BlockerSpeed, self.blocker_speed),
            (ParamKey::NlosAttenuation, self.nlos_attenuation_db),
        ];
        for (key, v) in non_negative {
            if v < 0.0 {
                return Err(Error::invalid(
                    key.name(),
                    format!("must be >= 0, got {}", self.get_cli(key)),
                ));
            }
        }
        let positive = [
            (ParamKey::LosRange, self.los_range),
            (ParamKey::BlockerHeight, self.blocker_height),
            (ParamKey::UeHeight, self.ue_height),
            (ParamKey::BsHeight, self.bs_height),
            (ParamKey::InvMu, self.inv_mu),
            (ParamKey::MeanBlockLength, self.mean_block_length),
            (ParamKey::MeanBlockWidth, self.mean_block_width),
            (ParamKey::NlosKappa, self.nlos_kappa),
            (ParamKey::PathLossExponent, self.path_loss_exponent),
        ];
        for (key, v) in positive {
            if v <= 0.0 {
                return Err(Error::invalid(
                    key.name(),
                    format!("must be > 0, got {}", self.get_cli(key)),
                ));
            }
        }
        if self.bs_height <= self.blocker_height {
            return Err(Error::invalid(
                "height_bs_hT",
                format!(
                    "h_T > h_B violated (h_T = {} m, h_B = {} m): the BS must be above the blockers",
                    self.bs_height, self.blocker_height
                ),
            ));
        }
        if self.blocker_height <= self.ue_height {
            return Err(Error::invalid(
                "height_blocker_hB",
                format!(
                    "h_B > h_R violated (h_B = {} m, h_R = {} m): blockers must be taller than the UE",
                    self.blocker_height, self.ue_height
                ),
            ));
        }
        if !(0.0..2.0 * PI).contains(&self.self_block_angle) {
            return Err(Error::invalid(
                "self_block_angle_omega",
                format!(
                    "must lie in [0, 360) degrees, got {}",
                    self.get_cli(ParamKey::SelfBlockAngle)
                ),
            ));
        }
        Ok(())
    }

    /// Parses a flat `key = value` configuration (CLI units) on top of the defaults.
    pub fn from_config_str(text: &str) -> Result<Self> {
        Ok(Config::parse(text)?.params)
    }

    /// Renders the parameters as a configuration file in CLI units.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for key in ParamKey::ALL {
            out.push_str(&format!(
                "{} = {:e}  # {}\n",
                key.name(),
                self.get_cli(key),
                key.cli_unit()
            ));
        }
        out
    }
}

/// A parsed configuration file: model parameters plus any recipe keys.
///
/// Keys matching a [`ParamKey`] name set parameters; `sweep` (a string or
/// array of strings) and every other scalar key are kept verbatim for the
/// caller.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub params: SystemParams,
    pub sweeps: Vec<String>,
    pub extra: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut cfg = Config::default();
        for (key, value) in table {
            if let Ok(pk) = ParamKey::parse(&key) {
                let v = match value {
                    toml::Value::Float(f) => f,
                    toml::Value::Integer(i) => i as f64,
                    other => {
                        return Err(Error::invalid(
                            pk.name(),
                            format!("expected a number, got {other}"),
                        ));
                    }
                };
                cfg.params.set_cli(pk, v);
                continue;
            }
            match (key.as_str(), value) {
                ("sweep", toml::Value::String(s)) => cfg.sweeps.push(s),
                ("sweep", toml::Value::Array(items)) => {
                    for item in items {
                        match item {
                            toml::Value::String(s) => cfg.sweeps.push(s),
                            other => {
                                return Err(Error::Config(format!(
                                    "sweep entries must be strings, got {other}"
                                )))
                            }
                        }
                    }
                }
                (_, toml::Value::String(s)) => {
                    cfg.extra.insert(key, s);
                }
                (_, toml::Value::Integer(i)) => {
                    cfg.extra.insert(key, i.to_string());
                }
                (_, toml::Value::Float(f)) => {
                    cfg.extra.insert(key, f.to_string());
                }
                (_, toml::Value::Boolean(b)) => {
                    cfg.extra.insert(key, b.to_string());
                }
                (k, _) => return Err(Error::Config(format!("unsupported value for key `{k}`"))),
            }
        }
        Ok(cfg)
    }
}

/// Constants computed once from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub params: SystemParams,
    /// Dynamic blockage rate coefficient, 1/(m·s).
    pub c: f64,
    /// Static blockage coefficients.
    pub beta: f64,
    pub beta0: f64,
    /// Probability that a BS is outside the self-blockage sector.
    pub p: f64,
    /// Probability that a uniformly placed BS survives static blockage.
    pub q: f64,
    /// LOS-or-NLOS availability factor.
    pub q_tilde: f64,
    /// NLOS range (m).
    pub r_tilde: f64,
    /// (h_B − h_R)/(h_T − h_R).
    pub eff_fraction: f64,
}

/// Validates `params` and computes every derived constant.
pub fn derive(params: SystemParams) -> Result<DerivedConstants> {
    params.validate()?;
    let p = &params;
    let eff_fraction = (p.blocker_height - p.ue_height) / (p.bs_height - p.ue_height);
    let c = 2.0 / PI * p.blocker_density * p.blocker_speed * eff_fraction;
    let beta = 2.0 / PI * p.static_density * (p.mean_block_length + p.mean_block_width);
    let beta0 = p.static_density * p.mean_block_length * p.mean_block_width;
    let self_free = 1.0 - p.self_block_angle / (2.0 * PI);
    let r_tilde = p.los_range * 10f64.powf(-p.nlos_attenuation_db / (10.0 * p.path_loss_exponent));
    let q = static_survival(beta, beta0, p.los_range);
    let q_tilde = los_or_nlos_availability(beta, beta0, self_free, p.los_range, r_tilde);
    Ok(DerivedConstants {
        params,
        c,
        beta,
        beta0,
        p: self_free,
        q,
        q_tilde,
        r_tilde,
        eff_fraction,
    })
}

impl DerivedConstants {
    /// Convenience: `derive(params)`.
    pub fn new(params: SystemParams) -> Result<Self> {
        derive(params)
    }

    pub fn mu(&self) -> f64 {
        1.0 / self.params.inv_mu
    }

    /// The dimensionless load R·C/μ.
    pub fn rc_over_mu(&self) -> f64 {
        self.params.los_range * self.c * self.params.inv_mu
    }

    /// Mean number of BSs in the LOS disc, λ_T·π·R².
    pub fn mean_bs_in_disc(&self) -> f64 {
        self.params.bs_density * PI * self.params.los_range * self.params.los_range
    }

    /// True when there is no static blockage (β = β₀ = 0).
    pub fn is_open_park(&self) -> bool {
        self.beta == 0.0 && self.beta0 == 0.0
    }

    /// Replaces the NLOS range (clamped to [0, R]) and recomputes q̃.
    pub fn with_nlos_range(mut self, r_tilde: f64) -> Self {
        self.r_tilde = r_tilde.clamp(0.0, self.params.los_range);
        self.q_tilde = los_or_nlos_availability(
            self.beta,
            self.beta0,
            self.p,
            self.params.los_range,
            self.r_tilde,
        );
        self
    }

    /// LOS survival factor of a link of length `r`: p·e^{−(βr+β₀)}/(1+Cr/μ).
    pub fn los_survival(&self, r: f64) -> f64 {
        self.p * (-(self.beta * r + self.beta0)).exp() / (1.0 + self.c * r * self.params.inv_mu)
    }
}

/// Blockage rate of a link of length `r` (blockers/s).
pub fn alpha_i(consts: &DerivedConstants, r: f64) -> f64 {
    consts.c * r
}

/// Long-run blocked fraction of a single on-off link of length `r`.
pub fn single_link_block_prob(consts: &DerivedConstants, r: f64) -> f64 {
    let load = consts.c * r * consts.params.inv_mu;
    load / (1.0 + load)
}

/// (1 − (1 + x)e^{−x})/x², continuous at 0 where it equals 1/2.
///
/// L²·g(βL) is the integral of r·e^{−βr} over [0, L].
pub(crate) fn moment_kernel(x: f64) -> f64 {
    if x < 0.5 {
        // alternating series sum_{m>=2} (-1)^m (m-1) x^(m-2) / m!
        let mut sum = 0.0;
        let mut fact = 1.0;
        let mut pow = 1.0;
        for m in 2..30u32 {
            fact *= m as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (m - 1) as f64 * pow / fact;
            pow *= x;
        }
        sum
    } else {
        (-(-x).exp_m1() - x * (-x).exp()) / (x * x)
    }
}

fn static_survival(beta: f64, beta0: f64, range: f64) -> f64 {
    if beta == 0.0 && beta0 == 0.0 {
        return 1.0;
    }
    2.0 * (-beta0).exp() * moment_kernel(beta * range)
}

fn los_or_nlos_availability(beta: f64, beta0: f64, p: f64, range: f64, r_tilde: f64) -> f64 {
    let ratio = r_tilde / range;
    let ratio2 = ratio * ratio;
    ratio2
        + 2.0
            * p
            * (-beta0).exp()
            * (moment_kernel(beta * range) - ratio2 * moment_kernel(beta * r_tilde))
}
