//! Closed forms for LOS links under static, dynamic and self-blockage.
//!
//! All conditional statistics are conditioned on coverage: at least one BS in
//! the disc that is neither self-blocked nor behind a static blockage. When
//! coverage has probability zero (λ_T = 0) they come back as
//! [`Conditional::ZeroCoverage`] instead of NaN.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::DerivedConstants;
use crate::quad::{adaptive_simpson, REL_TOL};

/// A statistic conditioned on coverage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditional {
    Value(f64),
    /// Coverage has zero probability, so the conditional is undefined.
    ZeroCoverage,
}

impl Conditional {
    pub fn value(self) -> Option<f64> {
        match self {
            Conditional::Value(v) => Some(v),
            Conditional::ZeroCoverage => None,
        }
    }

    /// The value, panicking on zero coverage. Meant for tests and examples.
    pub fn unwrap(self) -> f64 {
        self.value().expect("statistic undefined: zero coverage")
    }
}

impl fmt::Display for Conditional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conditional::Value(v) => write!(f, "{v:e}"),
            Conditional::ZeroCoverage => f.write_str("undefined: zero coverage"),
        }
    }
}

/// Unconditional and coverage-conditioned blockage probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageProb {
    pub uncond: f64,
    pub cond: Conditional,
}

/// e^{−A}·(1 − e^{−(Q−A)})/(1 − e^{−Q}): P(all blocked | coverage) from the
/// exponents of P(all blocked) and P(no coverage).
pub(crate) fn conditional_block(block_exponent: f64, avail_exponent: f64) -> Conditional {
    if avail_exponent <= 0.0 {
        return Conditional::ZeroCoverage;
    }
    let gap = (avail_exponent - block_exponent).max(0.0);
    let v = (-block_exponent).exp() * -(-gap).exp_m1() / -(-avail_exponent).exp_m1();
    Conditional::Value(v.clamp(0.0, 1.0))
}

/// Exponent p·q·λ_T·π·R² of the no-coverage probability.
fn avail_exponent(k: &DerivedConstants) -> f64 {
    k.p * k.q * k.mean_bs_in_disc()
}

/// P(at least one BS in the disc escapes static and self-blockage).
pub fn coverage_los(k: &DerivedConstants) -> f64 {
    -(-avail_exponent(k)).exp_m1()
}

/// ∫₀ᴿ e^{−(βr+β₀)}/(1 + Cr/μ) · 2r/R² dr, by adaptive quadrature.
pub fn a_integral(k: &DerivedConstants) -> Result<f64> {
    let range = k.params.los_range;
    let load = k.c * k.params.inv_mu;
    let norm = 2.0 / (range * range);
    adaptive_simpson(
        |r| (-(k.beta * r + k.beta0)).exp() / (1.0 + load * r) * norm * r,
        0.0,
        range,
        REL_TOL,
    )
}

/// Open-park value of [`a_integral`]: 2μ/(RC) − 2μ²/(RC)²·ln(1 + RC/μ).
pub fn a_prime(k: &DerivedConstants) -> f64 {
    a_prime_of_load(k.rc_over_mu())
}

/// a′ as a function of the load x = RC/μ.
pub(crate) fn a_prime_of_load(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x < 1e-2 {
        // 2 sum_{n>=0} (-x)^n / (n+2); the closed form cancels badly here
        let mut sum = 0.0;
        let mut pow = 1.0;
        for n in 0..16 {
            sum += pow / (n as f64 + 2.0);
            pow *= -x;
        }
        return 2.0 * sum;
    }
    2.0 / x - 2.0 / (x * x) * x.ln_1p()
}

/// First-order expansion 1 − 2RC/(3μ); only meaningful while RC/μ < 1.
pub fn a_prime_approx(k: &DerivedConstants) -> f64 {
    1.0 - 2.0 * k.rc_over_mu() / 3.0
}

/// LOS blockage probability with static, dynamic and self-blockage.
pub fn blockage_prob_los(k: &DerivedConstants) -> Result<BlockageProb> {
    let a = a_integral(k)?;
    Ok(blockage_from_a(k, a))
}

/// Open-park blockage probability using the closed form a′.
pub fn blockage_prob_open_park(k: &DerivedConstants) -> Result<BlockageProb> {
    if !k.is_open_park() {
        return Err(Error::RequiresOpenPark);
    }
    Ok(blockage_from_a(k, a_prime(k)))
}

pub(crate) fn blockage_from_a(k: &DerivedConstants, a: f64) -> BlockageProb {
    let block_exponent = a * k.p * k.mean_bs_in_disc();
    BlockageProb {
        uncond: (-block_exponent).exp(),
        cond: conditional_block(block_exponent, avail_exponent(k)),
    }
}

/// How [`min_bs_density`] solves for the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMode {
    /// −ln(target)·(1 + 2RC/3μ)/(pπR²); open park only.
    ClosedForm,
    /// Bisection of the conditional blockage probability.
    Exact,
}

/// Bracket of the density searches (BS/m²).
pub const DENSITY_BRACKET: (f64, f64) = (1e-8, 1e-1);
/// Bisection steps on log₁₀ λ_T.
pub const BISECTION_STEPS: usize = 60;

/// Smallest λ_T (BS/m²) whose conditional blockage probability is at most `target`.
pub fn min_bs_density(k: &DerivedConstants, target: f64, mode: DensityMode) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(
            "target_block_prob",
            format!("must lie in (0, 1), got {target}"),
        ));
    }
    match mode {
        DensityMode::ClosedForm => {
            if !k.is_open_park() {
                return Err(Error::RequiresOpenPark);
            }
            let r = k.params.los_range;
            Ok(-target.ln() * (1.0 + 2.0 * k.rc_over_mu() / 3.0)
                / (k.p * std::f64::consts::PI * r * r))
        }
        DensityMode::Exact => {
            let a = a_integral(k)?;
            let cond_at = |density: f64| {
                let mut kk = *k;
                kk.params.bs_density = density;
                blockage_from_a(&kk, a).cond.value().unwrap_or(1.0)
            };
            bisect_density(|d| cond_at(d) <= target, cond_at, target)
        }
    }
}

/// Bisection on log₁₀ density for a predicate that is monotone (false below,
/// true above). Returns the upper end of the final bracket.
pub(crate) fn bisect_density(
    feasible: impl Fn(f64) -> bool,
    achieved: impl Fn(f64) -> f64,
    target: f64,
) -> Result<f64> {
    let (lo, hi) = DENSITY_BRACKET;
    if feasible(lo) {
        return Ok(lo);
    }
    if !feasible(hi) {
        return Err(Error::Infeasible {
            target,
            density_per_m2: hi,
            achievable: achieved(hi),
        });
    }
    let (mut lo, mut hi) = (lo.log10(), hi.log10());
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(10f64.powf(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(10f64.powf(hi))
}

/// Σ_{n≥1} xⁿ/(n·n!), summed until the next term drops below 1e−14 of the
/// partial sum. Overflows to infinity beyond x ≈ 700; use
/// [`scaled_ei_series`] there.
pub fn ei_series(x: f64) -> f64 {
    assert!(x >= 0.0, "ei_series needs x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0f64;
    loop {
        let next = term * x * n / ((n + 1.0) * (n + 1.0));
        if next < 1e-14 * sum || !next.is_finite() {
            return sum;
        }
        sum += next;
        term = next;
        n += 1.0;
    }
}

/// e^{−x}·[`ei_series`](x), evaluated term by term in log space so that it
/// stays finite for any x.
pub fn scaled_ei_series(x: f64) -> f64 {
    assert!(x >= 0.0, "scaled_ei_series needs x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    if x < 600.0 {
        return (-x).exp() * ei_series(x);
    }
    let ln_x = x.ln();
    let mut log_term = ln_x - x;
    let mut sum = log_term.exp();
    let mut n = 1.0f64;
    loop {
        log_term += ln_x + n.ln() - 2.0 * (n + 1.0).ln();
        let term = log_term.exp();
        if n + 1.0 > x && term < 1e-16 * sum {
            return sum;
        }
        sum += term;
        n += 1.0;
    }
}

/// Expected duration (s) of a simultaneous blockage of all covering LOS
/// links, given coverage.
pub fn expected_duration_los(k: &DerivedConstants) -> Conditional {
    let x = avail_exponent(k);
    if x <= 0.0 {
        return Conditional::ZeroCoverage;
    }
    Conditional::Value(scaled_ei_series(x) / (k.mu() * -(-x).exp_m1()))
}

/// 1/(μ·x·(1 − e^{−x})) with x = pqλ_TπR²; the high-density approximation
/// of [`expected_duration_los`].
pub fn expected_duration_los_approx(k: &DerivedConstants) -> Conditional {
    let x = avail_exponent(k);
    if x <= 0.0 {
        return Conditional::ZeroCoverage;
    }
    Conditional::Value(1.0 / (k.mu() * x * -(-x).exp_m1()))
}

/// Expected rate (1/s) of all-links-blocked events given coverage; open park only.
pub fn expected_frequency(k: &DerivedConstants) -> Result<Conditional> {
    if !k.is_open_park() {
        return Err(Error::RequiresOpenPark);
    }
    let x = k.p * k.mean_bs_in_disc();
    if x <= 0.0 {
        return Ok(Conditional::ZeroCoverage);
    }
    let ap = a_prime(k);
    Ok(Conditional::Value(
        k.mu() * (1.0 - ap) * x * (-ap * x).exp() / -(-x).exp_m1(),
    ))
}

/// Every LOS statistic at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosReport {
    pub coverage_prob: f64,
    pub block_prob_uncond: f64,
    pub block_prob_cond: Conditional,
    pub exp_duration_s: Conditional,
    /// `None` when static blockage is present (the closed form is open-park only).
    pub exp_frequency_hz: Option<Conditional>,
    pub a_integral: f64,
    pub a_prime: f64,
}

impl LosReport {
    /// General model: blockage probability from the numerically integrated `a`.
    pub fn evaluate(k: &DerivedConstants) -> Result<Self> {
        let a = a_integral(k)?;
        Ok(Self::assemble(k, a, blockage_from_a(k, a)))
    }

    /// Open-park model: blockage probability from the closed form a′.
    pub fn evaluate_open_park(k: &DerivedConstants) -> Result<Self> {
        let prob = blockage_prob_open_park(k)?;
        let a = a_integral(k)?;
        Ok(Self::assemble(k, a, prob))
    }

    fn assemble(k: &DerivedConstants, a: f64, prob: BlockageProb) -> Self {
        LosReport {
            coverage_prob: coverage_los(k),
            block_prob_uncond: prob.uncond,
            block_prob_cond: prob.cond,
            exp_duration_s: expected_duration_los(k),
            exp_frequency_hz: expected_frequency(k).ok(),
            a_integral: a,
            a_prime: a_prime(k),
        }
    }
}
