//! LOS + NLOS analytics.
//!
//! Each BS within the NLOS range R̃ contributes K ~ max{Poisson(κ), 1}
//! reflected "virtual" links at the same distance as the BS. Virtual links
//! are only subject to dynamic blockage; static and self-blockage act on the
//! direct path alone. The resulting blockage probability is a lower bound.

use crate::error::Result;
use crate::los::{conditional_block, BlockageProb, Conditional};
use crate::params::DerivedConstants;
use crate::quad::{adaptive_simpson, REL_TOL};

/// P(K = k) for K ~ max{Poisson(κ), 1}.
pub fn nlos_path_count_pmf(kappa: f64, k: u32) -> f64 {
    match k {
        0 => 0.0,
        1 => (-kappa).exp() * (1.0 + kappa),
        _ => {
            let ln_pmf = -kappa + k as f64 * kappa.ln() - ln_factorial(k);
            ln_pmf.exp()
        }
    }
}

fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// P(at least one direct or reflected path is free of static and self-blockage).
pub fn coverage_nlos(k: &DerivedConstants) -> f64 {
    -(-k.q_tilde * k.mean_bs_in_disc()).exp_m1()
}

/// Probability that a single virtual link at distance `r` is unblocked by
/// mobile blockers; zero beyond the NLOS range.
pub fn b_tilde(k: &DerivedConstants, r: f64) -> f64 {
    if r <= k.r_tilde {
        1.0 / (1.0 + k.c * r * k.params.inv_mu)
    } else {
        0.0
    }
}

/// Probability that all K virtual links of one BS are blocked, averaged
/// over K: e^{−bκ} − b·e^{−κ}.
pub fn nlos_block_factor(b: f64, kappa: f64) -> f64 {
    (-b * kappa).exp() - b * (-kappa).exp()
}

/// ã = 1 − ∫₀ᴿ (1 − LOS survival)·(NLOS block factor)·2r/R² dr.
///
/// The integrand jumps at r = R̃, so the two sides are integrated separately.
pub fn a_tilde(k: &DerivedConstants) -> Result<f64> {
    let range = k.params.los_range;
    let kappa = k.params.nlos_kappa;
    let norm = 2.0 / (range * range);
    let inside = |r: f64| {
        let b = 1.0 / (1.0 + k.c * r * k.params.inv_mu);
        (1.0 - k.los_survival(r)) * nlos_block_factor(b, kappa) * norm * r
    };
    // beyond R̃ the NLOS factor is exactly 1
    let outside = |r: f64| (1.0 - k.los_survival(r)) * norm * r;
    let split = k.r_tilde.min(range);
    let near = adaptive_simpson(inside, 0.0, split, REL_TOL)?;
    let far = adaptive_simpson(outside, split, range, REL_TOL)?;
    Ok(1.0 - near - far)
}

/// Blockage probability with both direct and reflected paths.
pub fn blockage_prob_nlos(k: &DerivedConstants) -> Result<BlockageProb> {
    let at = a_tilde(k)?;
    Ok(blockage_from_a_tilde(k, at))
}

pub(crate) fn blockage_from_a_tilde(k: &DerivedConstants, a_tilde: f64) -> BlockageProb {
    let x = k.mean_bs_in_disc();
    BlockageProb {
        uncond: (-a_tilde * x).exp(),
        cond: conditional_block(a_tilde * x, k.q_tilde * x),
    }
}

/// First-order approximation of the expected blockage duration with NLOS paths (s).
pub fn expected_duration_nlos(k: &DerivedConstants) -> Conditional {
    let x = k.mean_bs_in_disc();
    let cover_exp = k.q_tilde * x;
    if cover_exp <= 0.0 {
        return Conditional::ZeroCoverage;
    }
    let r = k.params.los_range;
    let rt = k.r_tilde;
    let mean_paths = k.p * k.q * x + k.params.nlos_kappa * x * (rt * rt) / (r * r);
    Conditional::Value(1.0 / (-(-cover_exp).exp_m1() * k.mu() * mean_paths))
}

/// Every LOS+NLOS statistic at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlosReport {
    pub coverage_prob: f64,
    pub block_prob_uncond: f64,
    pub block_prob_cond: Conditional,
    pub exp_duration_s: Conditional,
    pub a_tilde: f64,
    pub q_tilde: f64,
    pub r_tilde: f64,
}

impl NlosReport {
    pub fn evaluate(k: &DerivedConstants) -> Result<Self> {
        let at = a_tilde(k)?;
        let prob = blockage_from_a_tilde(k, at);
        Ok(NlosReport {
            coverage_prob: coverage_nlos(k),
            block_prob_uncond: prob.uncond,
            block_prob_cond: prob.cond,
            exp_duration_s: expected_duration_nlos(k),
            a_tilde: at,
            q_tilde: k.q_tilde,
            r_tilde: k.r_tilde,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::los::{blockage_prob_los, coverage_los, expected_duration_los_approx};
    use crate::params::{derive, ParamKey, SystemParams};
    use crate::quad::composite_simpson;

    fn urban(f: impl FnOnce(&mut SystemParams)) -> DerivedConstants {
        let mut p = SystemParams::default()
            .with_cli(ParamKey::StaticDensity, 100.0)
            .with_cli(ParamKey::BlockerDensity, 0.1);
        f(&mut p);
        derive(p).unwrap()
    }

    fn with_r_tilde(k: DerivedConstants, rt: f64) -> DerivedConstants {
        k.with_nlos_range(rt)
    }

    fn q_tilde_by_quadrature(k: &DerivedConstants) -> f64 {
        let r = k.params.los_range;
        1.0 - composite_simpson(
            |x| (1.0 - k.p * (-(k.beta * x + k.beta0)).exp()) * 2.0 * x / (r * r),
            k.r_tilde,
            r,
            1_000_000,
        )
    }

    #[test]
    fn pmf_values() {
        assert_eq!(nlos_path_count_pmf(3.0, 0), 0.0);
        assert!((nlos_path_count_pmf(3.0, 1) - 4.0 * (-3f64).exp()).abs() < 1e-15);
        assert!((nlos_path_count_pmf(3.0, 1) - 0.19915).abs() < 1e-5);
        let total: f64 = (0..200).map(|k| nlos_path_count_pmf(3.0, k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((nlos_path_count_pmf(1e-12, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_tilde_closed_form_against_quadrature() {
        let k = urban(|_| {});
        assert!((k.q_tilde - q_tilde_by_quadrature(&k)).abs() < 1e-9);
        let k0 = with_r_tilde(urban(|_| {}), 0.0);
        assert!((k0.q_tilde - k0.p * k0.q).abs() < 1e-9);
    }

    #[test]
    fn coverage_values() {
        assert_eq!(coverage_nlos(&urban(|p| p.bs_density = 0.0)), 0.0);
        for lt in [5e-5, 1e-4, 3e-4] {
            let k = urban(|p| p.bs_density = lt);
            assert!(coverage_nlos(&k) >= coverage_los(&k));
        }
    }

    #[test]
    fn b_tilde_values() {
        let k = urban(|_| {});
        assert_eq!(b_tilde(&k, k.r_tilde + 1e-9), 0.0);
        assert_eq!(b_tilde(&k, 0.0), 1.0);
        let mut k =
            derive(SystemParams::default().with_cli(ParamKey::BlockerDensity, 0.1)).unwrap();
        k.r_tilde = 65.0;
        assert!((b_tilde(&k, 50.0) - 1.0 / 1.17684).abs() < 1e-5);
    }

    #[test]
    fn block_factor_is_a_probability() {
        for kappa in [0.1, 1.0, 3.0, 10.0] {
            let mut prev = f64::INFINITY;
            for i in 0..=1000 {
                let b = i as f64 / 1000.0;
                let f = nlos_block_factor(b, kappa);
                assert!((0.0..=1.0).contains(&f));
                assert!(f <= prev + 1e-15, "not monotone at b={b}");
                prev = f;
            }
        }
    }

    #[test]
    fn zero_nlos_range_reduces_to_los() {
        for lt in [5e-5, 2e-4] {
            let k = with_r_tilde(urban(|p| p.bs_density = lt), 0.0);
            let los = blockage_prob_los(&k).unwrap();
            let nlos = blockage_prob_nlos(&k).unwrap();
            assert!((los.uncond - nlos.uncond).abs() < 1e-9 * los.uncond);
        }
    }

    #[test]
    fn no_blockers_against_fixed_grid() {
        let k = urban(|p| {
            p.blocker_density = 0.0;
            p.bs_density = 2e-4;
        });
        let r = k.params.los_range;
        // inside R̃ the NLOS factor vanishes, so only the far ring contributes
        let far = composite_simpson(
            |x| (1.0 - k.los_survival(x)) * 2.0 * x / (r * r),
            k.r_tilde,
            r,
            1_000_000,
        );
        let expected = (-(1.0 - far) * k.mean_bs_in_disc()).exp();
        let got = blockage_prob_nlos(&k).unwrap().uncond;
        assert!((got - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn nlos_never_hurts_at_urban_point() {
        for lt in [5e-5, 1e-4, 2e-4, 4e-4] {
            let k = urban(|p| p.bs_density = lt);
            let los = blockage_prob_los(&k).unwrap();
            let nlos = blockage_prob_nlos(&k).unwrap();
            assert!(nlos.uncond <= los.uncond);
            assert!(nlos.cond.unwrap() <= los.cond.unwrap());
        }
    }

    #[test]
    fn duration_properties() {
        let k = urban(|p| p.bs_density = 2e-4);
        assert!(expected_duration_nlos(&k).unwrap() < expected_duration_los_approx(&k).unwrap());

        let k0 = with_r_tilde(k, 0.0);
        let a = expected_duration_nlos(&k0).unwrap();
        let b = expected_duration_los_approx(&k0).unwrap();
        assert!((a - b).abs() < 1e-9 * b);

        let other = urban(|p| {
            p.bs_density = 2e-4;
            p.blocker_density = 0.5;
        });
        assert_eq!(expected_duration_nlos(&other), expected_duration_nlos(&k));
        assert_eq!(
            expected_duration_nlos(&urban(|p| p.bs_density = 0.0)),
            Conditional::ZeroCoverage
        );
    }

    #[test]
    fn report_fields() {
        let k = urban(|p| p.bs_density = 1e-4);
        let r = NlosReport::evaluate(&k).unwrap();
        assert!(r.a_tilde > 0.0 && r.a_tilde <= 1.0);
        assert_eq!(r.q_tilde, k.q_tilde);
        assert!((0.0..=1.0).contains(&r.block_prob_cond.unwrap()));
    }
}
