//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion (with
//! the measured numbers underneath) and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mmwave_blockage::hex::{
    build_layout, d_from_density, hex_blockage_prob, max_worst_case_exclusions, HexGrid,
    SelfBlockMode,
};
use mmwave_blockage::los::{
    a_integral, a_prime, blockage_prob_los, blockage_prob_open_park, ei_series,
    expected_duration_los, expected_duration_los_approx, expected_frequency,
};
use mmwave_blockage::nlos::{blockage_prob_nlos, expected_duration_nlos};
use mmwave_blockage::planner::{
    handover_rate, height_density_tradeoff, plan_density, PlanModel, QosTarget,
};
use mmwave_blockage::sim::{run_open_park_sim, run_sampling_oracle, OracleModel, SimConfig};
use mmwave_blockage::{derive, DerivedConstants, ParamKey, SystemParams};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

type Criterion = (&'static str, fn(&mut Check));

struct Check {
    lines: Vec<String>,
    ok: bool,
}

impl Check {
    fn new() -> Self {
        Check {
            lines: Vec::new(),
            ok: true,
        }
    }

    fn expect(&mut self, ok: bool, line: String) {
        self.ok &= ok;
        self.lines
            .push(format!("    [{}] {line}", if ok { "ok" } else { "MISS" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("    {line}"));
    }
}

fn park() -> SystemParams {
    SystemParams::default().open_park()
}

fn urban() -> DerivedConstants {
    let p = SystemParams::default().with_cli(ParamKey::StaticDensity, 100.0);
    derive(p).unwrap().with_nlos_range(65.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1(c: &mut Check) {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for r in [100.0, 200.0] {
        for i in 0..10 {
            let lb = 10f64.powf(-3.0 + (0.2f64.log10() + 3.0) * i as f64 / 9.0);
            let p = park()
                .with_cli(ParamKey::LosRange, r)
                .with_cli(ParamKey::BlockerDensity, lb);
            let k = derive(p).unwrap();
            worst = worst.max(rel(a_prime(&k), a_integral(&k).unwrap()));
        }
    }
    let elapsed = start.elapsed();
    c.expect(
        worst <= 1e-9,
        format!("max relative gap a' vs quadrature over 20 points: {worst:.2e} (<= 1e-9)"),
    );
    c.expect(
        elapsed < Duration::from_secs(1),
        format!("runtime {elapsed:.2?} (< 1 s)"),
    );
}

fn criterion_2(c: &mut Check) {
    let k = derive(park().with_cli(ParamKey::BlockerDensity, 0.1)).unwrap();
    let load = k.rc_over_mu();
    c.expect(
        (load - 0.3537).abs() <= 1e-3,
        format!("RC/mu = {load:.5} (0.3537 +- 0.001)"),
    );
    c.expect(
        (k.eff_fraction - 0.1111).abs() <= 1e-4,
        format!("effective fraction = {:.5} (0.1111)", k.eff_fraction),
    );
    for (lb, want, tol) in [(0.01, 0.047, 0.003), (0.1, 0.47, 0.03)] {
        let h = handover_rate(&park().with_cli(ParamKey::BlockerDensity, lb)).unwrap();
        c.expect(
            (h - want).abs() <= tol,
            format!("handover rate at lambda_B={lb}: {h:.4}/s ({want} +- {tol})"),
        );
    }
}

fn criterion_3(c: &mut Check) {
    let start = Instant::now();
    let sim = SimConfig {
        num_runs: 2000,
        run_duration: 600.0,
        rng_seed: 20_190_101,
        ..SimConfig::default()
    };
    for lb in [0.01, 0.1] {
        for omega in [0.0, 60.0] {
            for lt in [100.0, 200.0, 300.0] {
                let p = park()
                    .with_cli(ParamKey::BlockerDensity, lb)
                    .with_cli(ParamKey::SelfBlockAngle, omega)
                    .with_cli(ParamKey::BsDensity, lt);
                let k = derive(p).unwrap();
                let out = run_open_park_sim(&p, &sim).unwrap();
                let refs = [
                    (
                        "prob",
                        &out.prob,
                        blockage_prob_open_park(&k).unwrap().cond.unwrap(),
                    ),
                    ("freq", &out.freq, expected_frequency(&k).unwrap().unwrap()),
                    ("dur", &out.duration, expected_duration_los(&k).unwrap()),
                ];
                let covered: Vec<usize> = out
                    .runs
                    .iter()
                    .map(|r| r.num_links)
                    .filter(|&n| n > 0)
                    .collect();
                let per_link_mean = covered.iter().map(|&n| p.inv_mu / n as f64).sum::<f64>()
                    / covered.len() as f64;
                c.note(format!(
                    "lambda_B={lb} omega={omega} lambda_T={lt}: mean of 1/(n mu) over {} covered runs = {per_link_mean:.4e}, {} runs had events",
                    covered.len(),
                    out.duration.num_runs
                ));
                for (name, est, want) in refs {
                    let point = format!("lambda_B={lb} omega={omega} lambda_T={lt} {name}");
                    let got = est.point_estimate;
                    if lb == 0.01 {
                        let z = est.z_score(want);
                        c.expect(
                            z <= 3.0,
                            format!(
                                "{point}: sim {got:.4e} +- {:.1e} vs {want:.4e}, z = {z:.2} (<= 3)",
                                est.std_error()
                            ),
                        );
                    } else {
                        let e = rel(got, want);
                        c.expect(
                            e <= 0.15,
                            format!(
                                "{point}: sim {got:.4e} vs {want:.4e}, rel {:.1}% (<= 15%)",
                                100.0 * e
                            ),
                        );
                    }
                }
            }
        }
    }
    c.note(format!("runtime {:.1?}", start.elapsed()));
}

fn criterion_4(c: &mut Check) {
    let start = Instant::now();
    let k = urban();
    for (model, name, want) in [
        (
            OracleModel::Los,
            "LOS",
            blockage_prob_los(&k).unwrap().uncond,
        ),
        (
            OracleModel::Nlos,
            "NLOS",
            blockage_prob_nlos(&k).unwrap().uncond,
        ),
    ] {
        let est = run_sampling_oracle(&k, 1_000_000, model, 7).unwrap();
        let z = est.z_score(want);
        c.expect(
            z <= 3.0,
            format!(
                "{name}: sampled {:.5} +- {:.1e} vs closed form {want:.5}, z = {z:.2} (<= 3)",
                est.point_estimate,
                est.std_error()
            ),
        );
    }
    let elapsed = start.elapsed();
    c.expect(
        elapsed < Duration::from_secs(30),
        format!("runtime {elapsed:.2?} (< 30 s)"),
    );
}

fn criterion_5(c: &mut Check) {
    let mut gaps = [0.0f64; 3];
    let mut invariant = true;
    for lt in [30.0, 100.0, 300.0, 1000.0] {
        for omega in [0.0, 60.0] {
            let base = SystemParams::default()
                .with_cli(ParamKey::BsDensity, lt)
                .with_cli(ParamKey::SelfBlockAngle, omega);
            let open = derive(base.open_park()).unwrap();
            gaps[0] = gaps[0].max(rel(
                blockage_prob_los(&open).unwrap().uncond,
                blockage_prob_open_park(&open).unwrap().uncond,
            ));

            let k = derive(base.with_cli(ParamKey::StaticDensity, 100.0))
                .unwrap()
                .with_nlos_range(0.0);
            gaps[1] = gaps[1].max(rel(
                blockage_prob_nlos(&k).unwrap().uncond,
                blockage_prob_los(&k).unwrap().uncond,
            ));
            gaps[2] = gaps[2].max(rel(
                expected_duration_nlos(&k).unwrap(),
                expected_duration_los_approx(&k).unwrap(),
            ));

            let durations = |lb: f64| {
                let k = derive(
                    base.with_cli(ParamKey::StaticDensity, 100.0)
                        .with_cli(ParamKey::BlockerDensity, lb),
                )
                .unwrap();
                [
                    expected_duration_los(&k).unwrap(),
                    expected_duration_los_approx(&k).unwrap(),
                    expected_duration_nlos(&k).unwrap(),
                ]
            };
            invariant &= durations(0.001) == durations(0.2);
        }
    }
    c.expect(
        gaps[0] <= 1e-9,
        format!(
            "general form at lambda_S=0 vs open-park closed form: {:.2e}",
            gaps[0]
        ),
    );
    c.expect(
        gaps[1] <= 1e-9,
        format!("NLOS form at R~=0 vs LOS form: {:.2e}", gaps[1]),
    );
    c.expect(
        gaps[2] <= 1e-9,
        format!(
            "NLOS duration at R~=0 vs LOS approximation: {:.2e}",
            gaps[2]
        ),
    );
    c.expect(
        invariant,
        "durations bit-identical for lambda_B = 0.001 and 0.2".to_string(),
    );
}

fn criterion_6(c: &mut Check) {
    for x in [0.1, 1.0, 7.854, 30.0] {
        // direct 200-term summation, terms built from scratch
        let mut direct = 0.0;
        let mut term = 1.0;
        for n in 1..=200u32 {
            term *= x / n as f64;
            direct += term / n as f64;
        }
        let e = rel(ei_series(x), direct);
        c.expect(
            e <= 1e-12,
            format!(
                "x = {x}: series {:.15e} vs direct sum, rel {e:.1e} (<= 1e-12)",
                ei_series(x)
            ),
        );
    }
    for (x, ei) in [
        (1.0, 1.895_117_816_355_936_8),
        (7.854, 389.306_237_174_040_3),
    ] {
        let want = ei - f64::ln(x) - EULER_GAMMA;
        let e = rel(ei_series(x), want);
        c.expect(
            e <= 1e-9,
            format!("x = {x}: Ei(x) - ln x - gamma = {want:.12}, rel {e:.1e} (<= 1e-9)"),
        );
    }
}

fn criterion_7(c: &mut Check) {
    let start = Instant::now();
    let grid = HexGrid::default();
    let p = park().with_cli(ParamKey::SelfBlockAngle, 60.0);
    let k = derive(p).unwrap();
    for density in [50.0, 100.0, 200.0] {
        let layout = build_layout(d_from_density(density * 1e-6));
        let excluded = max_worst_case_exclusions(&layout, &k, p.self_block_angle, grid);
        c.expect(
            excluded <= 10,
            format!(
                "{density} BS/km2: worst-case sector excludes at most {excluded} of 37 BSs (<= 10)"
            ),
        );
    }
    for lb in [0.01, 0.1] {
        for density in [50.0, 100.0, 200.0] {
            let q = park()
                .with_cli(ParamKey::BlockerDensity, lb)
                .with_cli(ParamKey::SelfBlockAngle, 0.0)
                .with_cli(ParamKey::BsDensity, density);
            let k = derive(q).unwrap();
            let layout = build_layout(d_from_density(q.bs_density));
            let hex = hex_blockage_prob(&layout, &k, 0.0, SelfBlockMode::NoSelf, grid);
            let ppp = blockage_prob_open_park(&k).unwrap().cond.unwrap();
            c.expect(
                hex < ppp,
                format!("lambda_B={lb}, {density} BS/km2: hexagonal {hex:.3e} < random {ppp:.3e} (ratio {:.2})", hex / ppp),
            );
        }
    }
    c.note(format!("runtime {:.1?}", start.elapsed()));
}

fn criterion_8(c: &mut Check) {
    let start = Instant::now();
    let p = park().with_cli(ParamKey::BlockerDensity, 0.1);
    let reliability_only = QosTarget {
        reliability: 0.99,
        max_latency_ms: 20.0,
        caching_allowed: true,
    };
    let v2x = plan_density(&p, reliability_only, PlanModel::OpenPark).unwrap();
    c.expect(
        (150.0..=250.0).contains(&v2x.required_density),
        format!(
            "V2X reliability target: {:.1} BS/km2 (200 +- 25%)",
            v2x.required_density
        ),
    );
    let with_latency = plan_density(
        &p,
        QosTarget {
            caching_allowed: false,
            ..reliability_only
        },
        PlanModel::OpenPark,
    )
    .unwrap();
    c.note(format!(
        "V2X with the 20 ms latency bound as well: {:.1} BS/km2, binding {}",
        with_latency.required_density, with_latency.binding_constraint
    ));
    let curve = height_density_tradeoff(&p, 1e-5, &[4.0, 8.0]).unwrap();
    let cut = 1.0 - curve[1].1 / curve[0].1;
    c.expect(
        (0.10..=0.30).contains(&cut),
        format!(
            "height 4 m -> 8 m at P = 1e-5: {:.1} -> {:.1} BS/km2, {:.1}% fewer (10-30%)",
            curve[0].1,
            curve[1].1,
            100.0 * cut
        ),
    );
    let elapsed = start.elapsed();
    c.expect(
        elapsed < Duration::from_secs(10),
        format!("runtime {elapsed:.2?} (< 10 s)"),
    );
}

fn criterion_9(c: &mut Check) {
    let base = urban();
    let (mut prob_ok, mut dur_ok) = (true, true);
    for i in 1..=10 {
        let lt = 60.0 * i as f64;
        let mut p = base.params;
        p.bs_density = lt * 1e-6;
        let k = derive(p).unwrap().with_nlos_range(base.r_tilde);
        let los = blockage_prob_los(&k).unwrap().cond.unwrap();
        let nlos = blockage_prob_nlos(&k).unwrap().cond.unwrap();
        let dl = expected_duration_los_approx(&k).unwrap();
        let dn = expected_duration_nlos(&k).unwrap();
        prob_ok &= nlos <= los;
        dur_ok &= dn <= dl;
        c.note(format!(
            "lambda_T={lt}: cond {los:.3e} -> {nlos:.3e} ({:.0}% lower), duration {dl:.4} -> {dn:.4} s",
            100.0 * (1.0 - nlos / los)
        ));
    }
    c.expect(
        prob_ok,
        "NLOS conditional blockage <= LOS-only at all 10 densities".to_string(),
    );
    c.expect(
        dur_ok,
        "NLOS expected duration <= LOS-only at all 10 densities".to_string(),
    );
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("closed-form a' equals quadrature", criterion_1),
        ("model constants", criterion_2),
        ("analytic vs mobility simulation", criterion_3),
        ("analytic vs independence sampling", criterion_4),
        ("limit reductions", criterion_5),
        ("exponential-integral series", criterion_6),
        ("hexagonal layout", criterion_7),
        ("planner bands", criterion_8),
        ("NLOS benefit direction", criterion_9),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        let mut check = Check::new();
        run(&mut check);
        println!(
            "criterion {n} {}: {name}",
            if check.ok { "PASS" } else { "FAIL" }
        );
        for line in &check.lines {
            println!("{line}");
        }
        failed += usize::from(!check.ok);
    }
    println!("acceptance: {failed} criterion(s) failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
