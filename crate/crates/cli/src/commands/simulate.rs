use std::path::PathBuf;

use clap::Args;
use mmwave_blockage::los::LosReport;
use mmwave_blockage::output::{fmt_cond, fmt_f64, fmt_opt, CsvSink};
use mmwave_blockage::sim::{run_open_park_sim, BlockageMode, SimConfig, SimOutput, TraceKind};
use mmwave_blockage::{derive, Error, Result};

use crate::context::{axis_columns, finish, Context};
use crate::ParamArgs;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Replications per grid point.
    #[arg(long)]
    runs: Option<usize>,
    /// Observed seconds per replication (after warm-up).
    #[arg(long)]
    duration: Option<f64>,
    /// exponential-mark or geometric-disc.
    #[arg(long)]
    mode: Option<String>,
    /// Side of the square arena (m).
    #[arg(long)]
    arena: Option<f64>,
    /// Blocker diameter (m), geometric-disc mode.
    #[arg(long)]
    blocker_diameter: Option<f64>,
    /// Time step (s), geometric-disc mode.
    #[arg(long)]
    time_step: Option<f64>,
    /// Discarded initial seconds of each replication.
    #[arg(long)]
    warmup: Option<f64>,
    /// Write the per-event block/unblock log to this CSV.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Emit only the summary rows.
    #[arg(long)]
    summary_only: bool,
    #[command(flatten)]
    params: ParamArgs,
}

const COLUMNS: [&str; 20] = [
    "row_type",
    "run_id",
    "run_seed",
    "num_bs",
    "num_links",
    "blocked_fraction",
    "events",
    "event_rate_hz",
    "mean_duration_s",
    "sim_block_prob_cond",
    "sim_block_prob_std",
    "sim_freq_hz",
    "sim_freq_std",
    "sim_duration_s",
    "sim_duration_std",
    "runs_covered",
    "runs_with_events",
    "analytic_block_prob_cond",
    "analytic_freq_hz",
    "analytic_duration_s",
];

fn sim_config(ctx: &Context, args: &SimulateArgs, seed: u64) -> Result<SimConfig> {
    let d = SimConfig::default();
    let mode = match ctx.pick(args.mode.as_deref(), "mode", "exponential-mark") {
        "exponential-mark" => BlockageMode::ExponentialMark,
        "geometric-disc" => BlockageMode::GeometricDisc,
        other => {
            return Err(Error::invalid(
                "mode",
                format!("unknown mode `{other}` (exponential-mark, geometric-disc)"),
            ))
        }
    };
    let runs = match ctx.number(args.runs.map(|r| r as f64), "runs")? {
        Some(r) if r >= 1.0 && r.fract() == 0.0 => r as usize,
        Some(r) => {
            return Err(Error::invalid(
                "runs",
                format!("must be a positive integer, got {r}"),
            ))
        }
        None => d.num_runs,
    };
    Ok(SimConfig {
        arena_side: ctx
            .number(args.arena, "arena_side")?
            .unwrap_or(d.arena_side),
        num_runs: runs,
        run_duration: ctx
            .number(args.duration, "run_duration")?
            .unwrap_or(d.run_duration),
        move_time_bounds: d.move_time_bounds,
        rng_seed: seed,
        blockage_mode: mode,
        blocker_diameter: ctx
            .number(args.blocker_diameter, "blocker_diameter")?
            .unwrap_or(d.blocker_diameter),
        time_step: ctx
            .number(args.time_step, "time_step")?
            .unwrap_or(d.time_step),
        warmup: ctx.number(args.warmup, "warmup")?.unwrap_or(d.warmup),
        trace: args.trace.is_some(),
    })
}

pub fn run(ctx: &Context, args: &SimulateArgs) -> Result<()> {
    let (seed, generated) = ctx.seed()?;
    let sim = sim_config(ctx, args, seed)?;
    let (axes, points) = ctx.points(&args.params)?;
    for p in &points {
        derive(p.params)?;
        sim.validate(&p.params)?;
    }

    // grid points run one after another; replications inside each run in parallel
    let mut results: Vec<(SimOutput, LosReport)> = Vec::with_capacity(points.len());
    for p in &points {
        let out = run_open_park_sim(&p.params, &sim)?;
        let report = LosReport::evaluate_open_park(&derive(p.params)?)?;
        results.push((out, report));
    }

    let base = ctx.base_params(&args.params)?;
    let mut comments = ctx.comments("simulate", &base);
    comments.push((
        "seed".into(),
        if generated {
            format!("{seed} (generated)")
        } else {
            seed.to_string()
        },
    ));
    comments.push(("runs".into(), sim.num_runs.to_string()));
    comments.push(("run_duration_s".into(), fmt_f64(sim.run_duration)));
    comments.push(("warmup_s".into(), fmt_f64(sim.warmup)));
    comments.push(("arena_side_m".into(), fmt_f64(sim.arena_side)));
    comments.push((
        "mode".into(),
        match sim.blockage_mode {
            BlockageMode::ExponentialMark => "exponential-mark".into(),
            BlockageMode::GeometricDisc => format!(
                "geometric-disc (diameter {} m, step {} s)",
                sim.blocker_diameter, sim.time_step
            ),
        },
    ));

    let mut columns = axis_columns(&axes);
    columns.extend_from_slice(&COLUMNS);
    let mut sink = CsvSink::new(ctx.writer()?, &comments, &columns)?;
    let blank = |n: usize| vec![String::new(); n];
    for (p, (out, report)) in points.iter().zip(&results) {
        let prefix: Vec<String> = p.values.iter().map(|v| fmt_f64(*v)).collect();
        if !args.summary_only {
            for r in &out.runs {
                let mut row = prefix.clone();
                row.extend([
                    "run".to_string(),
                    r.run_id.to_string(),
                    r.seed.to_string(),
                    r.num_bs.to_string(),
                    r.num_links.to_string(),
                    fmt_f64(r.blocked_fraction),
                    r.events.to_string(),
                    fmt_f64(r.event_rate),
                    fmt_opt(r.mean_duration),
                ]);
                row.extend(blank(11));
                sink.row(&row)?;
            }
        }
        let mut row = prefix.clone();
        row.push("summary".into());
        row.extend(blank(8));
        row.extend([
            fmt_f64(out.prob.point_estimate),
            fmt_f64(out.prob.std_dev),
            fmt_f64(out.freq.point_estimate),
            fmt_f64(out.freq.std_dev),
            fmt_f64(out.duration.point_estimate),
            fmt_f64(out.duration.std_dev),
            out.prob.num_runs.to_string(),
            out.duration.num_runs.to_string(),
            fmt_cond(report.block_prob_cond),
            report.exp_frequency_hz.map(fmt_cond).unwrap_or_default(),
            fmt_cond(report.exp_duration_s),
        ]);
        sink.row(&row)?;
    }
    finish(sink)?;

    if let Some(path) = &args.trace {
        let mut tcols = axis_columns(&axes);
        tcols.extend_from_slice(&["run_id", "time_s", "link", "event"]);
        let mut trace = CsvSink::new(ctx.writer_at(Some(path))?, &comments, &tcols)?;
        for (p, (out, _)) in points.iter().zip(&results) {
            for e in &out.trace {
                let mut row: Vec<String> = p.values.iter().map(|v| fmt_f64(*v)).collect();
                row.extend([
                    e.run_id.to_string(),
                    fmt_f64(e.time),
                    e.link
                        .map(|l| l.to_string())
                        .unwrap_or_else(|| "all".into()),
                    match e.kind {
                        TraceKind::Block => "block",
                        TraceKind::Unblock => "unblock",
                    }
                    .to_string(),
                ]);
                trace.row(&row)?;
            }
        }
        finish(trace)?;
    }
    Ok(())
}
