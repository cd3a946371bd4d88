use std::path::PathBuf;

use clap::Args;
use mmwave_blockage::output::{fmt_f64, CsvSink};
use mmwave_blockage::planner::{
    height_density_tradeoff, parse_qos_table, plan_density, PlanModel, QosRow,
};
use mmwave_blockage::{derive, Error, Result};

use crate::context::{axis_columns, finish, map_ordered, Context};
use crate::sweep::{Grid, Point};
use crate::ParamArgs;

#[derive(Args, Debug)]
pub struct PlanArgs {
    /// QoS table CSV: application,reliability_pct,latency_ms,caching.
    #[arg(long, value_name = "PATH", conflicts_with = "heights")]
    qos: Option<PathBuf>,
    /// open-park, urban-los or urban-nlos.
    #[arg(long)]
    model: Option<String>,
    /// BS heights (m) for the height-density tradeoff instead of a QoS table.
    #[arg(long)]
    heights: Option<String>,
    /// Conditional blockage probability target of the tradeoff.
    #[arg(long)]
    target_prob: Option<f64>,
    #[command(flatten)]
    params: ParamArgs,
}

const QOS_COLUMNS: [&str; 10] = [
    "application",
    "reliability",
    "max_latency_ms",
    "caching",
    "model",
    "required_density_bs_per_km2",
    "binding_constraint",
    "achieved_block_prob",
    "achieved_duration_s",
    "status",
];

pub fn run(ctx: &Context, args: &PlanArgs) -> Result<()> {
    let (axes, points) = ctx.points(&args.params)?;
    for p in &points {
        derive(p.params)?;
    }
    let heights = args.heights.as_deref().or_else(|| ctx.extra("heights"));
    match heights {
        Some(h) if args.qos.is_none() => tradeoff(ctx, args, h, &axes, &points),
        _ => qos_table(ctx, args, &axes, &points),
    }
}

fn qos_table(
    ctx: &Context,
    args: &PlanArgs,
    axes: &[mmwave_blockage::ParamKey],
    points: &[Point],
) -> Result<()> {
    let path = match (&args.qos, ctx.extra("qos_table")) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => {
            // relative paths in a config resolve against the config's directory
            let base = ctx
                .config_path
                .as_ref()
                .and_then(|c| c.parent().map(|d| d.to_path_buf()));
            base.map(|b| b.join(p)).unwrap_or_else(|| PathBuf::from(p))
        }
        (None, None) => return Err(Error::invalid("qos", "give --qos PATH or --heights GRID")),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let table = parse_qos_table(&text)?;
    let model: PlanModel = ctx
        .pick(args.model.as_deref(), "model", "open-park")
        .parse()?;

    let jobs: Vec<(&Point, &QosRow)> = points
        .iter()
        .flat_map(|p| table.iter().map(move |r| (p, r)))
        .collect();
    let rows = map_ordered(&jobs, |(pt, q)| {
        let mut row: Vec<String> = pt.values.iter().map(|v| fmt_f64(*v)).collect();
        row.extend([
            q.application.clone(),
            fmt_f64(q.target.reliability),
            fmt_f64(q.target.max_latency_ms),
            q.target.caching_allowed.to_string(),
            model.to_string(),
        ]);
        match plan_density(&pt.params, q.target, model) {
            Ok(r) => row.extend([
                fmt_f64(r.required_density),
                r.binding_constraint.to_string(),
                fmt_f64(r.achieved_block_prob),
                fmt_f64(r.achieved_duration_s),
                "ok".to_string(),
            ]),
            Err(e @ Error::Infeasible { .. }) => row.extend([
                "NaN".into(),
                String::new(),
                String::new(),
                String::new(),
                e.to_string(),
            ]),
            Err(e) => return Err(e),
        }
        Ok(row)
    })?;

    let base = ctx.base_params(&args.params)?;
    let mut comments = ctx.comments("plan", &base);
    comments.push(("qos_table".into(), path.display().to_string()));
    let mut columns = axis_columns(axes);
    columns.extend_from_slice(&QOS_COLUMNS);
    let mut sink = CsvSink::new(ctx.writer()?, &comments, &columns)?;
    for row in rows {
        sink.row(&row)?;
    }
    finish(sink)
}

fn tradeoff(
    ctx: &Context,
    args: &PlanArgs,
    heights: &str,
    axes: &[mmwave_blockage::ParamKey],
    points: &[Point],
) -> Result<()> {
    let heights = Grid::parse(heights)?.0;
    let target = ctx
        .number(args.target_prob, "target_prob")?
        .ok_or_else(|| Error::invalid("target_prob", "the tradeoff needs --target-prob"))?;
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(
            "target_prob",
            format!("must lie in (0, 1), got {target}"),
        ));
    }
    let curves = map_ordered(points, |pt| {
        height_density_tradeoff(&pt.params, target, &heights)
    })?;

    let base = ctx.base_params(&args.params)?;
    let mut comments = ctx.comments("plan", &base);
    comments.push(("target_block_prob".into(), fmt_f64(target)));
    let mut columns = axis_columns(axes);
    columns.extend_from_slice(&["height_bs_m", "required_density_bs_per_km2"]);
    let mut sink = CsvSink::new(ctx.writer()?, &comments, &columns)?;
    for (pt, curve) in points.iter().zip(curves) {
        for (h, density) in curve {
            let mut row: Vec<String> = pt.values.iter().map(|v| fmt_f64(*v)).collect();
            row.extend([fmt_f64(h), fmt_f64(density)]);
            sink.row(&row)?;
        }
    }
    finish(sink)
}
