use clap::Args;
use mmwave_blockage::hex::{
    build_layout, d_from_density, density_from_d, hex_evaluate, HexGrid, SelfBlockMode,
};
use mmwave_blockage::los::blockage_prob_open_park;
use mmwave_blockage::output::{fmt_cond, fmt_f64, CsvSink};
use mmwave_blockage::{derive, Error, Result};

use crate::context::{axis_columns, finish, map_ordered, Context};
use crate::sweep::{Grid, Point};
use crate::ParamArgs;

#[derive(Args, Debug)]
pub struct HexArgs {
    /// Cell circumradius d in meters (value, list or range).
    #[arg(long, conflicts_with = "density")]
    d: Option<String>,
    /// Target BS density in BS/km² (value, list or range).
    #[arg(long)]
    density: Option<String>,
    /// no-self or worst-case.
    #[arg(long)]
    mode: Option<String>,
    /// Midpoints per triangle edge direction (grid is 6·N·N positions).
    #[arg(long)]
    grid: Option<usize>,
    #[command(flatten)]
    params: ParamArgs,
}

const COLUMNS: [&str; 6] = [
    "d_m",
    "density_bs_per_km2",
    "mode",
    "hex_block_prob",
    "max_excluded_bs",
    "ppp_block_prob_cond",
];

pub fn run(ctx: &Context, args: &HexArgs) -> Result<()> {
    let mode = match ctx.pick(args.mode.as_deref(), "mode", "no-self") {
        "no-self" => SelfBlockMode::NoSelf,
        "worst-case" => SelfBlockMode::WorstCase,
        other => {
            return Err(Error::invalid(
                "mode",
                format!("unknown mode `{other}` (no-self, worst-case)"),
            ))
        }
    };
    let n = match ctx.number(args.grid.map(|g| g as f64), "grid")? {
        Some(g) if g >= 1.0 && g.fract() == 0.0 => g as usize,
        Some(g) => {
            return Err(Error::invalid(
                "grid",
                format!("must be a positive integer, got {g}"),
            ))
        }
        None => HexGrid::default().radial,
    };
    let grid = HexGrid {
        radial: n,
        lateral: n,
    };

    // every cell size as (d, density in BS/km²)
    let cells: Vec<(f64, f64)> = match (args.d.as_deref(), args.density.as_deref()) {
        (Some(d), _) => sizes(d, "d", |d| (d, density_from_d(d) * 1e6))?,
        (None, Some(x)) => sizes(x, "density", |x| (d_from_density(x * 1e-6), x))?,
        (None, None) => match (ctx.extra("d"), ctx.extra("density")) {
            (Some(d), _) => sizes(d, "d", |d| (d, density_from_d(d) * 1e6))?,
            (None, Some(x)) => sizes(x, "density", |x| (d_from_density(x * 1e-6), x))?,
            (None, None) => {
                return Err(Error::invalid(
                    "d",
                    "give --d or --density (or d/density in the config)",
                ))
            }
        },
    };

    let (axes, points) = ctx.points(&args.params)?;
    for p in &points {
        if derive(p.params)?.params.static_density != 0.0 {
            return Err(Error::RequiresOpenPark);
        }
    }
    let jobs: Vec<(Point, (f64, f64))> = points
        .iter()
        .flat_map(|p| cells.iter().map(move |&c| (p.clone(), c)))
        .collect();
    let rows = map_ordered(&jobs, |(pt, (d, density))| {
        let (d, density) = (*d, *density);
        let k = derive(pt.params)?;
        let layout = build_layout(d);
        let omega = pt.params.self_block_angle;
        let summary = hex_evaluate(&layout, &k, omega, mode, grid);
        let mut ppp_params = pt.params;
        ppp_params.bs_density = density * 1e-6;
        if mode == SelfBlockMode::NoSelf {
            ppp_params.self_block_angle = 0.0;
        }
        let ppp = blockage_prob_open_park(&derive(ppp_params)?)?;
        let mut row: Vec<String> = pt.values.iter().map(|v| fmt_f64(*v)).collect();
        row.extend([
            fmt_f64(d),
            fmt_f64(density),
            match mode {
                SelfBlockMode::NoSelf => "no-self",
                SelfBlockMode::WorstCase => "worst-case",
            }
            .to_string(),
            fmt_f64(summary.block_prob),
            summary.max_excluded.to_string(),
            fmt_cond(ppp.cond),
        ]);
        Ok(row)
    })?;

    let base = ctx.base_params(&args.params)?;
    let mut comments = ctx.comments("hex", &base);
    comments.push((
        "cell_convention".into(),
        "d is the hexagon circumradius; neighbouring BSs are sqrt(3)*d apart; density = 1/((3*sqrt(3)/2)*d^2)"
            .into(),
    ));
    comments.push(("grid".into(), format!("6 triangles x {n} x {n} midpoints")));
    let mut columns = axis_columns(&axes);
    columns.extend_from_slice(&COLUMNS);
    let mut sink = CsvSink::new(ctx.writer()?, &comments, &columns)?;
    for row in rows {
        sink.row(&row)?;
    }
    finish(sink)
}

fn sizes(text: &str, field: &str, f: impl Fn(f64) -> (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let values = Grid::parse(text)?.0;
    if let Some(bad) = values.iter().find(|v| v.is_nan() || **v <= 0.0) {
        return Err(Error::invalid(
            field,
            format!("must be positive, got {bad}"),
        ));
    }
    Ok(values.into_iter().map(f).collect())
}
