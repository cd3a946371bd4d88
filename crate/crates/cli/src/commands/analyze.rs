use mmwave_blockage::los::{expected_duration_los_approx, LosReport};
use mmwave_blockage::nlos::NlosReport;
use mmwave_blockage::output::{fmt_cond, fmt_f64, CsvSink};
use mmwave_blockage::{derive, Error, Result};

use crate::context::{axis_columns, finish, map_ordered, Context};
use crate::ParamArgs;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Model {
    Los,
    Nlos,
    OpenPark,
}

const LOS_COLUMNS: [&str; 10] = [
    "coverage_prob",
    "block_prob_uncond",
    "block_prob_cond",
    "exp_duration_s",
    "exp_duration_approx_s",
    "exp_frequency_hz",
    "a_integral",
    "a_prime",
    "rc_over_mu",
    "block_prob_method",
];

const NLOS_COLUMNS: [&str; 12] = [
    "coverage_prob",
    "block_prob_uncond",
    "block_prob_cond",
    "exp_duration_s",
    "a_tilde",
    "q_tilde",
    "r_tilde_m",
    "los_coverage_prob",
    "los_block_prob_cond",
    "los_exp_duration_s",
    "los_exp_duration_approx_s",
    "block_prob_method",
];

pub fn run(ctx: &Context, model: Option<&str>, args: &ParamArgs) -> Result<()> {
    let model = match ctx.pick(model, "model", "los") {
        "los" => Model::Los,
        "nlos" => Model::Nlos,
        "open-park" | "open_park" => Model::OpenPark,
        other => {
            return Err(Error::invalid(
                "model",
                format!("unknown model `{other}` (los, nlos, open-park)"),
            ))
        }
    };
    let (axes, points) = ctx.points(args)?;
    for p in &points {
        derive(p.params)?;
    }
    let rows = map_ordered(&points, |pt| {
        let k = derive(pt.params)?;
        let mut row: Vec<String> = pt.values.iter().map(|v| fmt_f64(*v)).collect();
        match model {
            Model::Los | Model::OpenPark => {
                let r = if model == Model::OpenPark {
                    LosReport::evaluate_open_park(&k)?
                } else {
                    LosReport::evaluate(&k)?
                };
                row.extend([
                    fmt_f64(r.coverage_prob),
                    fmt_f64(r.block_prob_uncond),
                    fmt_cond(r.block_prob_cond),
                    fmt_cond(r.exp_duration_s),
                    fmt_cond(expected_duration_los_approx(&k)),
                    r.exp_frequency_hz.map(fmt_cond).unwrap_or_default(),
                    fmt_f64(r.a_integral),
                    fmt_f64(r.a_prime),
                    fmt_f64(k.rc_over_mu()),
                    if model == Model::OpenPark {
                        "closed-form"
                    } else {
                        "quadrature"
                    }
                    .to_string(),
                ]);
            }
            Model::Nlos => {
                let r = NlosReport::evaluate(&k)?;
                let los = LosReport::evaluate(&k)?;
                row.extend([
                    fmt_f64(r.coverage_prob),
                    fmt_f64(r.block_prob_uncond),
                    fmt_cond(r.block_prob_cond),
                    fmt_cond(r.exp_duration_s),
                    fmt_f64(r.a_tilde),
                    fmt_f64(r.q_tilde),
                    fmt_f64(r.r_tilde),
                    fmt_f64(los.coverage_prob),
                    fmt_cond(los.block_prob_cond),
                    fmt_cond(los.exp_duration_s),
                    fmt_cond(expected_duration_los_approx(&k)),
                    "quadrature".to_string(),
                ]);
            }
        }
        Ok(row)
    })?;

    let base = ctx.base_params(args)?;
    let mut comments = ctx.comments("analyze", &base);
    comments.push((
        "model".into(),
        match model {
            Model::Los => "los",
            Model::Nlos => "nlos",
            Model::OpenPark => "open-park",
        }
        .into(),
    ));
    let mut columns = axis_columns(&axes);
    columns.extend_from_slice(if model == Model::Nlos {
        &NLOS_COLUMNS[..]
    } else {
        &LOS_COLUMNS[..]
    });
    let mut sink = CsvSink::new(ctx.writer()?, &comments, &columns)?;
    for row in rows {
        sink.row(&row)?;
    }
    finish(sink)
}
