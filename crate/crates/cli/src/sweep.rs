//! Parameter sweeps: `axis=min:max:count[:lin|log]` or `axis=v1,v2,...`.

use mmwave_blockage::{Error, ParamKey, Result, SystemParams};

/// A list of values, written either as a range or as an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn parse(text: &str) -> Result<Grid> {
        let text = text.trim();
        if text.contains(':') {
            let parts: Vec<&str> = text.split(':').map(str::trim).collect();
            if !(3..=4).contains(&parts.len()) {
                return Err(Error::Config(format!(
                    "range `{text}` must be min:max:count[:lin|log]"
                )));
            }
            let min = number(parts[0])?;
            let max = number(parts[1])?;
            let count: usize = parts[2].parse().map_err(|_| {
                Error::Config(format!(
                    "grid count `{}` is not a positive integer",
                    parts[2]
                ))
            })?;
            if count == 0 {
                return Err(Error::Config("grid count must be at least 1".into()));
            }
            let log = match parts.get(3).copied() {
                None | Some("lin") => false,
                Some("log") => true,
                Some(other) => {
                    return Err(Error::Config(format!(
                        "unknown spacing `{other}` (lin or log)"
                    )))
                }
            };
            if log && !(min > 0.0 && max > 0.0) {
                return Err(Error::Config(format!(
                    "log spacing needs positive bounds, got {min}:{max}"
                )));
            }
            if count == 1 {
                return Ok(Grid(vec![min]));
            }
            let values = (0..count)
                .map(|i| {
                    let t = i as f64 / (count - 1) as f64;
                    if log {
                        (min.ln() + t * (max.ln() - min.ln())).exp()
                    } else {
                        min + t * (max - min)
                    }
                })
                .collect();
            Ok(Grid(values))
        } else {
            let values = text
                .split(',')
                .map(|s| number(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            Ok(Grid(values))
        }
    }
}

fn number(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("`{s}` is not a finite number")))
}

/// One swept parameter, in CLI units.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: ParamKey,
    pub grid: Grid,
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<SweepSpec> {
        let (axis, grid) = text.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "sweep `{text}` must look like axis=min:max:count or axis=v1,v2"
            ))
        })?;
        Ok(SweepSpec {
            axis: ParamKey::parse(axis.trim())?,
            grid: Grid::parse(grid)?,
        })
    }
}

/// One grid point: the axis values (CLI units) and the resulting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub values: Vec<f64>,
    pub params: SystemParams,
}

/// Cartesian product of the sweeps over `base`, first sweep outermost.
/// No sweeps yields the single base point.
pub fn expand(base: SystemParams, sweeps: &[SweepSpec]) -> Result<Vec<Point>> {
    for (i, s) in sweeps.iter().enumerate() {
        if sweeps[..i].iter().any(|o| o.axis == s.axis) {
            return Err(Error::Config(format!("axis `{}` is swept twice", s.axis)));
        }
    }
    let mut points = vec![Point {
        values: Vec::new(),
        params: base,
    }];
    for s in sweeps {
        points = points
            .into_iter()
            .flat_map(|p| {
                s.grid.0.iter().map(move |&v| {
                    let mut values = p.values.clone();
                    values.push(v);
                    Point {
                        values,
                        params: p.params.with_cli(s.axis, v),
                    }
                })
            })
            .collect();
    }
    Ok(points)
}
