//! Configuration, seed and output handling shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use mmwave_blockage::output::CsvSink;
use mmwave_blockage::{Config, Error, ParamKey, Result, SystemParams};
use rayon::prelude::*;

use crate::sweep::{expand, Point, SweepSpec};
use crate::ParamArgs;

pub struct Context {
    pub config: Config,
    pub config_path: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

impl Context {
    pub fn load(config: Option<&Path>, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self> {
        let cfg = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                Config::parse(&text)?
            }
            None => Config::default(),
        };
        Ok(Context {
            config: cfg,
            config_path: config.map(Path::to_path_buf),
            seed,
            out,
        })
    }

    /// Recipe key from the configuration file.
    pub fn extra(&self, key: &str) -> Option<&str> {
        self.config.extra.get(key).map(String::as_str)
    }

    /// A command-line value, else the config value, else `default`.
    pub fn pick<'a>(&'a self, cli: Option<&'a str>, key: &str, default: &'a str) -> &'a str {
        cli.or_else(|| self.extra(key)).unwrap_or(default)
    }

    /// Parses a recipe number given on the command line or in the config.
    pub fn number(&self, cli: Option<f64>, key: &str) -> Result<Option<f64>> {
        if cli.is_some() {
            return Ok(cli);
        }
        self.extra(key)
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!("config key `{key}` must be a number, got `{s}`"))
                })
            })
            .transpose()
    }

    /// `(seed, was_generated)`: `--seed`, else the config `seed`, else random.
    pub fn seed(&self) -> Result<(u64, bool)> {
        if let Some(s) = self.seed {
            return Ok((s, false));
        }
        if let Some(s) = self.extra("seed") {
            let v = s.parse().map_err(|_| {
                Error::Config(format!(
                    "config key `seed` must be an unsigned integer, got `{s}`"
                ))
            })?;
            return Ok((v, false));
        }
        Ok((rand::random(), true))
    }

    /// Base parameters: config file, then `--set` overrides.
    pub fn base_params(&self, args: &ParamArgs) -> Result<SystemParams> {
        let mut p = self.config.params;
        for s in &args.sets {
            p.apply_override(s)?;
        }
        Ok(p)
    }

    /// Grid points: `--sweep` replaces the config sweeps when given.
    pub fn points(&self, args: &ParamArgs) -> Result<(Vec<ParamKey>, Vec<Point>)> {
        let specs = if args.sweeps.is_empty() {
            &self.config.sweeps
        } else {
            &args.sweeps
        };
        let sweeps = specs
            .iter()
            .map(|s| SweepSpec::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let base = self.base_params(args)?;
        let axes = sweeps.iter().map(|s| s.axis).collect();
        Ok((axes, expand(base, &sweeps)?))
    }

    pub fn writer(&self) -> Result<Box<dyn Write>> {
        self.writer_at(self.out.as_deref())
    }

    pub fn writer_at(&self, path: Option<&Path>) -> Result<Box<dyn Write>> {
        Ok(match path {
            Some(p) => {
                Box::new(BufWriter::new(File::create(p).map_err(|e| {
                    Error::Io(format!("cannot create {}: {e}", p.display()))
                })?))
            }
            None => Box::new(io::stdout().lock()),
        })
    }

    /// Header comments common to every command.
    pub fn comments(&self, command: &str, base: &SystemParams) -> Vec<(String, String)> {
        let mut c = vec![("command".to_string(), command.to_string())];
        if let Some(p) = &self.config_path {
            c.push(("config".into(), p.display().to_string()));
        }
        for key in ParamKey::ALL {
            c.push((
                key.name().to_string(),
                format!("{} {}", base.get_cli(key), key.cli_unit()),
            ));
        }
        c
    }
}

/// Column names of the swept axes.
pub fn axis_columns(axes: &[ParamKey]) -> Vec<&'static str> {
    axes.iter().map(|a| a.name()).collect()
}

/// Evaluates `f` on every item in parallel and returns results in input
/// order; the first error in input order wins.
pub fn map_ordered<I: Sync, T: Send>(
    items: &[I],
    f: impl Fn(&I) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    items
        .par_iter()
        .map(f)
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn finish(sink: CsvSink<Box<dyn Write>>) -> Result<()> {
    let mut w = sink.finish()?;
    w.flush()?;
    Ok(())
}
