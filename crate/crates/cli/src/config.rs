use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use darwinsim_core::classicality::{DEFAULT_NULLITY_TOL, DEFAULT_PLATEAU_TOL};
use darwinsim_core::{ModelParams, Quantity};
use serde::Deserialize;

const DEFAULT_GRID_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A number, or a string literal such as `"pi/6"` or `"3*pi/4"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Num(f64),
    Lit(String),
}

impl Real {
    fn value(&self) -> Result<f64> {
        match self {
            Real::Num(x) => Ok(*x),
            Real::Lit(s) => parse_real(s),
        }
    }
}

/// Keys of a `--config` file; every one is optional and flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub theta1: Option<Real>,
    pub theta2: Option<Real>,
    pub j: Option<f64>,
    pub jz: Option<f64>,
    pub jse: Option<f64>,
    pub jx: Option<f64>,
    pub jy: Option<f64>,
    pub n_env: Option<usize>,
    pub time: Option<Real>,
    pub time_grid: Option<Vec<Real>>,
    pub fraction_grid: Option<Vec<usize>>,
    pub outputs: Option<Vec<String>>,
    pub format: Option<Format>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub plateau_tol: Option<f64>,
    pub nullity_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON file with run settings; flags override its values
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Initial angle of S1, radians (accepts literals like pi/6)
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub theta1: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub theta2: Option<f64>,
    /// S1-S2 exchange coupling
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub jz: Option<f64>,
    /// System-environment coupling
    #[arg(long, allow_hyphen_values = true)]
    pub jse: Option<f64>,
    /// XX coupling; differing from --jy switches to dense evolution (N <= 8)
    #[arg(long, allow_hyphen_values = true)]
    pub jx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub jy: Option<f64>,
    /// Number of environment qubits
    #[arg(long)]
    pub n_env: Option<usize>,
    /// Single time point
    #[arg(long, value_parser = parse_real, conflicts_with = "time_grid")]
    pub time: Option<f64>,
    /// Either START:STOP:COUNT (inclusive) or a comma-separated list
    #[arg(long, value_parser = parse_grid)]
    pub time_grid: Option<Grid>,
    /// Comma-separated environment fraction sizes
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<usize>>,
    /// Comma-separated time-sweep columns
    #[arg(long, value_delimiter = ',')]
    pub outputs: Option<Vec<String>>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub plateau_tol: Option<f64>,
    #[arg(long)]
    pub nullity_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub jx: Option<f64>,
    pub jy: Option<f64>,
    pub time_grid: Vec<f64>,
    pub fraction_grid: Vec<usize>,
    pub outputs: Vec<Quantity>,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub plateau_tol: f64,
    pub nullity_tol: f64,
}

impl RunConfig {
    /// Merges defaults (the preset at N = 6), the config file, then flags.
    /// `default_times` is used when neither source sets a time.
    pub fn resolve(args: &CommonArgs, default_times: &[f64]) -> Result<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let real = |flag: Option<f64>, file: &Option<Real>, default: f64| -> Result<f64> {
            match (flag, file) {
                (Some(v), _) => Ok(v),
                (None, Some(r)) => r.value(),
                (None, None) => Ok(default),
            }
        };
        let preset = ModelParams::preset(6, 0.0);
        let params = ModelParams {
            theta1: real(args.theta1, &file.theta1, preset.theta1)?,
            theta2: real(args.theta2, &file.theta2, preset.theta2)?,
            j: args.j.or(file.j).unwrap_or(preset.j),
            jz: args.jz.or(file.jz).unwrap_or(preset.jz),
            jse: args.jse.or(file.jse).unwrap_or(preset.jse),
            n_env: args.n_env.or(file.n_env).unwrap_or(preset.n_env),
            time: 0.0,
        };
        params.validate()?;

        let time_grid = if let Some(t) = args.time {
            vec![t]
        } else if let Some(Grid(g)) = &args.time_grid {
            g.clone()
        } else if let Some(g) = &file.time_grid {
            g.iter().map(Real::value).collect::<Result<_>>()?
        } else if let Some(t) = &file.time {
            vec![t.value()?]
        } else {
            default_times.to_vec()
        };
        if time_grid.is_empty() {
            bail!("time grid is empty");
        }
        if let Some(bad) = time_grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            bail!("time {bad} must be finite and nonnegative");
        }

        let fraction_grid = args
            .fractions
            .clone()
            .or(file.fraction_grid)
            .unwrap_or_else(|| (0..=params.n_env).collect());
        if fraction_grid.is_empty() {
            bail!("fraction grid is empty");
        }

        let names = args.outputs.clone().or(file.outputs);
        let outputs = match names {
            Some(names) => names.iter().map(|n| n.trim().parse::<Quantity>()).collect::<Result<Vec<_>, _>>()?,
            None => Quantity::ALL.to_vec(),
        };
        if outputs.is_empty() {
            bail!("no output quantities selected; valid names: {}", Quantity::valid_names());
        }

        let tol = |v: f64, what: &str| -> Result<f64> {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                bail!("{what} must be positive, got {v}")
            }
        };
        Ok(Self {
            params,
            jx: args.jx.or(file.jx),
            jy: args.jy.or(file.jy),
            time_grid,
            fraction_grid,
            outputs,
            format: args.format.or(file.format).unwrap_or_default(),
            output_path: args.out.clone().or(file.output_path),
            seed: args.seed.or(file.seed).unwrap_or(0),
            plateau_tol: tol(args.plateau_tol.or(file.plateau_tol).unwrap_or(DEFAULT_PLATEAU_TOL), "plateau tolerance")?,
            nullity_tol: tol(args.nullity_tol.or(file.nullity_tol).unwrap_or(DEFAULT_NULLITY_TOL), "nullity tolerance")?,
        })
    }

    /// The one time point of a single-instant command.
    pub fn single_time(&self) -> Result<f64> {
        match self.time_grid.as_slice() {
            [t] => Ok(*t),
            g => bail!("this command takes a single time, got a grid of {} points", g.len()),
        }
    }
}

pub fn default_time_grid() -> Vec<f64> {
    linspace(0.0, FRAC_PI_2, DEFAULT_GRID_POINTS)
}

pub fn default_single_time() -> Vec<f64> {
    vec![FRAC_PI_4]
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Parses `1.5`, `pi`, `-pi/4`, `3*pi/4`, `2pi/3`, `1/3`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t.trim_start_matches('+').trim()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (body, None),
    };
    let plain = |x: &str| x.parse::<f64>().with_context(|| format!("invalid number '{s}'"));
    let numerator = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let c = if coef.is_empty() { 1.0 } else { plain(coef)? };
        c * std::f64::consts::PI
    } else {
        plain(num)?
    };
    let value = match den {
        Some(d) => {
            let d = plain(d)?;
            if d == 0.0 {
                bail!("division by zero in '{s}'");
            }
            numerator / d
        }
        None => numerator,
    };
    if !value.is_finite() {
        bail!("'{s}' is not finite");
    }
    Ok(sign * value)
}

pub fn parse_grid(s: &str) -> Result<Grid> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let n: usize = n.trim().parse().with_context(|| format!("invalid point count in '{s}'"))?;
            if n == 0 {
                bail!("time grid '{s}' has no points");
            }
            Ok(Grid(linspace(parse_real(a)?, parse_real(b)?, n)))
        }
        [_] => Ok(Grid(s.split(',').map(parse_real).collect::<Result<_>>()?)),
        _ => bail!("time grid '{s}' must be START:STOP:COUNT or a comma-separated list"),
    }
}
