//! Command-line flags, the optional JSON config file, and their merge into
//! a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpade_core::{CompactSetDescriptor, EntireFunction};
use serde::Deserialize;

use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "fpade",
    version,
    about = "Padé interpolation by F-polynomials: numerical experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Pointwise error of T_{F,q} g against the error bound
    Interp(Flags),
    /// Brackets for t(q), ε(q) with the monomial witness and extremal polynomial
    Bounds(Flags),
    /// Near-Fekete arrays, V_m estimates and Chebyshev brackets
    Fekete(Flags),
    /// Normalized ε_m brackets against e·d(K)
    Capacity(Flags),
    /// Zeros of extremal F-polynomials in the closed unit disk
    Zeros(Flags),
    /// Laplace-transform interpolation experiments on the unit circle
    Laplace(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Interp,
    Bounds,
    Fekete,
    Capacity,
    Zeros,
    Laplace,
}

impl Command {
    pub fn split(self) -> (Kind, Flags) {
        match self {
            Command::Interp(f) => (Kind::Interp, f),
            Command::Bounds(f) => (Kind::Bounds, f),
            Command::Fekete(f) => (Kind::Fekete, f),
            Command::Capacity(f) => (Kind::Capacity, f),
            Command::Zeros(f) => (Kind::Zeros, f),
            Command::Laplace(f) => (Kind::Laplace, f),
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Compact set: circle:R, disk:R, segment:a,b, polygon:x,y;..., cloud:x,y;... or JSON
    #[arg(long)]
    pub set: Option<String>,
    /// Entire function: exp, alt, osc, osc:a, or a JSON coefficient list [[re,im],...]
    #[arg(long = "F")]
    pub func: Option<String>,
    /// m values: "5,10,20", "2:12" or a mix
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long = "m-max")]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Radius parameter (interp: bound radius; zeros: bound evaluation r; laplace chi-r: list of r)
    #[arg(long)]
    pub r: Option<String>,
    /// Function to interpolate: geometric:R or exp:λ
    #[arg(long)]
    pub g: Option<String>,
    /// Laplace experiment: dirac-example, cos, chi-r, fekete-bound, lambda
    #[arg(long)]
    pub experiment: Option<String>,
    /// Spectral measure JSON (laplace lambda experiment)
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// Largest |z| for interp sample points
    #[arg(long = "z-max")]
    pub z_max: Option<f64>,
    /// JSON file whose entries override the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Deserialize, Default)]
#[serde(untagged)]
enum Scalars<T> {
    #[default]
    None,
    One(T),
    Text(String),
    List(Vec<T>),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    set: Option<serde_json::Value>,
    #[serde(rename = "F")]
    func: Option<serde_json::Value>,
    #[serde(default)]
    m: Scalars<usize>,
    m_max: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    trials: Option<usize>,
    #[serde(default)]
    r: Scalars<f64>,
    g: Option<String>,
    experiment: Option<String>,
    measure: Option<serde_json::Value>,
    grid_n: Option<usize>,
    z_max: Option<f64>,
}

fn value_text(v: serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

fn join<T: ToString>(s: Scalars<T>) -> Option<String> {
    match s {
        Scalars::None => None,
        Scalars::One(x) => Some(x.to_string()),
        Scalars::Text(t) => Some(t),
        Scalars::List(xs) => Some(xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
    }
}

impl Flags {
    /// Entries of the config file replace the corresponding flags.
    pub fn apply_config(&mut self) -> Result<(), Failure> {
        let Some(path) = self.config.clone() else {
            return Ok(());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::config("config_unreadable", format!("{}: {e}", path.display())))?;
        let c: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| Failure::config("config_invalid", format!("{}: {e}", path.display())))?;
        macro_rules! over {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    self.$field = Some(v);
                }
            };
        }
        over!(set, c.set.map(value_text));
        over!(func, c.func.map(value_text));
        over!(m, join(c.m));
        over!(m_max, c.m_max);
        over!(seed, c.seed);
        over!(tol, c.tol);
        over!(output, c.output);
        over!(format, c.format);
        over!(trials, c.trials);
        over!(r, join(c.r));
        over!(g, c.g);
        over!(experiment, c.experiment);
        over!(measure, c.measure.map(value_text));
        over!(grid_n, c.grid_n);
        over!(z_max, c.z_max);
        Ok(())
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub set: CompactSetDescriptor,
    pub func: EntireFunction,
    pub m_list: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub trials: usize,
    pub r: Vec<f64>,
    pub g: Option<String>,
    pub experiment: Option<String>,
    pub measure: Option<String>,
    pub grid_n: Option<usize>,
    pub z_max: f64,
}

/// `"5,10,20"`, `"2:12"` (inclusive) and `"2:12:2"` (stepped), mixed freely.
pub fn parse_m_list(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::config("bad_m_list", format!("cannot parse m list `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let pieces: Vec<&str> = part.split(':').collect();
        match pieces.as_slice() {
            [one] => out.push(num(one)?),
            [a, b] => out.extend(num(a)?..=num(b)?),
            [a, b, step] => {
                let step = num(step)?;
                if step == 0 {
                    return Err(bad());
                }
                out.extend((num(a)?..=num(b)?).step_by(step));
            }
            _ => return Err(bad()),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn parse_reals(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::config("bad_number", format!("cannot parse `{t}` as a number")))
        })
        .collect()
}

pub fn parse_func(label: &str) -> Result<EntireFunction, Failure> {
    let label = label.trim();
    let f = if label.starts_with('[') {
        EntireFunction::from_json("custom", label)
    } else {
        EntireFunction::from_label(label)
    };
    f.map_err(|e| Failure::config("unknown_function", e.to_string()))
}

impl RunConfig {
    pub fn resolve(kind: Kind, flags: Flags) -> Result<Self, Failure> {
        let set = flags
            .set
            .as_deref()
            .unwrap_or("circle:1")
            .parse::<CompactSetDescriptor>()
            .map_err(|e| Failure::config("bad_set", e.to_string()))?;
        let func = parse_func(flags.func.as_deref().unwrap_or("exp"))?;
        let start = match kind {
            Kind::Laplace | Kind::Zeros | Kind::Interp | Kind::Bounds => 1,
            Kind::Fekete | Kind::Capacity => 2,
        };
        let m_list = match (&flags.m, flags.m_max) {
            (Some(m), _) => parse_m_list(m)?,
            (None, Some(max)) => (start..=max).collect(),
            (None, None) => default_m(kind, flags.experiment.as_deref()),
        };
        if m_list.contains(&0) {
            return Err(Failure::config("bad_m_list", "m must be positive"));
        }
        let tol = flags.tol.unwrap_or(1e-13);
        if !(tol > 0.0) {
            return Err(Failure::config(
                "bad_tol",
                format!("tolerance must be positive, got {tol}"),
            ));
        }
        let trials = flags.trials.unwrap_or(5);
        if trials == 0 {
            return Err(Failure::config("bad_trials", "trials must be at least 1"));
        }
        let r = match &flags.r {
            Some(s) => parse_reals(s)?,
            None => Vec::new(),
        };
        Ok(RunConfig {
            set,
            func,
            m_list,
            seed: flags.seed.unwrap_or(0),
            tol,
            output: flags.output,
            format: flags.format.unwrap_or_default(),
            trials,
            r,
            g: flags.g,
            experiment: flags.experiment,
            measure: flags.measure,
            grid_n: flags.grid_n,
            z_max: flags.z_max.unwrap_or(0.6),
        })
    }
}

fn default_m(kind: Kind, experiment: Option<&str>) -> Vec<usize> {
    match kind {
        Kind::Interp => vec![4, 8, 12],
        Kind::Bounds => (2..=12).collect(),
        Kind::Fekete => vec![4, 8, 16],
        Kind::Capacity => vec![10, 20, 50, 100, 200],
        Kind::Zeros => vec![5, 10, 20],
        Kind::Laplace => match experiment {
            Some("dirac-example") => (1..=101).collect(),
            Some("chi-r") => vec![64],
            Some("fekete-bound") => vec![4, 8, 12],
            _ => vec![8, 16, 32, 64],
        },
    }
}
