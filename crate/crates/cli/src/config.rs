//! Run configuration: a plain-text `key = value` file overlaid by
//! command-line flags. The resolved configuration is embedded in every
//! report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to the command's defaults.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// Plain-text `key = value` configuration file (flags take precedence).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Characteristic of the base field.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Degree of the base field over F_p.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Residue field size for density computations.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Degree of the divisor D = d * infinity.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Sample count (Monte Carlo size or batch size, depending on the command).
    #[arg(long = "n-samples", global = true)]
    pub n_samples: Option<u64>,
    /// Number of random trials for property checks.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Truncation bound (place degree for densities, lattice bound for cusp tails).
    #[arg(long, global = true)]
    pub truncation: Option<u32>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Enable brute-force cross-checks.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Largest field size for which point enumeration is allowed.
    #[arg(long = "max-q", global = true)]
    pub max_q: Option<u64>,
}

/// Fully resolved configuration; `None` means "use the command default".
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub p: Option<u64>,
    pub m: Option<u32>,
    pub q: Option<u64>,
    pub d: Option<usize>,
    pub n_samples: Option<u64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub truncation: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub oracle: bool,
    pub max_q: Option<u64>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("invalid value {value:?} for {key}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("invalid value {value:?} for {key}")),
    }
}

/// Parse `key = value` lines; `#` starts a comment, keys use the flag
/// spelling (`n-samples` or `n_samples`).
pub fn parse_config_text(text: &str) -> Result<RunConfig, String> {
    let mut seen = BTreeMap::new();
    let mut cfg = RunConfig::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if seen.insert(key.clone(), n + 1).is_some() {
            return Err(format!("line {}: duplicate key {key}", n + 1));
        }
        match key.as_str() {
            "p" => cfg.p = Some(parse_value(&key, value)?),
            "m" => cfg.m = Some(parse_value(&key, value)?),
            "q" => cfg.q = Some(parse_value(&key, value)?),
            "d" => cfg.d = Some(parse_value(&key, value)?),
            "n-samples" => cfg.n_samples = Some(parse_value(&key, value)?),
            "trials" => cfg.trials = Some(parse_value(&key, value)?),
            "seed" => cfg.seed = Some(parse_value(&key, value)?),
            "truncation" => cfg.truncation = Some(parse_value(&key, value)?),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "format" => {
                cfg.format = Some(Format::from_str(value, true).map_err(|_| format!("invalid format {value:?}"))?)
            }
            "oracle" => cfg.oracle = parse_bool(&key, value)?,
            "max-q" => cfg.max_q = Some(parse_value(&key, value)?),
            other => return Err(format!("line {}: unknown key {other}", n + 1)),
        }
    }
    Ok(cfg)
}

pub fn load_config_file(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

impl RunConfig {
    /// Overlay the flags on this configuration.
    pub fn with_flags(mut self, f: &Flags) -> RunConfig {
        macro_rules! over {
            ($($field:ident),*) => {
                $( if f.$field.is_some() { self.$field = f.$field.clone(); } )*
            };
        }
        over!(p, m, q, d, n_samples, trials, seed, truncation, out, format, max_q);
        self.oracle |= f.oracle;
        self
    }

    pub fn resolve(flags: &Flags) -> Result<RunConfig, String> {
        let base = match &flags.config {
            Some(path) => load_config_file(path)?,
            None => RunConfig::default(),
        };
        Ok(base.with_flags(flags))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}
