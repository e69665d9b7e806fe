//! Experiment configuration from command-line flags and flat `key = value`
//! files. Flags override file values; the seed falls back to `RRTCUT_SEED`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::CliError;

pub const SEED_ENV: &str = "RRTCUT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Generate,
    CutTargeted,
    CutUniform,
    Records,
    Coupling,
    Moments,
    Tv,
    RootDegree,
    GammaTrend,
    OracleSmalln,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::CutTargeted => "cut-targeted",
            Command::CutUniform => "cut-uniform",
            Command::Records => "records",
            Command::Coupling => "coupling",
            Command::Moments => "moments",
            Command::Tv => "tv",
            Command::RootDegree => "root-degree",
            Command::GammaTrend => "gamma-trend",
            Command::OracleSmalln => "oracle-smalln",
        }
    }

    /// Commands that emit one row (or one row per `d`) per replicate.
    pub fn is_per_replicate(self) -> bool {
        matches!(
            self,
            Command::Generate | Command::CutTargeted | Command::CutUniform | Command::Records | Command::Coupling
        )
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        <Command as ValueEnum>::from_str(s, false)
            .map_err(|_| CliError::Usage(format!("command: unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub command: Command,
    pub n: Option<usize>,
    pub n_ladder: Option<Vec<usize>>,
    pub replicates: u64,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub d_values: Option<Vec<usize>>,
    pub k_values: Option<Vec<u32>>,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    #[serde(skip)]
    pub workers: usize,
}

impl ExperimentSpec {
    /// Sizes to run: the ladder when set, otherwise the single `n`.
    pub fn sizes(&self) -> Vec<usize> {
        match (&self.n_ladder, self.n) {
            (Some(l), _) => l.clone(),
            (None, Some(n)) => vec![n],
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Parser, Default)]
#[command(name = "rrtcut", version, about = "Random recursive tree cutting experiments")]
pub struct Args {
    /// Experiment to run (may also be set with `command = ...` in --config).
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Tree size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma separated tree sizes, e.g. 1000,10000.
    #[arg(long = "n-ladder")]
    pub n_ladder: Option<String>,
    /// Number of replicates.
    #[arg(long)]
    pub reps: Option<u64>,
    /// Master seed (falls back to RRTCUT_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Root degree window half-width, in (0, 1).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Comma separated degree thresholds.
    #[arg(long)]
    pub d: Option<String>,
    /// Comma separated moment orders.
    #[arg(long)]
    pub k: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 11] = [
    "command", "n", "n_ladder", "reps", "seed", "eps", "d", "k", "out", "format", "workers",
];

/// Raw values before validation; every field is the unparsed text.
#[derive(Debug, Default, Clone)]
struct Raw {
    command: Option<String>,
    n: Option<String>,
    n_ladder: Option<String>,
    reps: Option<String>,
    seed: Option<String>,
    eps: Option<String>,
    d: Option<String>,
    k: Option<String>,
    out: Option<String>,
    format: Option<String>,
    workers: Option<String>,
}

impl Raw {
    fn set(&mut self, key: &str, value: String) -> Result<(), CliError> {
        let slot = match key.replace('-', "_").as_str() {
            "command" => &mut self.command,
            "n" => &mut self.n,
            "n_ladder" => &mut self.n_ladder,
            "reps" | "replicates" => &mut self.reps,
            "seed" => &mut self.seed,
            "eps" | "epsilon" => &mut self.eps,
            "d" => &mut self.d,
            "k" => &mut self.k,
            "out" => &mut self.out,
            "format" => &mut self.format,
            "workers" => &mut self.workers,
            _ => {
                return Err(CliError::Usage(format!(
                    "{key}: unknown configuration key (expected one of {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        };
        *slot = Some(value);
        Ok(())
    }
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// ignored; list values may be written `[1000, 10000]` or `1000,10000`.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value, found {line:?}",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim().trim_matches('"');
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", lineno + 1)));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

/// Builds a spec from argv (including the program name).
pub fn parse_args<I, T>(argv: I, env_seed: Option<String>) -> Result<ExperimentSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let file = match &args.config {
        Some(path) => Some(read_config(path)?),
        None => None,
    };
    build_spec(&args, file.as_deref(), env_seed)
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config: cannot read {}: {e}", path.display())))
}

/// Merges flags over config-file text and validates the result.
pub fn build_spec(args: &Args, config: Option<&str>, env_seed: Option<String>) -> Result<ExperimentSpec, CliError> {
    let mut raw = Raw::default();
    if let Some(text) = config {
        for (k, v) in parse_config_file(text)? {
            raw.set(&k, v)?;
        }
    }
    if let Some(c) = args.command {
        raw.command = Some(c.as_str().to_string());
    }
    macro_rules! flag {
        ($field:ident) => {
            if let Some(v) = &args.$field {
                raw.$field = Some(v.to_string());
            }
        };
    }
    flag!(n);
    flag!(n_ladder);
    flag!(reps);
    flag!(seed);
    flag!(eps);
    flag!(d);
    flag!(k);
    flag!(workers);
    if let Some(p) = &args.out {
        raw.out = Some(p.display().to_string());
    }
    if let Some(f) = args.format {
        raw.format = Some(match f {
            OutputFormat::Csv => "csv".into(),
            OutputFormat::Json => "json".into(),
        });
    }
    if raw.seed.is_none() {
        raw.seed = env_seed;
    }
    validate(raw)
}

fn parse_scalar<T: FromStr>(field: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{field}: cannot parse {value:?}")))
}

fn parse_list<T: FromStr>(field: &str, value: &str) -> Result<Vec<T>, CliError> {
    let inner = value.trim().trim_start_matches('[').trim_end_matches(']');
    let items = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_scalar(field, s))
        .collect::<Result<Vec<T>, _>>()?;
    if items.is_empty() {
        return Err(CliError::Usage(format!("{field}: empty list")));
    }
    Ok(items)
}

fn validate(raw: Raw) -> Result<ExperimentSpec, CliError> {
    let command: Command = raw
        .command
        .as_deref()
        .ok_or_else(|| CliError::Usage("command: missing required field".into()))?
        .parse()?;
    let n = raw.n.as_deref().map(|v| parse_scalar::<usize>("n", v)).transpose()?;
    let n_ladder = raw
        .n_ladder
        .as_deref()
        .map(|v| parse_list::<usize>("n_ladder", v))
        .transpose()?;
    let epsilon = raw.eps.as_deref().map(|v| parse_scalar::<f64>("eps", v)).transpose()?;
    let d_values = raw.d.as_deref().map(|v| parse_list::<usize>("d", v)).transpose()?;
    let k_values = raw.k.as_deref().map(|v| parse_list::<u32>("k", v)).transpose()?;
    let workers = raw
        .workers
        .as_deref()
        .map(|v| parse_scalar::<usize>("workers", v))
        .transpose()?
        .unwrap_or(1);
    let output_format = match raw.format.as_deref() {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => return Err(CliError::Usage(format!("format: expected csv or json, got {other:?}"))),
    };

    if let Some(e) = epsilon {
        if !(e > 0.0 && e < 1.0) {
            return Err(CliError::Usage(format!("eps: {e} is outside (0, 1)")));
        }
    }
    if workers == 0 {
        return Err(CliError::Usage("workers: must be at least 1".into()));
    }
    match command {
        Command::GammaTrend => {
            if n_ladder.is_none() && n.is_none() {
                return Err(CliError::Usage("n_ladder: missing required field".into()));
            }
        }
        _ => {
            if n.is_none() {
                return Err(CliError::Usage("n: missing required field".into()));
            }
        }
    }
    if let Some(0) = n {
        return Err(CliError::Usage("n: must be at least 1".into()));
    }
    if command == Command::Coupling && epsilon.is_none() {
        return Err(CliError::Usage("eps: missing required field".into()));
    }
    let replicates = match (command, raw.reps.as_deref()) {
        (Command::OracleSmalln, None) => 0,
        (_, None) => return Err(CliError::Usage("reps: missing required field".into())),
        (_, Some(v)) => parse_scalar::<u64>("reps", v)?,
    };
    if replicates == 0 && command != Command::OracleSmalln {
        return Err(CliError::Usage("reps: must be at least 1".into()));
    }
    let seed = match (command, raw.seed.as_deref()) {
        (Command::OracleSmalln, None) => 0,
        (_, None) => {
            return Err(CliError::Usage(format!(
                "seed: missing required field (pass --seed or set {SEED_ENV})"
            )))
        }
        (_, Some(v)) => parse_scalar::<u64>("seed", v)?,
    };

    Ok(ExperimentSpec {
        command,
        n,
        n_ladder,
        replicates,
        seed,
        epsilon,
        d_values,
        k_values,
        output_path: raw.out.map(PathBuf::from),
        output_format,
        workers,
    })
}
