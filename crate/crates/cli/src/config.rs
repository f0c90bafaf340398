//! Flag/file configuration resolution: defaults, line-oriented `key=value`
//! config files, and validation. Flags override file values; file values
//! override defaults.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use marangoni_core::driver::SolveSettings;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(bad(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Shared flags of the `momentum`, `temperature` and `compare` subcommands.
#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// Line-oriented key=value configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Surface-temperature power-law exponent (k >= -1).
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Prandtl number.
    #[arg(long, allow_negative_numbers = true)]
    pub pr: Option<f64>,
    /// Temperature gradient coefficient; adds a theta = m*g output column.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Diagonal Padé order of this command's closure stage.
    #[arg(long = "pade-l")]
    pub pade_l: Option<usize>,
    /// Correction steps for both equations.
    #[arg(long)]
    pub iterations: Option<u32>,
    /// Far-field truncation point of the oracle.
    #[arg(long = "eta-max")]
    pub eta_max: Option<f64>,
    /// Oracle integration step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Number of profile samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Profile sample range LO:HI (within [0, eta-max]).
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Profile output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Profile format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Closure bracket LO:HI for this command's stage.
    #[arg(long, allow_hyphen_values = true)]
    pub bracket: Option<String>,
    /// Oracle shooting bracket LO:HI for this command's stage.
    #[arg(long = "shoot-bracket", allow_hyphen_values = true)]
    pub shoot_bracket: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Momentum,
    Temperature,
    Compare,
}

impl Stage {
    fn default_range(self) -> (f64, f64) {
        match self {
            Stage::Momentum => (0.0, 5.0),
            Stage::Temperature | Stage::Compare => (0.0, 4.0),
        }
    }

    fn default_basename(self) -> &'static str {
        match self {
            Stage::Momentum => "momentum",
            Stage::Temperature => "temperature",
            Stage::Compare => "compare",
        }
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct ResolvedRun {
    pub k: f64,
    pub pr: f64,
    /// Whether the Prandtl number was given explicitly (flag or file).
    pub pr_given: bool,
    pub m: Option<f64>,
    pub samples: usize,
    pub range: (f64, f64),
    pub out: PathBuf,
    pub format: OutputFormat,
    pub settings: SolveSettings,
}

const KNOWN_KEYS: &[&str] = &[
    "k",
    "pr",
    "m",
    "pade-l",
    "iterations",
    "eta-max",
    "step",
    "samples",
    "range",
    "out",
    "format",
    "bracket",
    "shoot-bracket",
    "dsigma-dt",
    "rho",
    "mu",
];

/// Parse a `key=value` file into a map with normalized keys.
pub fn load_file(path: &Path) -> Result<HashMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(format!(
                "config line {} is not key=value: {line:?}",
                index + 1
            )));
        };
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(bad(format!(
                "unknown config key {key:?} on line {}",
                index + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn file_value<T>(
    file: &HashMap<String, String>,
    key: &str,
    parse: impl Fn(&str) -> Result<T, ConfigError>,
) -> Result<Option<T>, ConfigError> {
    file.get(key).map(|raw| parse(raw)).transpose()
}

fn parse_num<T: FromStr>(key: &str) -> impl Fn(&str) -> Result<T, ConfigError> + '_
where
    T::Err: fmt::Display,
{
    move |raw| {
        raw.parse::<T>()
            .map_err(|e| bad(format!("config value {key}={raw:?}: {e}")))
    }
}

/// Parse `LO:HI` into an ordered pair.
pub fn parse_pair(raw: &str, what: &str) -> Result<(f64, f64), ConfigError> {
    let Some((lo, hi)) = raw.split_once(':') else {
        return Err(bad(format!("{what} must be LO:HI, got {raw:?}")));
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| bad(format!("{what} lower bound {lo:?}: {e}")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| bad(format!("{what} upper bound {hi:?}: {e}")))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad(format!("{what} must satisfy LO < HI, got {raw:?}")));
    }
    Ok((lo, hi))
}

/// Merge flags over file values over defaults and validate.
pub fn resolve(stage: Stage, args: &RunArgs) -> Result<ResolvedRun, ConfigError> {
    let file = match &args.config {
        Some(path) => load_file(path)?,
        None => HashMap::new(),
    };

    let k = args
        .k
        .or(file_value(&file, "k", parse_num("k"))?)
        .unwrap_or(0.0);
    let pr_file = file_value(&file, "pr", parse_num("pr"))?;
    let pr_given = args.pr.is_some() || pr_file.is_some();
    let pr = args.pr.or(pr_file).unwrap_or(5.0);
    let m = args.m.or(file_value(&file, "m", parse_num("m"))?);
    let pade_l = args
        .pade_l
        .or(file_value(&file, "pade-l", parse_num("pade-l"))?);
    let iterations = args
        .iterations
        .or(file_value(&file, "iterations", parse_num("iterations"))?);
    let eta_max = args
        .eta_max
        .or(file_value(&file, "eta-max", parse_num("eta-max"))?);
    let step = args.step.or(file_value(&file, "step", parse_num("step"))?);
    let samples = args
        .samples
        .or(file_value(&file, "samples", parse_num("samples"))?)
        .unwrap_or(101);
    let range = match args
        .range
        .as_deref()
        .or(file.get("range").map(String::as_str))
    {
        Some(raw) => Some(parse_pair(raw, "range")?),
        None => None,
    };
    let out = args.out.clone().or(file.get("out").map(PathBuf::from));
    let format = match args.format {
        Some(f) => f,
        None => match file.get("format") {
            Some(raw) => raw.parse()?,
            None => OutputFormat::Csv,
        },
    };
    let bracket = match args
        .bracket
        .as_deref()
        .or(file.get("bracket").map(String::as_str))
    {
        Some(raw) => Some(parse_pair(raw, "bracket")?),
        None => None,
    };
    let shoot_bracket = match args
        .shoot_bracket
        .as_deref()
        .or(file.get("shoot-bracket").map(String::as_str))
    {
        Some(raw) => Some(parse_pair(raw, "shoot-bracket")?),
        None => None,
    };

    let mut settings = SolveSettings::default();
    if let Some(n) = iterations {
        if n < 1 {
            return Err(bad("iterations must be at least 1"));
        }
        settings.iterations = n;
        settings.temperature_iterations = n;
    }
    if let Some(order) = pade_l {
        if order < 1 {
            return Err(bad("pade-l must be at least 1"));
        }
        match stage {
            Stage::Momentum | Stage::Compare => settings.pade_order_momentum = order,
            Stage::Temperature => settings.pade_order_temperature = order,
        }
    }
    if let Some(pair) = bracket {
        match stage {
            Stage::Momentum | Stage::Compare => settings.closure_bracket_momentum = pair,
            Stage::Temperature => settings.closure_bracket_temperature = pair,
        }
    }
    if let Some(pair) = shoot_bracket {
        match stage {
            Stage::Momentum | Stage::Compare => settings.shoot_bracket_momentum = pair,
            Stage::Temperature => settings.shoot_bracket_temperature = pair,
        }
    }
    if let Some(h) = step {
        if !(h.is_finite() && h > 0.0) {
            return Err(bad(format!("step must be positive, got {h}")));
        }
        settings.step = h;
    }
    if let Some(e) = eta_max {
        if !(e.is_finite() && e >= settings.step) {
            return Err(bad(format!("eta-max must be at least one step, got {e}")));
        }
        settings.eta_max = e;
    }

    if samples < 2 {
        return Err(bad(format!("samples must be at least 2, got {samples}")));
    }
    let range = range.unwrap_or_else(|| stage.default_range());
    if !(range.0 >= 0.0 && range.1 <= settings.eta_max) {
        return Err(bad(format!(
            "range {}:{} must lie within [0, eta-max = {}]",
            range.0, range.1, settings.eta_max
        )));
    }

    let out = out.unwrap_or_else(|| {
        PathBuf::from(format!(
            "{}.{}",
            stage.default_basename(),
            format.extension()
        ))
    });

    Ok(ResolvedRun {
        k,
        pr,
        pr_given,
        m,
        samples,
        range,
        out,
        format,
        settings,
    })
}
