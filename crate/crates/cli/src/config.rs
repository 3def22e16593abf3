//! Run configuration: a flat `key=value` file merged with command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::CliError;

/// Largest moment order accepted on the command line.
pub const MAX_MOMENTS: usize = 12;

/// Largest trial count accepted on the command line.
pub const MAX_TRIALS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Verify,
    Simulate,
    LimitShape,
    Pushforward,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Simulate => "simulate",
            Command::LimitShape => "limit-shape",
            Command::Pushforward => "pushforward",
        }
    }

    fn default_n(self) -> usize {
        match self {
            Command::Verify => 20,
            Command::Simulate => 1000,
            Command::LimitShape => 40,
            Command::Pushforward => 6,
        }
    }

    fn default_moments(self) -> usize {
        match self {
            Command::LimitShape => 6,
            _ => 3,
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        <Command as ValueEnum>::from_str(s, false)
            .map_err(|_| CliError::Config(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub q: f64,
    /// Level, trajectory length or grid size, depending on the command.
    pub n: usize,
    pub trials: usize,
    pub moments: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Replaces every suite tolerance of `verify` when set.
    pub tolerance: Option<f64>,
}

/// Configuration with every field optional, as read from a file or flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub q: Option<f64>,
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub moments: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

impl PartialConfig {
    /// Sets one key; unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key.trim() {
            "command" => self.command = Some(Command::parse(value)?),
            "q" => self.q = Some(parse_value(key, value)?),
            "n" => self.n = Some(parse_value(key, value)?),
            "trials" => self.trials = Some(parse_value(key, value)?),
            "moments" => self.moments = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "format" => {
                self.format = Some(
                    <Format as ValueEnum>::from_str(value, false)
                        .map_err(|_| CliError::Config(format!("unknown format `{value}`")))?,
                )
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "tolerance" => self.tolerance = Some(parse_value(key, value)?),
            other => return Err(CliError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Fields set in `over` win.
    pub fn merged_with(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            command: over.command.or(self.command),
            q: over.q.or(self.q),
            n: over.n.or(self.n),
            trials: over.trials.or(self.trials),
            moments: over.moments.or(self.moments),
            seed: over.seed.or(self.seed),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            tolerance: over.tolerance.or(self.tolerance),
        }
    }

    /// Fills defaults and checks ranges.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        let cfg = RunConfig {
            command,
            q: self.q.unwrap_or(0.5),
            n: self.n.unwrap_or(command.default_n()),
            trials: self.trials.unwrap_or(100),
            moments: self.moments.unwrap_or(command.default_moments()),
            seed: self.seed.unwrap_or(0),
            format: self.format.unwrap_or_default(),
            out: self.out,
            tolerance: self.tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses a config file. Accepts plain `key=value` lines (`#` starts a
/// comment), the `#cfg key=value` header of a previous CSV output, or the
/// `config` object of a previous JSON output.
pub fn parse_config_text(text: &str) -> Result<PartialConfig, CliError> {
    let mut cfg = PartialConfig::default();
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(trimmed)
            .map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
        let obj = value
            .get("config")
            .unwrap_or(&value)
            .as_object()
            .ok_or_else(|| CliError::Config("JSON config must be an object".into()))?;
        for (key, v) in obj {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Null => continue,
                other => other.to_string(),
            };
            cfg.set(key, &text)?;
        }
        return Ok(cfg);
    }
    let header: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("#cfg "))
        .collect();
    let lines: Vec<&str> = if header.is_empty() {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect()
    } else {
        header
    };
    for line in lines {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value, found `{line}`")))?;
        cfg.set(key, value)?;
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(CliError::Config(format!("q = {} is outside (0, 1]", self.q)));
        }
        if matches!(self.command, Command::Simulate | Command::LimitShape) && self.q == 1.0 {
            return Err(CliError::Config(format!(
                "{} needs q < 1",
                self.command.as_str()
            )));
        }
        if self.n == 0 {
            return Err(CliError::Config("n must be positive".into()));
        }
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return Err(CliError::Config(format!(
                "trials = {} is outside 1..={MAX_TRIALS}",
                self.trials
            )));
        }
        if self.moments == 0 || self.moments > MAX_MOMENTS {
            return Err(CliError::Config(format!(
                "moments = {} is outside 1..={MAX_MOMENTS}",
                self.moments
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("tolerance = {t} must be positive")));
            }
        }
        Ok(())
    }

    /// `key=value` pairs in a fixed order; `out` only when `with_out`.
    pub fn pairs(&self, with_out: bool) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("command", self.command.as_str().to_string()),
            ("q", self.q.to_string()),
            ("n", self.n.to_string()),
            ("trials", self.trials.to_string()),
            ("moments", self.moments.to_string()),
            ("seed", self.seed.to_string()),
            ("format", self.format.as_str().to_string()),
        ];
        if let Some(t) = self.tolerance {
            v.push(("tolerance", t.to_string()));
        }
        if with_out {
            if let Some(p) = &self.out {
                v.push(("out", p.display().to_string()));
            }
        }
        v
    }
}

impl fmt::Display for RunConfig {
    /// The config file form, including `out`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.pairs(true) {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
