//! Library side of the `qpl` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::Parser;
use serde_json::{json, Value};

use qpl_core::diagrams::enumerate_level;
use qpl_core::dynamics::limit_moments;
use qpl_core::growth::mc_limit_experiment;
use qpl_core::limitshape::{admissible_x_min, classical_r, series_h_omega, solve_r_omega};
use qpl_core::moments::p_to_h;
use qpl_core::qmeasure::{decimal_rational, q_measure};
use qpl_core::rsk::{pushforward_exact, pushforward_rational, MAX_PUSHFORWARD_N};
use qpl_core::{Partition, QParam};

pub use config::{parse_config_text, Command, Format, PartialConfig, RunConfig};
pub use error::CliError;

use output::{fmt_f64, json_f64, json_f64s, CsvDoc, JsonDoc};
use verify::SuiteParams;

/// Environment variable capping every enumerated level.
pub const MAX_N_ENV: &str = "QPL_MAX_N";

/// Default enumeration cap when the environment does not set one.
pub const DEFAULT_MAX_LEVEL: usize = qpl_core::diagrams::DEFAULT_MAX_DIM_N;

#[derive(Debug, Parser)]
#[command(name = "qpl", version, about = "q-deformed Plancherel growth: verification and experiments")]
pub struct Args {
    /// Command to run; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Level (verify, pushforward), trajectory length (simulate) or grid size (limit-shape).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Number of moments.
    #[arg(long)]
    pub moments: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Config file: `key=value` lines or a previous output of this tool.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides every verify tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl Args {
    fn flags(&self) -> PartialConfig {
        PartialConfig {
            command: self.command,
            q: self.q,
            n: self.n,
            trials: self.trials,
            moments: self.moments,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
            tolerance: self.tolerance,
        }
    }

    /// Merges the config file (if any) with the flags; flags win.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_config_text(&text)?
            }
            None => PartialConfig::default(),
        };
        file.merged_with(self.flags()).resolve()
    }
}

/// Resource limits taken from the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_level: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_level: DEFAULT_MAX_LEVEL,
        }
    }
}

impl Limits {
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var(MAX_N_ENV) {
            Ok(v) => {
                let max_level = v.trim().parse().map_err(|_| {
                    CliError::Config(format!("{MAX_N_ENV}={v} is not a non-negative integer"))
                })?;
                Ok(Limits { max_level })
            }
            Err(std::env::VarError::NotPresent) => Ok(Limits::default()),
            Err(e) => Err(CliError::Config(format!("{MAX_N_ENV}: {e}"))),
        }
    }
}

/// Rendered output plus the first failing check, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub text: String,
    pub failure: Option<String>,
}

pub fn execute(cfg: &RunConfig, limits: Limits) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Verify => run_verify(cfg, limits),
        Command::Simulate => run_simulate(cfg).map(ok),
        Command::LimitShape => run_limit_shape(cfg).map(ok),
        Command::Pushforward => run_pushforward(cfg, limits).map(ok),
    }
}

fn ok(text: String) -> RunOutput {
    RunOutput { text, failure: None }
}

/// Writes to `cfg.out`, or to standard output when unset.
pub fn write_output(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn qparam(v: f64) -> Result<QParam, CliError> {
    QParam::new(v).map_err(|e| CliError::Config(e.to_string()))
}

fn check_level(n: usize, limits: Limits) -> Result<(), CliError> {
    if n > limits.max_level {
        return Err(CliError::Capacity(format!(
            "n = {n} exceeds {MAX_N_ENV} = {}",
            limits.max_level
        )));
    }
    Ok(())
}

fn shape_cell(p: &Partition) -> String {
    p.parts()
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_verify(cfg: &RunConfig, limits: Limits) -> Result<RunOutput, CliError> {
    check_level(cfg.n, limits)?;
    let params = SuiteParams {
        q: cfg.q,
        n: cfg.n,
        max_level: limits.max_level,
        seed: cfg.seed,
        tolerance: cfg.tolerance,
    };
    let results = verify::run_all(&params);
    let failure = results.iter().find(|r| !r.passed()).map(|r| match &r.error {
        Some(e) => format!("suite {} errored: {e}", r.name),
        None => format!(
            "suite {}: {} exceeds tolerance {}",
            r.name,
            fmt_f64(r.metric),
            fmt_f64(r.tolerance)
        ),
    });
    let status = |passed: bool| if passed { "pass" } else { "fail" };
    let text = match cfg.format {
        Format::Csv => {
            let mut doc = CsvDoc::new(cfg);
            doc.table("suites", &["suite", "status", "metric", "tolerance", "detail"]);
            for r in &results {
                doc.row(&[
                    r.name.to_string(),
                    status(r.passed()).to_string(),
                    fmt_f64(r.metric),
                    fmt_f64(r.tolerance),
                    r.error.clone().unwrap_or_else(|| r.detail.clone()).replace(',', ";"),
                ]);
            }
            doc.finish()
        }
        Format::Json => {
            let mut doc = JsonDoc::new(cfg);
            let suites: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "suite": r.name,
                        "status": status(r.passed()),
                        "metric": json_f64(r.metric),
                        "tolerance": json_f64(r.tolerance),
                        "detail": r.detail,
                        "error": r.error,
                    })
                })
                .collect();
            doc.insert("suites", Value::Array(suites));
            doc.insert("passed", Value::Bool(failure.is_none()));
            doc.finish()
        }
    };
    Ok(RunOutput { text, failure })
}

fn run_simulate(cfg: &RunConfig) -> Result<String, CliError> {
    let report = mc_limit_experiment(cfg.n, qparam(cfg.q)?, cfg.trials, cfg.moments, cfg.seed)?;
    let z = report.z_scores();
    Ok(match cfg.format {
        Format::Csv => {
            let mut doc = CsvDoc::new(cfg);
            doc.table("parameters", &["q_kernel", "scale"]);
            doc.row(&[fmt_f64(report.q_kernel), fmt_f64(1.0 / (cfg.n as f64).sqrt())]);
            doc.table("summary", &["moment", "mean", "stderr", "target", "z"]);
            for (k, zk) in z.iter().enumerate().take(cfg.moments) {
                doc.row(&[
                    (k + 1).to_string(),
                    fmt_f64(report.mean[k]),
                    fmt_f64(report.stderr[k]),
                    fmt_f64(report.targets[k]),
                    fmt_f64(*zk),
                ]);
            }
            let mut columns = vec!["stream".to_string(), "shape".to_string()];
            columns.extend((1..=cfg.moments).map(|k| format!("p_{k}")));
            let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
            doc.table("trajectories", &columns);
            for (i, (shape, m)) in report.shapes.iter().zip(&report.moments).enumerate() {
                let mut row = vec![i.to_string(), shape_cell(shape)];
                row.extend(m.iter().map(|&v| fmt_f64(v)));
                doc.row(&row);
            }
            doc.finish()
        }
        Format::Json => {
            let mut doc = JsonDoc::new(cfg);
            doc.insert("n", Value::from(cfg.n));
            doc.insert("q", json_f64(cfg.q));
            doc.insert("q_kernel", json_f64(report.q_kernel));
            doc.insert("seed", Value::from(cfg.seed));
            doc.insert("trials", Value::from(cfg.trials));
            doc.insert("moments", json_f64s(&report.mean));
            doc.insert("stderr", json_f64s(&report.stderr));
            doc.insert("targets", json_f64s(&report.targets));
            doc.insert("z", json_f64s(&z));
            let trajectories: Vec<Value> = report
                .shapes
                .iter()
                .zip(&report.moments)
                .enumerate()
                .map(|(i, (shape, m))| {
                    json!({ "stream": i, "shape": shape.parts(), "moments": json_f64s(m) })
                })
                .collect();
            doc.insert("trajectories", Value::Array(trajectories));
            doc.finish()
        }
    })
}

/// Grid of `points` values of `x` from just above the admissible minimum.
fn x_grid(q: QParam, points: usize) -> Vec<f64> {
    let start = admissible_x_min(q) + 0.05;
    let span = 10.0;
    if points == 1 {
        return vec![start];
    }
    (0..points)
        .map(|j| start + span * j as f64 / (points - 1) as f64)
        .collect()
}

fn run_limit_shape(cfg: &RunConfig) -> Result<String, CliError> {
    let q = qparam(cfg.q)?;
    let xs = x_grid(q, cfg.n);
    let mut rs = Vec::with_capacity(xs.len());
    for &x in &xs {
        rs.push(solve_r_omega(x, q)?);
    }
    let classical: Vec<f64> = xs.iter().map(|&x| classical_r(x).unwrap_or(f64::NAN)).collect();
    let p = limit_moments(q, cfg.moments)?;
    let h_series = series_h_omega(q, cfg.moments)?;
    let h_from_p = p_to_h(&p)?;
    Ok(match cfg.format {
        Format::Csv => {
            let mut doc = CsvDoc::new(cfg);
            doc.table("r_function", &["x", "r", "r_classical"]);
            for ((&x, &r), &c) in xs.iter().zip(&rs).zip(&classical) {
                doc.row(&[fmt_f64(x), fmt_f64(r), fmt_f64(c)]);
            }
            doc.table("moments", &["n", "p_check", "h_check", "h_from_p"]);
            for k in 1..=cfg.moments {
                doc.row(&[
                    k.to_string(),
                    fmt_f64(p.get(k)),
                    fmt_f64(h_series.get(k)),
                    fmt_f64(h_from_p.get(k)),
                ]);
            }
            doc.finish()
        }
        Format::Json => {
            let mut doc = JsonDoc::new(cfg);
            doc.insert("q", json_f64(cfg.q));
            doc.insert("x", json_f64s(&xs));
            doc.insert("r", json_f64s(&rs));
            doc.insert("r_classical", json_f64s(&classical));
            doc.insert("p_check", json_f64s(p.values()));
            doc.insert("h_check", json_f64s(h_series.values()));
            doc.insert("h_from_p", json_f64s(h_from_p.values()));
            doc.finish()
        }
    })
}

fn run_pushforward(cfg: &RunConfig, limits: Limits) -> Result<String, CliError> {
    if cfg.n > MAX_PUSHFORWARD_N {
        return Err(CliError::Capacity(format!(
            "pushforward enumerates S(n) for n <= {MAX_PUSHFORWARD_N}, got n = {}",
            cfg.n
        )));
    }
    check_level(cfg.n, limits)?;
    let q = qparam(cfg.q)?;
    let law = pushforward_exact(cfg.n, q)?;
    let exact = pushforward_rational(cfg.n, &decimal_rational(cfg.q))?;
    let levels = enumerate_level(cfg.n)?;
    let mut rows = Vec::with_capacity(levels.len());
    for lam in &levels {
        rows.push((
            lam,
            law.get(lam).copied().unwrap_or(0.0),
            q_measure(lam, q)?,
            exact.get(lam).map(|r| r.to_string()).unwrap_or_else(|| "0".into()),
        ));
    }
    Ok(match cfg.format {
        Format::Csv => {
            let mut doc = CsvDoc::new(cfg);
            doc.table("distribution", &["shape", "pushforward", "q_measure", "exact"]);
            for (lam, p, m, e) in &rows {
                doc.row(&[shape_cell(lam), fmt_f64(*p), fmt_f64(*m), e.clone()]);
            }
            doc.finish()
        }
        Format::Json => {
            let mut doc = JsonDoc::new(cfg);
            doc.insert("n", Value::from(cfg.n));
            doc.insert("q", json_f64(cfg.q));
            let dist: Vec<Value> = rows
                .iter()
                .map(|(lam, p, m, e)| {
                    json!({
                        "shape": lam.parts(),
                        "pushforward": json_f64(*p),
                        "q_measure": json_f64(*m),
                        "exact": e,
                    })
                })
                .collect();
            doc.insert("distribution", Value::Array(dist));
            doc.finish()
        }
    })
}
