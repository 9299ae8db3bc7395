//! Command-line surface: ingestion, run configuration, execution of every
//! plan and the comparison report.

mod config;
mod ingest;
mod render;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{fit_pipeline, FitPlan};
use crate::response::EvaluationReport;
use crate::series::RawSeries;

pub use config::{ConfigFile, InitialSpec, LambdaKeyword, LambdaSpec, ParamsSpec, PlanSpec};
pub use ingest::{ingest, ingest_labeled, parse_series, Ingested};
pub use render::{csv_rows, read_csv, render_table, write_csv, CsvRow};

/// Default number of decimals for predictions and errors.
pub const DEFAULT_PRECISION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Table => "table",
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPlan {
    pub name: String,
    pub plan: FitPlan,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    /// Points used for fitting; defaults to every observation not reserved
    /// for the horizon.
    pub fit_len: Option<usize>,
    pub horizon: usize,
    pub plans: Vec<NamedPlan>,
    pub output_format: OutputFormat,
    /// Time-axis labels; defaults to the labels in the input file, if any.
    pub labels: Option<Vec<String>>,
    pub precision: usize,
    /// Destination for the report; standard output when absent.
    pub output_path: Option<PathBuf>,
}

/// Command-line overrides layered over an optional configuration file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub input: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub fit_len: Option<usize>,
    pub horizon: Option<usize>,
    pub format: Option<OutputFormat>,
    pub precision: Option<usize>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Merge options over the configuration file. Without a file or plans a
    /// single classic GM(1,1) plan is run.
    pub fn from_options(opts: RunOptions) -> Result<Self> {
        let file = match &opts.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::parse("")?,
        };
        let input_path = opts
            .input
            .or(file.input.clone())
            .ok_or_else(|| Error::Config("no input series given".into()))?;
        let mut plans = file.named_plans()?;
        if plans.is_empty() {
            plans.push(NamedPlan {
                name: "GM(1,1)".into(),
                plan: FitPlan::classic(),
            });
        }
        Ok(Self {
            input_path,
            fit_len: opts.fit_len.or(file.fit_len),
            horizon: opts.horizon.or(file.horizon).unwrap_or(0),
            plans,
            output_format: opts.format.or(file.format).unwrap_or_default(),
            labels: file.labels,
            precision: opts
                .precision
                .or(file.precision)
                .unwrap_or(DEFAULT_PRECISION),
            output_path: opts.output,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub name: String,
    pub plan: FitPlan,
    pub achieved_objective: f64,
    pub converged: bool,
    pub report: EvaluationReport,
}

/// One report per plan over the same series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub fit_len: usize,
    pub horizon: usize,
    pub labels: Option<Vec<String>>,
    pub plans: Vec<PlanReport>,
}

impl ComparisonReport {
    /// Label of time index `t` (1-based).
    pub fn label(&self, t: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(t - 1).cloned())
            .unwrap_or_else(|| t.to_string())
    }
}

/// Run every plan on the series described by `config`.
pub fn execute(config: &RunConfig) -> Result<ComparisonReport> {
    if config.plans.is_empty() {
        return Err(Error::Config("at least one plan is required".into()));
    }
    let data = ingest_labeled(&config.input_path)?;
    let len = data.values.len();
    let fit_len = match config.fit_len {
        Some(n) => n,
        None => len.checked_sub(config.horizon).ok_or_else(|| {
            Error::Config(format!(
                "horizon {} exceeds the {len} observations",
                config.horizon
            ))
        })?,
    };
    if fit_len + config.horizon > len {
        return Err(Error::Config(format!(
            "fit length {fit_len} plus horizon {} exceeds the {len} observations",
            config.horizon
        )));
    }
    let labels = config.labels.clone().or(data.labels);
    if let Some(l) = &labels {
        if l.len() < fit_len + config.horizon {
            return Err(Error::Config(format!(
                "{} labels for {} reported points",
                l.len(),
                fit_len + config.horizon
            )));
        }
    }
    let raw = RawSeries::with_fit_len(data.values, fit_len)?;

    let results: Vec<Result<PlanReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = config
            .plans
            .iter()
            .map(|named| {
                let raw = &raw;
                s.spawn(move || {
                    let (fit, report) = fit_pipeline(raw, &named.plan, config.horizon)?;
                    Ok(PlanReport {
                        name: named.name.clone(),
                        plan: named.plan,
                        achieved_objective: fit.achieved_objective,
                        converged: fit.converged,
                        report,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("plan worker panicked"))
            .collect()
    });

    let mut plans = Vec::with_capacity(results.len());
    for (named, result) in config.plans.iter().zip(results) {
        let report = result.map_err(|e| Error::InPlan {
            plan: named.name.clone(),
            source: Box::new(e),
        })?;
        if !report.converged {
            log::warn!("plan {:?}: parameter search did not converge", report.name);
        }
        plans.push(report);
    }
    Ok(ComparisonReport {
        fit_len,
        horizon: config.horizon,
        labels,
        plans,
    })
}

/// Serialise `report` in `format`.
pub fn emit(
    report: &ComparisonReport,
    format: OutputFormat,
    precision: usize,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        OutputFormat::Table => out.write_all(render_table(report, precision).as_bytes())?,
        OutputFormat::Csv => write_csv(&csv_rows(report), out)?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn run_inner(config: &RunConfig) -> Result<()> {
    let report = execute(config)?;
    match &config.output_path {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            emit(&report, config.output_format, config.precision, &mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit(&report, config.output_format, config.precision, &mut lock)?;
        }
    }
    Ok(())
}

/// Execute and emit; diagnostics go to standard error. Returns the process
/// exit code: 0 success, 2 input, 3 fitting, 4 evaluation.
pub fn run(config: &RunConfig) -> i32 {
    match run_inner(config) {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e);
            e.exit_code()
        }
    }
}

/// Print a diagnostic to standard error; stage and plan labels are part of
/// the error's message.
pub fn report_error(e: &Error) {
    eprintln!("error: {e}");
}
