use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use greypower::cli::{report_error, run, OutputFormat, RunConfig, RunOptions};

/// Fit grey power models to a short series and compare their forecasts.
#[derive(Debug, Parser)]
#[command(name = "greypower", version)]
struct Args {
    /// Series file: one value per line, or `label,value` records.
    #[arg(short, long)]
    input: Option<PathBuf>,

    /// TOML file with run settings and one `[[plan]]` per model.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Number of leading points used for fitting.
    #[arg(short = 'n', long)]
    fit_len: Option<usize>,

    /// Points after the fit window to forecast and score.
    #[arg(short = 'H', long)]
    horizon: Option<usize>,

    /// Output format: table, csv or json.
    #[arg(short, long)]
    format: Option<OutputFormat>,

    /// Decimals for predictions and errors in the table.
    #[arg(short, long)]
    precision: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    let opts = RunOptions {
        input: args.input,
        config: args.config,
        fit_len: args.fit_len,
        horizon: args.horizon,
        format: args.format,
        precision: args.precision,
        output: args.output,
    };
    let code = match RunConfig::from_options(opts) {
        Ok(config) => run(&config),
        Err(e) => {
            report_error(&e);
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
