use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use netpeak::config::{ConfigError, OutputFormat, RunConfig};
use netpeak::report::{self, compare, render_details, SweepSeries};
use netpeak::ModelError;

#[derive(Parser)]
#[command(name = "netpeak", version, about = "Peak-dimensioned network power and energy for usage scenarios")]
struct Cli {
    /// TOML (or .json) file merged onto the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Add the traffic-proportional energy term.
    #[arg(long, global = true, value_enum)]
    dynamic_power: Option<Switch>,
    /// Print equipment counts behind each report.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate scenarios (all of them when none is named).
    Run {
        #[arg(long = "scenario", short)]
        scenarios: Vec<String>,
    },
    /// Segment by segment difference, B minus A.
    Compare { a: String, b: String },
    /// Evaluate a scenario over a list of values of one parameter.
    Sweep {
        #[arg(long, short)]
        scenario: String,
        #[arg(long, short)]
        parameter: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Serve the JSON evaluation API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
    /// Print the resolved configuration as TOML.
    Defaults,
}

// Exit statuses beyond clap's own 2 for usage errors.
const EXIT_CONFIG: u8 = 3;
const EXIT_MODEL: u8 = 4;

fn load(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::defaults(),
    };
    if let Some(f) = cli.format {
        config.output.format = match f {
            Format::Table => OutputFormat::Table,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(s) = cli.dynamic_power {
        config.model.dynamic.enabled = matches!(s, Switch::On);
    }
    config.output.verbose |= cli.verbose;
    Ok(config)
}

fn run(cli: &Cli, config: &RunConfig) -> anyhow::Result<String> {
    let model = &config.model;
    let json = config.output.format == OutputFormat::Json;
    match &cli.command {
        Command::Run { scenarios } => {
            let mut names: Vec<String> = if scenarios.is_empty() {
                config.scenario_names()
            } else {
                scenarios.clone()
            };
            if !names.contains(&config.baseline) {
                names.insert(0, config.baseline.clone());
            }
            let reports = names
                .iter()
                .map(|n| Ok(model.evaluate(config.scenario(n)?)?))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let mut out = report::render(&reports, &config.baseline, config.output.format)?;
            if config.output.verbose && !json {
                for r in &reports {
                    out.push('\n');
                    out.push_str(&render_details(r));
                }
            }
            Ok(out)
        }
        Command::Compare { a, b } => {
            let ra = model.evaluate(config.scenario(a)?)?;
            let rb = model.evaluate(config.scenario(b)?)?;
            let delta = compare(ra, rb);
            Ok(if json { delta.to_json() } else { delta.render_table() })
        }
        Command::Sweep {
            scenario,
            parameter,
            values,
        } => {
            let template = config.scenario(scenario)?;
            let base = model.evaluate(config.baseline_scenario())?;
            let reports = model.sweep(template, parameter, values, &base)?;
            let series = SweepSeries::new(scenario, parameter, values, &reports);
            Ok(if json { series.to_json() } else { series.render_table() })
        }
        Command::Defaults => Ok(config.to_toml()),
        Command::Serve { bind } => {
            let runtime = tokio::runtime::Runtime::new().context("starting the async runtime")?;
            runtime
                .block_on(netpeak::server::serve(config.clone(), bind))
                .with_context(|| format!("serving on {bind}"))?;
            Ok(String::new())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<ModelError>() {
        Some(ModelError::Validation(_)) | Some(ModelError::UnknownParameter { .. }) => EXIT_CONFIG,
        Some(_) => EXIT_MODEL,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cli, &config) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
