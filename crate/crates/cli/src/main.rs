//! Command-line front end: flag parsing, config-file merging, and
//! dispatch to the four commands. Flags override config-file entries,
//! which override defaults. Failures print `{"error": {...}}` to
//! stderr and exit 2 (configuration), 3 (data), or 4 (internal).

mod commands;
mod config;
mod error;
mod ingest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{MethodConfig, RunConfig, WindowGridConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "option-forecast",
    version,
    about = "Forecast the next value of a positive time series under asymmetric costs"
)]
struct Cli {
    /// JSON config file; flags override its entries
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic geometric-Brownian-motion series as CSV
    Simulate(SimulateArgs),
    /// Predict the next value from the series tail
    Predict(PredictArgs),
    /// Run a walk-forward backtest with validated window selection
    Backtest(BacktestArgs),
    /// Score methods side by side across cost ratios
    Compare(CompareArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV with a header row
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column holding the series values
    #[arg(long)]
    value_column: Option<String>,
    /// Time units per step
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Added to every value before modeling, removed from predictions
    #[arg(long, allow_negative_numbers = true)]
    epsilon_shift: Option<f64>,
}

impl InputArgs {
    fn apply(self, config: &mut RunConfig) {
        if let Some(v) = self.input {
            config.input_path = Some(v);
        }
        if let Some(v) = self.value_column {
            config.value_column = v;
        }
        if let Some(v) = self.dt {
            config.dt = v;
        }
        if let Some(v) = self.epsilon_shift {
            config.epsilon_shift = v;
        }
    }
}

#[derive(Args)]
struct WeightArgs {
    /// Cost ratio p_under / p_over; implies p_over = 1
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Penalty per unit of overestimation
    #[arg(long, allow_negative_numbers = true)]
    p_over: Option<f64>,
    /// Penalty per unit of underestimation
    #[arg(long, allow_negative_numbers = true)]
    p_under: Option<f64>,
}

impl WeightArgs {
    fn apply(self, config: &mut RunConfig) {
        if let Some(v) = self.omega {
            config.omega = Some(v);
        }
        if let Some(v) = self.p_over {
            config.p_over = v;
        }
        if let Some(v) = self.p_under {
            config.p_under = v;
        }
    }
}

#[derive(Args)]
struct SplitArgs {
    /// Fraction of the series used for training
    #[arg(long, allow_negative_numbers = true)]
    train_frac: Option<f64>,
    /// Fraction used for window selection
    #[arg(long, allow_negative_numbers = true)]
    valid_frac: Option<f64>,
    /// Fraction used for reported metrics
    #[arg(long, allow_negative_numbers = true)]
    test_frac: Option<f64>,
}

impl SplitArgs {
    fn apply(self, config: &mut RunConfig) {
        if let Some(v) = self.train_frac {
            config.train_frac = v;
        }
        if let Some(v) = self.valid_frac {
            config.valid_frac = v;
        }
        if let Some(v) = self.test_frac {
            config.test_frac = v;
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Starting level
    #[arg(long, allow_negative_numbers = true)]
    s0: Option<f64>,
    /// Drift per unit time
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Volatility per unit time
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Number of steps (the series has steps + 1 rows)
    #[arg(long)]
    steps: Option<usize>,
    /// Time units per step
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Generator seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    weights: WeightArgs,
    /// Estimation window (number of observations)
    #[arg(long)]
    window: Option<usize>,
    /// option or persistence
    #[arg(long)]
    method: Option<String>,
    /// Output JSON path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BacktestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    split: SplitArgs,
    /// option, persistence, or external
    #[arg(long)]
    method: Option<String>,
    /// 'auto' or a comma-separated candidate list
    #[arg(long)]
    window_grid: Option<String>,
    /// CSV of aligned (mean, sd) forecasts for the external method
    #[arg(long)]
    external: Option<PathBuf>,
    /// Output JSON path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-step CSV path; defaults next to --output
    #[arg(long)]
    steps_path: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    split: SplitArgs,
    /// Comma-separated cost ratios to sweep
    #[arg(long)]
    omegas: Option<String>,
    /// 'auto' or a comma-separated candidate list
    #[arg(long)]
    window_grid: Option<String>,
    /// CSV of aligned (mean, sd) forecasts; adds the external method
    #[arg(long)]
    external: Option<PathBuf>,
    /// Output JSON path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_omegas(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                CliError::Config(format!(
                    "omegas must be a comma-separated list of numbers, got '{raw}'"
                ))
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = RunConfig::load(cli.config.as_ref())?;

    match cli.command {
        Command::Simulate(args) => {
            if let Some(v) = args.s0 {
                config.sim_s0 = v;
            }
            if let Some(v) = args.mu {
                config.sim_mu = v;
            }
            if let Some(v) = args.sigma {
                config.sim_sigma = v;
            }
            if let Some(v) = args.steps {
                config.sim_steps = v;
            }
            if let Some(v) = args.dt {
                config.dt = v;
            }
            if let Some(v) = args.seed {
                config.seed = v;
            }
            if let Some(v) = args.output {
                config.output_path = Some(v);
            }
            commands::cmd_simulate(config)
        }
        Command::Predict(args) => {
            args.input.apply(&mut config);
            args.weights.apply(&mut config);
            if let Some(v) = args.window {
                config.window = Some(v);
            }
            if let Some(raw) = args.method {
                config.method = MethodConfig::parse_flag(&raw)?;
            }
            if let Some(v) = args.output {
                config.output_path = Some(v);
            }
            commands::cmd_predict(config)
        }
        Command::Backtest(args) => {
            args.input.apply(&mut config);
            args.weights.apply(&mut config);
            args.split.apply(&mut config);
            if let Some(raw) = args.method {
                config.method = MethodConfig::parse_flag(&raw)?;
            }
            if let Some(raw) = args.window_grid {
                config.window_grid = WindowGridConfig::parse_flag(&raw)?;
            }
            if let Some(v) = args.external {
                config.external_path = Some(v);
            }
            if let Some(v) = args.output {
                config.output_path = Some(v);
            }
            if let Some(v) = args.steps_path {
                config.steps_path = Some(v);
            }
            commands::cmd_backtest(config)
        }
        Command::Compare(args) => {
            args.input.apply(&mut config);
            args.split.apply(&mut config);
            if let Some(raw) = args.omegas {
                config.omegas = parse_omegas(&raw)?;
            }
            if let Some(raw) = args.window_grid {
                config.window_grid = WindowGridConfig::parse_flag(&raw)?;
            }
            if let Some(v) = args.external {
                config.external_path = Some(v);
            }
            if let Some(v) = args.output {
                config.output_path = Some(v);
            }
            commands::cmd_compare(config)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp
                    | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
