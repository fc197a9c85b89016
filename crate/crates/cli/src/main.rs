use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oqs_cli::{
    default_config_text, init_workers, resolve_config, CliError, Overrides, RunSummary,
};

/// Driven open-qubit simulator: Redfield vs completely positive dynamics.
#[derive(Parser)]
#[command(name = "oqs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct OverrideArgs {
    /// Scenario: fig1_scan | timeseries | sweep | tabulate_bath | snapshot_generators
    #[arg(long)]
    scenario: Option<String>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long = "out")]
    out: Option<String>,
    /// Trajectory horizon in units of 1/Δ
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Sampling step in units of 1/Δ
    #[arg(long)]
    dt: Option<f64>,
    /// Grid side for fig1_scan
    #[arg(long = "n-points")]
    n_points: Option<usize>,
    /// Random states per sweep cell
    #[arg(long = "n-states")]
    n_states: Option<usize>,
}

impl OverrideArgs {
    fn into_overrides(self) -> Overrides {
        Overrides {
            scenario: self.scenario,
            seed: self.seed,
            output_dir: self.out,
            t_max: self.t_max,
            dt: self.dt,
            n_points: self.n_points,
            n_states: self.n_states,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file (flags override file values)
    Run {
        /// Config file (TOML subset); built-in defaults when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Print the default configuration
    Defaults,
    /// Write both generator matrices (and their parts) to CSV
    SnapshotGenerators {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
}

fn execute(config: Option<PathBuf>, mut overrides: Overrides, force_scenario: Option<&str>) -> Result<RunSummary, CliError> {
    let body = match &config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    if let Some(s) = force_scenario {
        overrides.scenario = Some(s.to_string());
    }
    let cfg = resolve_config(body.as_deref(), &overrides)?;
    let summary = oqs_cli::run(&cfg)?;
    println!(
        "wrote {} to {}",
        summary.files.join(", "),
        cfg.output_dir.display()
    );
    Ok(summary)
}

fn main() -> ExitCode {
    init_workers();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, overrides } => execute(config, overrides.into_overrides(), None),
        Command::Defaults => {
            print!("{}", default_config_text());
            return ExitCode::SUCCESS;
        }
        Command::SnapshotGenerators { config, overrides } => {
            execute(config, overrides.into_overrides(), Some("snapshot_generators"))
        }
    };
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
