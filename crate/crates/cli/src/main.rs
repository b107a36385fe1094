use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use optomech_cli::{load_config, run_scenario, CliError, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "optomech",
    version,
    about = "Cavity optomechanics with a collective atomic mode"
)]
struct Cli {
    /// Output prefix; overrides `output` in the config.
    #[arg(long, global = true, value_name = "PREFIX")]
    out: Option<String>,

    /// Read every frequency in the config as Hz instead of rad/s.
    #[arg(long, global = true)]
    hz: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Bloch band energies over the first zone.
    Bands(ConfigArg),
    /// Probe excitation weights into the excited bands.
    Weights(ConfigArg),
    /// Quasi-static detuning sweep with branch tracking.
    Sweep(ConfigArg),
    /// Equilibrium count over a detuning / photon-number grid.
    Map(ConfigArg),
    /// Heating and damping rates from measurement backaction.
    Backaction(ConfigArg),
    /// Granularity versus atom-cavity detuning.
    Granularity(ConfigArg),
}

impl Command {
    fn split(&self) -> (ScenarioKind, &ConfigArg) {
        match self {
            Command::Bands(c) => (ScenarioKind::Bands, c),
            Command::Weights(c) => (ScenarioKind::Weights, c),
            Command::Sweep(c) => (ScenarioKind::Sweep, c),
            Command::Map(c) => (ScenarioKind::Map, c),
            Command::Backaction(c) => (ScenarioKind::Backaction, c),
            Command::Granularity(c) => (ScenarioKind::Granularity, c),
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let (kind, arg) = cli.command.split();
    let mut cfg = load_config(&arg.config, cli.hz)?;
    if cfg.kind() != kind {
        return Err(CliError::Config(format!(
            "subcommand `{}` does not match config scenario `{}`",
            kind.as_str(),
            cfg.kind().as_str()
        )));
    }
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    run_scenario(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
