use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use habitlock::config::ConfigFile;
use habitlock::lockdown::SimSettings;
use habitlock::runner::{list_scenarios, run, RunError, RunManifest};

/// Run the lockdown scenarios of a config file and write CSV results.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// Scenario config (TOML).
    config: PathBuf,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    outdir: PathBuf,
    /// Sampling step in periods.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Length of open-ended segments (default: ten e-folds of the stable root).
    #[arg(long)]
    horizon: Option<f64>,
    /// Print the scenario names and exit.
    #[arg(long)]
    list_scenarios: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), RunError> {
    let config = ConfigFile::load(&cli.config)?;
    let settings = SimSettings {
        dt: cli.dt,
        horizon: cli.horizon,
    };
    let manifest = RunManifest::from_config(cli.config.clone(), config, cli.outdir.clone(), settings)?;
    if cli.list_scenarios {
        print!("{}", list_scenarios(&manifest));
        return Ok(());
    }
    let report = run(&manifest)?;
    println!(
        "wrote {} files to {}",
        report.files.len(),
        manifest.outdir.display()
    );
    Ok(())
}
