use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lvfront_cli::{emit_plot_data, load_config, run, CliError, Stage, Target};

#[derive(Parser)]
#[command(
    name = "lvfront",
    version,
    about = "Periodic Lotka-Volterra fronts and entire solutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `output` in the config. Defaults to `out`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Dotted config override, e.g. `grid.h=0.025`. Repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the coefficient hypotheses.
    Check,
    /// Compute the periodic kinetic orbits.
    Orbits,
    /// Compute the pulsating front.
    Front,
    /// Exponents, regimes and eigenfunctions at the front speed.
    Spectral,
    /// Tail fits, a priori bounds and ratio bounds.
    Decay,
    /// Build the entire solution and check its properties.
    Entire,
    /// Every stage enabled in the config.
    All,
    /// Rebuild plot data from the artifacts in the output directory.
    Plots,
}

fn emit_plots(out: &Path) -> Result<(), CliError> {
    for w in emit_plot_data(out)? {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let target = match cli.command {
        Command::Check => Target::Upto(Stage::Check),
        Command::Orbits => Target::Upto(Stage::Orbits),
        Command::Front => Target::Upto(Stage::Front),
        Command::Spectral => Target::Upto(Stage::Spectral),
        Command::Decay => Target::Upto(Stage::Decay),
        Command::Entire => Target::Upto(Stage::Entire),
        Command::All => Target::All,
        Command::Plots => return emit_plots(cli.out.as_deref().unwrap_or(Path::new("out"))),
    };
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg = load_config(&text, &cli.overrides)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let result = run(target, &cfg, &out);
    // Plot data is refreshed from whatever artifacts exist, including after a failed stage.
    let plotted = emit_plots(&out);
    for line in result? {
        println!("{line}");
    }
    plotted
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
