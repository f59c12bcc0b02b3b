//! Command-line entry point: `robinhs run <SCENARIO>`.
//!
//! Exit codes: 0 when every verdict passed, 1 when the scenario ran but
//! some verdict failed (the report is still written), 2 for
//! configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use robinhs_cli::config::{parse_config, ExperimentConfig, Overrides, Scenario};
use robinhs_cli::report::emit_artifacts;
use robinhs_cli::scenarios::run_scenario;

#[derive(Parser)]
#[command(
    name = "robinhs",
    version,
    about = "Boundary-reduction experiments for half-space Robin Laplacians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report and CSV files.
    Run {
        /// Scenario to run (S1 through S7).
        scenario: Scenario,
        /// JSON config file; omit to use the scenario's built-in defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: out/<scenario>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized content.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the boundary dimension.
        #[arg(long = "grid-n")]
        grid_n: Option<usize>,
        /// Override the points per axis.
        #[arg(long = "grid-N")]
        grid_points: Option<usize>,
        /// Override the box edge length.
        #[arg(long = "box-L")]
        box_length: Option<f64>,
        /// Override the (real) spectral parameter.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, config, out, seed, grid_n, grid_points, box_length, lambda } => {
            run_command(
                scenario,
                config,
                out,
                Overrides { grid_n, grid_points, box_length, lambda, seed },
            )
        }
    }
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {msg}");
    ExitCode::from(2)
}

fn run_command(
    scenario: Scenario,
    config_path: Option<PathBuf>,
    out: Option<PathBuf>,
    overrides: Overrides,
) -> ExitCode {
    let mut config = match &config_path {
        Some(path) => match parse_config(path) {
            Ok(c) => c,
            Err(e) => return config_error(e),
        },
        None => ExperimentConfig::default_for(scenario),
    };
    if config.scenario != scenario {
        return config_error(format!(
            "config file is for {} but the command names {scenario}; run `robinhs run {}` or pass a matching config",
            config.scenario, config.scenario
        ));
    }
    config.apply_overrides(&overrides);
    if let Some(dir) = out {
        config.out = Some(dir);
    }

    let artifacts = match run_scenario(&config) {
        Ok(a) => a,
        Err(e) => return config_error(e),
    };
    let report = &artifacts.report;

    println!("scenario {} ({})", scenario, scenario.title());
    for v in &report.verdicts {
        println!("  {} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }

    let out_dir = config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("out/{}", scenario.name().to_lowercase())));
    match emit_artifacts(&artifacts, &out_dir) {
        Ok(paths) => {
            println!("wrote {} file(s) to {}", paths.len(), out_dir.display());
        }
        Err(e) => return config_error(format!("cannot write to {}: {e}", out_dir.display())),
    }
    println!(
        "result: {} (wall {:.1} s)",
        if report.pass { "PASS" } else { "FAIL" },
        report.wall_seconds
    );
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
