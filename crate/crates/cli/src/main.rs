//! Command-line front end for the detector simulator: parse a sectioned
//! config (or a named recipe), dispatch to the simulation and analysis
//! operations, and write CSV/JSON tables plus a JSON run manifest.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 success with
//! under-powered statistics (a trial cap cut an error-count target short).

mod commands;
mod config;
mod output;
mod recipes;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{run_bounds, run_regions, run_replica, run_simulate, Ctx, Outcome};
use config::CliConfig;
use output::{unix_ms, write_manifest, OutputFormat, RunManifest};

#[derive(Parser)]
#[command(
    name = "lasmimo",
    version,
    about = "Likelihood-ascent detector simulator and analysis toolbox",
    long_about = "Runs Monte Carlo detector experiments, large-system BER \
analysis, error bounds, and two-bit decision-region maps from a sectioned \
TOML config or a named recipe.\n\nDefaults: stopping rule 300 bit errors \
with a 10^7-frame cap, fresh channel per frame, master seed 0, all \
workers. Recipes: fig1, fig3, fig4a-fig4e, fig5, table-bfr."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Sectioned TOML config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Named preset used instead of a config file.
    #[arg(long, global = true, value_name = "NAME")]
    recipe: Option<String>,
    /// Master-seed override applied to every experiment.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker-thread override (0 = default pool).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Directory receiving tables and the run manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Table file format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte Carlo BER or flip-rate estimation per the [simulate] section.
    Simulate,
    /// Large-system BER branches, phase scans, and cutoff loads.
    Replica,
    /// Per-bit error bounds and signal distances on a generated channel.
    Bounds,
    /// Two-bit decision-region map.
    Regions,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<i32, String> {
    let cfg = match (&cli.config, &cli.recipe) {
        (Some(_), Some(_)) => {
            return Err("give either --config or --recipe, not both".into())
        }
        (Some(path), None) => CliConfig::load(path)?,
        (None, Some(name)) => recipes::recipe(name)?,
        (None, None) => return Err("a --config file or a --recipe name is required".into()),
    };
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| format!("{}: {e}", cli.out.display()))?;

    let ctx = Ctx {
        out: cli.out.clone(),
        format: cli.format,
        seed: cli.seed,
        workers: cli.workers,
    };
    let started = unix_ms();
    let (subcommand, outcome): (&str, Outcome) = match cli.command {
        Cmd::Simulate => (
            "simulate",
            run_simulate(
                cfg.simulate
                    .ok_or("the config has no [simulate] section")?,
                &ctx,
            )?,
        ),
        Cmd::Replica => (
            "replica",
            run_replica(
                cfg.replica.ok_or("the config has no [replica] section")?,
                &ctx,
            )?,
        ),
        Cmd::Bounds => (
            "bounds",
            run_bounds(cfg.bounds.ok_or("the config has no [bounds] section")?, &ctx)?,
        ),
        Cmd::Regions => (
            "regions",
            run_regions(
                cfg.regions.ok_or("the config has no [regions] section")?,
                &ctx,
            )?,
        ),
    };

    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        config: outcome.effective,
        master_seed: outcome.master_seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        outputs: outcome
            .outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
    };
    let manifest_path = write_manifest(&cli.out, &manifest)?;

    for line in &outcome.summary {
        println!("{line}");
    }
    for path in &outcome.outputs {
        println!("wrote {}", path.display());
    }
    println!("wrote {}", manifest_path.display());

    Ok(if outcome.under_powered { 2 } else { 0 })
}
