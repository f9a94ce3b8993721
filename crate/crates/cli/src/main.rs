//! Command-line driver: explore a map, rank routes, smooth a route and
//! compare against the grid baseline.

mod commands;
mod input;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use waterway::map_io::save_scenario;
use waterway::{builtin_scenarios, PipelineError, Point};

use commands::RunReport;
use input::{parse_point, Overrides};
use output::{write_atomic, Format};

/// Exit status when start and goal are not connected by any route.
const EXIT_NO_ROUTE: u8 = 3;
/// Exit status when the path controller stalls or runs out of steps.
const EXIT_STALLED: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "waterway", version, about = "Route safety ranking for waterways")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
    /// Output directory [default: $GARSA_OUT, else the current directory].
    #[arg(long, global = true, env = "GARSA_OUT")]
    out: Option<PathBuf>,
    /// Artifact formats to write; repeat or comma-separate. Default: all.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trace the route network of a map.
    Explore {
        /// Map file, scenario file, or `builtin:<name>`.
        input: String,
        /// Exploration start `x,y`; defaults to the map reference point.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        origin: Option<Point>,
    },
    /// Enumerate and rank the routes between a scenario's start and goal.
    Assess {
        /// Scenario file or `builtin:<name>`.
        scenario: String,
    },
    /// Smooth a route into a kinematically feasible path.
    Modify {
        scenario: String,
        /// Route id from `assess`; defaults to the safest route.
        #[arg(long)]
        route: Option<usize>,
    },
    /// Compare the safest route with a grid A* shortest path.
    Compare { scenario: String },
    /// List the builtin scenarios, optionally writing them as scenario files.
    Scenarios {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Option<RunReport>> {
    let o = &cli.overrides;
    let report = match &cli.command {
        Command::Explore { input, origin } => {
            let s = input::explorable(input, *origin, o)?;
            commands::explore_cmd(&s, origin.unwrap_or_else(|| s.origin()))?
        }
        Command::Assess { scenario } => commands::assess_cmd(&input::scenario(scenario, o)?)?,
        Command::Modify { scenario, route } => commands::modify_cmd(&input::scenario(scenario, o)?, *route)?,
        Command::Compare { scenario } => commands::compare_cmd(&input::scenario(scenario, o)?)?,
        Command::Scenarios { write } => {
            for s in builtin_scenarios::<f64>() {
                println!(
                    "{:<10} start ({}, {})  goal ({}, {})",
                    s.name, s.start.x, s.start.y, s.goal.x, s.goal.y
                );
                if let Some(dir) = write {
                    std::fs::create_dir_all(dir)?;
                    write_atomic(&dir.join(format!("{}.scn", s.name)), save_scenario(&s).as_bytes())?;
                }
            }
            return Ok(None);
        }
    };
    Ok(Some(report))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let formats = cli.format.clone();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(mut report)) => {
            let artifacts = std::mem::take(&mut report.artifacts);
            let written = match artifacts.commit(&out, &formats) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::FAILURE;
                }
            };
            print!("{report}");
            for p in &written {
                println!("wrote {}", p.display());
            }
            if report.stalled.is_some() {
                ExitCode::from(EXIT_STALLED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<PipelineError>() {
                Some(PipelineError::NoRoute) => ExitCode::from(EXIT_NO_ROUTE),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
