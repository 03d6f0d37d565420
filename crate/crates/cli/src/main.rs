//! `shepherd`: run singling experiments, inspect feasible sets and replay logs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shepherd_core::controller::Method;
use shepherd_core::experiment::output::comparison_configs;
use shepherd_core::experiment::{
    generate_initial, replay, run_trials, write_comparison, write_outputs, ExperimentConfig, RunSummary, Target,
};
use shepherd_core::separation::{feasible_sets, OpenInterval, DEFAULT_DOMAIN_BOUND};
use shepherd_core::Error;

#[derive(Parser)]
#[command(
    name = "shepherd",
    version,
    about = "Singling a target sheep out of a flock with one shepherd"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of seeded trials and write CSV, JSON and SVG artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Target label (A-E) or sheep index.
        #[arg(long)]
        target: Option<Target>,
        #[arg(long)]
        method: Option<Method>,
    },
    /// Print the feasible coefficient sets for the configured gains.
    FeasibleSets {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-render a logged trial CSV as a trajectory SVG.
    Replay {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Sheep index to highlight.
        #[arg(long)]
        target: Option<usize>,
    },
    /// Run every labelled target with both methods and write comparison plots.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(clap::Args)]
struct Overrides {
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(Error),
    Runtime(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

type CliResult = Result<(), Failure>;

fn load(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::load(path).map_err(Failure::Config)?;
    if let Some(n) = overrides.trials {
        config.trials = n;
    }
    if let Some(s) = overrides.seed {
        config.base_seed = s;
    }
    if let Some(m) = overrides.max_steps {
        config.step_budget = m;
    }
    if let Some(out) = &overrides.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

/// Checks everything that can be checked before any trial runs.
fn check(config: &ExperimentConfig) -> Result<(), Failure> {
    config.validate().map_err(Failure::Config)?;
    generate_initial(config).map_err(Failure::Config)?;
    Ok(())
}

fn report(summary: &RunSummary) {
    let a = &summary.aggregates;
    println!(
        "target {} (sheep {}), {}: {}/{} separated, mean connectivity {:.4}, mean steps {}{}",
        summary.config.target,
        summary.target_id,
        summary.config.method.as_str(),
        a.successes,
        a.trials,
        a.mean_time_avg_connectivity,
        a.mean_separation_time.map_or("-".to_string(), |t| format!("{t:.1}")),
        if a.errors > 0 {
            format!(", {} trial errors", a.errors)
        } else {
            String::new()
        },
    );
}

fn run(config: ExperimentConfig) -> CliResult {
    check(&config)?;
    let summary = run_trials(&config).map_err(Failure::Runtime)?;
    write_outputs(&summary, &config.output_dir).map_err(Failure::Runtime)?;
    report(&summary);
    println!("wrote {}", config.output_dir.display());
    Ok(())
}

fn compare(base: ExperimentConfig) -> CliResult {
    let configs = comparison_configs(&base);
    for c in &configs {
        check(c)?;
    }
    let mut summaries = Vec::new();
    for c in configs {
        let dir = base.output_dir.join(format!("{}_{}", c.target, c.method.as_str()));
        let summary = run_trials(&c).map_err(Failure::Runtime)?;
        write_outputs(&summary, &dir).map_err(Failure::Runtime)?;
        report(&summary);
        summaries.push(summary);
    }
    write_comparison(&summaries, &base.output_dir).map_err(Failure::Runtime)?;
    println!("wrote {}", base.output_dir.display());
    Ok(())
}

fn fmt_intervals(intervals: &[OpenInterval]) -> String {
    if intervals.is_empty() {
        return "empty".into();
    }
    intervals
        .iter()
        .map(|i| format!("({:.10}, {:.10})", i.lo, i.hi))
        .collect::<Vec<_>>()
        .join(" U ")
}

fn print_feasible_sets(path: &Path) -> CliResult {
    let config = ExperimentConfig::load(path).map_err(Failure::Config)?;
    let sets = feasible_sets(&config.params, DEFAULT_DOMAIN_BOUND).map_err(Failure::Config)?;
    println!("T1 = T3 = {}", sets.t1);
    println!("T2 = {}", sets.t2);
    println!("C1: {}", fmt_intervals(&sets.c1));
    println!("C2: {}", fmt_intervals(&sets.c2));
    println!("C3: {}", fmt_intervals(&sets.c3));
    Ok(())
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Run {
            config,
            overrides,
            target,
            method,
        } => {
            let mut c = load(&config, &overrides)?;
            if let Some(t) = target {
                c.target = t;
            }
            if let Some(m) = method {
                c.method = m;
            }
            run(c)
        }
        Command::FeasibleSets { config } => print_feasible_sets(&config),
        Command::Replay { csv, svg, target } => {
            replay(&csv, &svg, target).map_err(Failure::Runtime)?;
            println!("wrote {}", svg.display());
            Ok(())
        }
        Command::Compare { config, overrides } => compare(load(&config, &overrides)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(e) | Failure::Runtime(e)) = &f;
            eprintln!("error: {e}");
            ExitCode::from(f.code())
        }
    }
}
