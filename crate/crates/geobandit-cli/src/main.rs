use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use geobandit_core::experiments::{parse_key_values, run_experiment, Experiment, Overrides};

#[derive(Parser, Debug)]
#[command(name = "geobandit", version, about = "Seeded GP-bandit experiments on manifolds")]
struct Cli {
    #[command(subcommand)]
    experiment: Command,
    /// Horizon override (for lbval: a single horizon).
    #[arg(long = "T", global = true)]
    horizon: Option<usize>,
    /// Number of seeds.
    #[arg(long, global = true)]
    seeds: Option<usize>,
    /// First seed.
    #[arg(long = "seed-base", global = true)]
    seed_base: Option<u64>,
    /// Output directory for results.csv and manifest.txt.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// GP-UCB regret against the lower-bound floor on S².
    Lbval,
    /// Extrinsic versus orbit-sum kernels on SO(3).
    D1,
    /// Switch-aware GP-UCB over a switching-cost grid.
    D7,
    /// GP-ThreDS on the S² and T³ panels.
    D4,
    /// Time-varying numeric chain and windowed GP-UCB.
    Tv,
    /// Oracle, packing, polynomial, bounds, GP and environment checks.
    Checks,
    /// Constants and rate curves.
    Bounds,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Lbval => Experiment::LbVal,
            Command::D1 => Experiment::D1Gauge,
            Command::D7 => Experiment::D7Switching,
            Command::D4 => Experiment::D4Threds,
            Command::Tv => Experiment::TvNumeric,
            Command::Checks => Experiment::Checks,
            Command::Bounds => Experiment::Bounds,
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let given = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_key_values(&text)?
        }
        None => Default::default(),
    };
    let ov = Overrides { horizon: cli.horizon, seeds: cli.seeds, seed_base: cli.seed_base };
    let exp = cli.experiment.experiment();
    let outcome = run_experiment(exp, given, &ov, &cli.out)?;
    eprintln!("{}: {} rows written to {}", exp.name(), outcome.table.rows.len(), cli.out.join("results.csv").display());
    if !outcome.passed {
        eprintln!("{}: at least one check failed", exp.name());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
