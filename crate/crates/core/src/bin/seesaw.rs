use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use seesaw::experiments::{list_builtin_scenarios, resolve_scenario, run_checks, run_scenario};
use seesaw::Error;

/// Populations above this on the highest retained level trigger a warning.
const TRUNCATION_WARN: f64 = 1e-4;

#[derive(Parser)]
#[command(
    name = "seesaw",
    version,
    about = "Quantum seesaw and atom-cavity self-organization simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or built-in scenario and write timeseries.csv and meta.txt.
    Run {
        /// Path to a scenario file, or the name of a built-in scenario.
        scenario: String,
        /// Output directory (default: out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the ensemble master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of trajectories.
        #[arg(long)]
        traj: Option<usize>,
    },
    /// List built-in scenarios.
    List,
    /// Run the fast closed-form checks.
    Check,
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config() || matches!(e, Error::Io(_)) {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn run(
    arg: &str,
    out: Option<PathBuf>,
    seed: Option<u64>,
    traj: Option<usize>,
) -> Result<(), Error> {
    let mut s = resolve_scenario(arg)?;
    if let Some(seed) = seed {
        s.master_seed = seed;
    }
    if let Some(n) = traj {
        if n == 0 {
            return Err(Error::ConfigField {
                field: "--traj".into(),
                message: "must be >= 1".into(),
            });
        }
        s.n_traj = n;
    }
    let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&s.name));
    let result = run_scenario(&s, &dir)?;
    for t in &result.truncation {
        if t.max_population > TRUNCATION_WARN {
            eprintln!(
                "warning: `{}` level {} reached population {:.2e}; increase its cutoff",
                t.label, t.levels, t.max_population
            );
        }
    }
    println!(
        "{}: {} rows written to {} ({:.2} s)",
        s.name,
        result.rows.len(),
        dir.display(),
        result.wall_time.as_secs_f64()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            traj,
        } => match run(&scenario, out, seed, traj) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
        Command::List => {
            for (name, description) in list_builtin_scenarios() {
                println!("{name:<16} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Check => {
            let results = run_checks();
            let mut ok = true;
            for c in &results {
                ok &= c.passed;
                let mark = if c.passed { "PASS" } else { "FAIL" };
                println!("{mark} {:<32} {} ({:.2} s)", c.name, c.detail, c.seconds);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
    }
}
