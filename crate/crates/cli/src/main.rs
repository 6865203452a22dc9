use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use laxmod::scenario::{list_builtins, run_builtin, run_scenario, Action, Overrides, Report};

/// Certify, solve and falsify Lax-Milgram problems on Hilbert modules over
/// finite-dimensional C*-algebras.
#[derive(Parser)]
#[command(name = "laxmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the coercivity conditions of a form.
    Certify(RunArgs),
    /// Solve B(x, y) = tau(y) and check the norm bound.
    Solve(RunArgs),
    /// Search for violations of the uniform coercivity condition.
    Falsify(RunArgs),
    /// Solve along a nested family of submodules.
    FamilySolve(RunArgs),
    /// Run a worked counterexample.
    Demo(RunArgs),
    /// List the builtin scenarios.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    scenario: Option<PathBuf>,
    /// Name of a builtin scenario.
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled pure states.
    #[arg(long)]
    samples: Option<usize>,
    /// Search tolerance for falsify, residual tolerance for solves.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn run(action: Action, args: &RunArgs) -> Result<Report, laxmod::Error> {
    let overrides = Overrides {
        action: Some(action),
        seed: args.seed,
        samples: args.samples,
        tol: args.tol,
    };
    match (&args.scenario, &args.builtin) {
        (Some(path), _) => run_scenario(path, &overrides),
        (None, Some(name)) => run_builtin(name, &overrides),
        (None, None) => unreachable!("clap requires one of --scenario and --builtin"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (action, args) = match &cli.command {
        Command::Certify(a) => (Action::Certify, a),
        Command::Solve(a) => (Action::Solve, a),
        Command::Falsify(a) => (Action::Falsify, a),
        Command::FamilySolve(a) => (Action::FamilySolve, a),
        Command::Demo(a) => (Action::Demo, a),
        Command::List => {
            for b in list_builtins() {
                println!("{:<20} {}", b.name, b.description);
            }
            return ExitCode::SUCCESS;
        }
    };
    let report = match run(action, args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let json = report.to_json();
    match &args.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!(
                "{}: {:?} (exit {})",
                report.scenario, report.outcome, report.exit_code
            );
        }
        None => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            if let Err(e) = writeln!(io::stdout().lock(), "{json}") {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
    }
    ExitCode::from(report.exit_code as u8)
}
