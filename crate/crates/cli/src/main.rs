use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sublorentz_cli::commands::{run, Command, RunError};
use sublorentz_cli::config::Config;

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Longest admissible paths on sub-Lorentzian Lie groups.
#[derive(Parser)]
#[command(name = "sublorentz", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Longest path between the configured endpoints.
    Solve(Args),
    /// Antinorm axioms and cone diagnostics.
    CheckStructure(Args),
    /// Closedness, growth condition and potential of the time form.
    CheckTimeform(Args),
    /// Point cloud of the reachable set.
    Reach(Args),
    /// Every invariant of the library on random samples.
    Verify(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output.dir`, else `out`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_files(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Solve(a) => (Command::Solve, a),
        Sub::CheckStructure(a) => (Command::CheckStructure, a),
        Sub::CheckTimeform(a) => (Command::CheckTimeform, a),
        Sub::Reach(a) => (Command::Reach, a),
        Sub::Verify(a) => (Command::Verify, a),
    };
    let cfg = match Config::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let seed = args.seed.unwrap_or(cfg.solver.seed);
    let outcome = match run(command, &cfg, seed) {
        Ok(o) => o,
        Err(RunError::Config(e)) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(RunError::Library(e)) => {
            eprintln!("{}: {e}", command.name());
            return ExitCode::from(EXIT_FAILED);
        }
    };
    println!("{}", outcome.summary);
    let dir = args.out.or(cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    if let Err(e) = write_files(&dir, &outcome.files) {
        eprintln!("cannot write to {}: {e}", dir.display());
        return ExitCode::from(EXIT_FAILED);
    }
    for (name, _) in &outcome.files {
        println!("  wrote {}", dir.join(name).display());
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
