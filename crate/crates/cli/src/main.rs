use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subsonic_cli::config::Mode;
use subsonic_cli::run::{run_characteristics, run_diagnose, run_solve, run_verify_appendix, Options};

#[derive(Parser)]
#[command(name = "subsonic", version, about = "Steady subsonic Euler flows in a periodic cylinder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the compressible problem.
    Solve(Common),
    /// Solve the incompressible problem.
    SolveIncompressible(Common),
    /// Residual report of a field file.
    Diagnose(Common),
    /// Characteristic roots of a CSV of states.
    Characteristics(Common),
    /// Run the identity chain with exact and difference derivatives.
    VerifyAppendix(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiply the grid counts by this factor.
    #[arg(long)]
    refine: Option<usize>,
    /// Field file for `diagnose`, states file for `characteristics`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

impl From<Common> for Options {
    fn from(c: Common) -> Self {
        Options { config: c.config, out: c.out, refine: c.refine, input: c.input, quiet: c.quiet }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let msg = e.to_string();
            eprint!("{msg}");
            let first = msg.lines().next().unwrap_or("").replace('"', "'");
            eprintln!("status=config_error exit=2 detail=\"{first}\"");
            return ExitCode::from(2);
        }
        Err(e) => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Solve(c) => run_solve(&c.into(), Mode::Compressible),
        Command::SolveIncompressible(c) => run_solve(&c.into(), Mode::Incompressible),
        Command::Diagnose(c) => run_diagnose(&c.into()),
        Command::Characteristics(c) => run_characteristics(&c.into()),
        Command::VerifyAppendix(c) => run_verify_appendix(&c.into()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.status_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
