use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rfh_cli::{run, Command, Overrides};

#[derive(Parser)]
#[command(name = "rfh", version, about = "Rabinowitz Floer homology of spheres and leaf-wise intersection search")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Ladder and equivariant homology tables.
    Homology(Common),
    /// Seeds through continuation, extraction, verification and dedup.
    Find(Common),
    /// Algebraic action spectrum and a fit of observed actions.
    Spectrum(Common),
    /// Re-check points with the flow-only oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Points CSV; defaults to `points` in the config, then `<out>/reports.csv`.
        #[arg(long)]
        points: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    quantum: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    let (cmd, common, points) = match cli.command {
        Sub::Homology(c) => (Command::Homology, c, None),
        Sub::Find(c) => (Command::Find, c, None),
        Sub::Spectrum(c) => (Command::Spectrum, c, None),
        Sub::Verify { common, points } => (Command::Verify, common, points),
    };
    let overrides = Overrides { out: common.out, jobs: common.jobs, quantum: common.quantum, points };
    match run(cmd, &common.config, &overrides) {
        Ok(status) => {
            println!("{}", status.message);
            ExitCode::from(status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("rfh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
