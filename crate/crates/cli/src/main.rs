//! Command-line front end. Exit codes: 0 pass, 2 fail or not found, 1 error.

mod commands;
mod output;
mod system;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AsymptoticArgs, CertifyArgs, EvalArgs, PipelineArgs, RecoverArgs, ReproduceArgs, SearchArgs};
use output::Sink;

#[derive(Parser, Debug)]
#[command(name = "wandering", version, about = "Exact search and certification of non-wandering z^k-invariant subspaces")]
struct Cli {
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the constants and objectives at one point.
    Eval(EvalArgs),
    /// Minimise an objective over systems and d.
    Search(SearchArgs),
    /// Recover the generator coefficients at one point.
    Recover(RecoverArgs),
    /// Verify a generator pair, or re-check a certificate.
    Certify(CertifyArgs),
    /// Search, recover, attach registers and certify.
    Pipeline(PipelineArgs),
    /// Minimal beta per k for the closed-form bound.
    Asymptotic(AsymptoticArgs),
    /// Recompute a published table with deltas.
    Reproduce(ReproduceArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let sink = Sink { path: cli.out };
    let result = match &cli.command {
        Command::Eval(a) => commands::eval(a, &sink),
        Command::Search(a) => commands::search(a, &sink),
        Command::Recover(a) => commands::recover_cmd(a, &sink),
        Command::Certify(a) => commands::certify(a, &sink),
        Command::Pipeline(a) => commands::pipeline_cmd(a, &sink),
        Command::Asymptotic(a) => commands::asymptotic(a, &sink),
        Command::Reproduce(a) => commands::reproduce(a, &sink),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
