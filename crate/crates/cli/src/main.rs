use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deq_cli::{catalog, load, reproduce_paper, run_text, CliError, RunOptions, RunOutput};

/// Runs densely defined equilibrium scenarios and writes JSON-line reports.
#[derive(Parser)]
#[command(name = "deq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file, a bundled config or a catalog entry.
    Run {
        target: String,
        /// Write records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override every scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override every grid resolution.
        #[arg(long)]
        res: Option<f64>,
        /// Skip the terminal summary.
        #[arg(long, short)]
        quiet: bool,
    },
    /// List built-in instances.
    List,
    /// Run every bundled config.
    ReproducePaper {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, short)]
        quiet: bool,
    },
}

fn emit(out: &RunOutput, path: Option<PathBuf>, quiet: bool) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match path {
        Some(p) => std::fs::write(&p, out.to_lines()).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => out.write_to(&mut std::io::stdout().lock()).map_err(io)?,
    }
    if !quiet {
        let mut err = std::io::stderr().lock();
        err.write_all(out.summary().as_bytes()).map_err(io)?;
        for m in &out.mismatches {
            writeln!(err, "expectation not met: {m}").map_err(io)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            print!("{}", catalog::listing());
            Ok(0)
        }
        Command::Run {
            target,
            out,
            seed,
            res,
            quiet,
        } => load(&target)
            .and_then(|text| run_text(&text, RunOptions { seed, res }))
            .and_then(|o| emit(&o, out, quiet).map(|_| o.exit_code())),
        Command::ReproducePaper { out, quiet } => {
            reproduce_paper(RunOptions::default()).and_then(|o| emit(&o, out, quiet).map(|_| o.exit_code()))
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("deq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
