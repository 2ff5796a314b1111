//! `kecover`: exact Kähler-Einstein criteria for Fano covers and the
//! numerical suites that back them.
//!
//! Exit codes: `0` every check passed, `1` usage or parameter error,
//! `2` a verification failed (the report is still written).

mod aggregate;
mod catalog;
mod numerics;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::report::{Format, Report};

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "kecover",
    version,
    about = "Kähler-Einstein criteria for Fano covers, with verification suites"
)]
struct Cli {
    /// Report format; `report` defaults to markdown, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verdicts for a catalog family.
    Family(catalog::FamilyArgs),
    /// Decide a cover system given as JSON.
    Check(catalog::CheckArgs),
    /// Congruence invariance of pencils of quadrics.
    Pencil(catalog::PencilArgs),
    /// Energy functional identities on seeded potentials.
    Identities(numerics::IdentitiesArgs),
    /// Pull-back, descent and lifting checks for `z -> z^d`.
    Cover(numerics::CoverArgs),
    /// Convergence of the singularity exponent integrals.
    Singexp(numerics::SingexpArgs),
    /// Combine saved JSON reports into one document.
    Report(aggregate::ReportArgs),
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("KECOVER_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("KECOVER_THREADS must be a positive integer, got {value:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Family(args) => catalog::cmd_family(args),
        Command::Check(args) => catalog::cmd_check(args),
        Command::Pencil(args) => catalog::cmd_pencil(args, cli.seed),
        Command::Identities(args) => numerics::cmd_identities(args, cli.seed),
        Command::Cover(args) => numerics::cmd_cover(args, cli.seed),
        Command::Singexp(args) => numerics::cmd_singexp(args),
        Command::Report(args) => aggregate::cmd_report(args),
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let default = match cli.command {
        Command::Report(_) => Format::Markdown,
        _ => Format::Json,
    };
    let text = report.render(cli.format.unwrap_or(default))?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure_threads().and_then(|_| {
        let report = execute(&cli)?;
        emit(&cli, &report)?;
        Ok(report.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("kecover: verification failed");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("kecover: {err:#}");
            ExitCode::from(1)
        }
    }
}
