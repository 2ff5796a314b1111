//! `report`: gathers saved JSON reports into one document.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::report::{Report, Table};

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// JSON reports written by the other subcommands.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

/// The combined report passes when every input passed.
pub fn cmd_report(args: &ReportArgs) -> Result<Report> {
    if args.inputs.is_empty() {
        bail!("no input reports given");
    }
    let mut sections = Vec::with_capacity(args.inputs.len());
    let mut table = Table::new(&["file", "command", "passed"]);
    for path in &args.inputs {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let section: Report =
            serde_json::from_str(&text).with_context(|| format!("{} is not a kecover JSON report", path.display()))?;
        table.push(vec![
            json!(path.display().to_string()),
            json!(section.command),
            json!(section.passed),
        ]);
        sections.push(section);
    }
    let mut report = Report::new("report", serde_json::to_value(args)?, table);
    report.passed = sections.iter().all(|s| s.passed);
    report.note("reports", sections.len());
    report.note("failed", sections.iter().filter(|s| !s.passed).count());
    report.sections = sections;
    Ok(report)
}
