//! Report envelope shared by every subcommand, and its three renderings.

use std::fmt::Write as _;

use anyhow::Result;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Output of one subcommand. Contains no timestamps or host details, so
/// identical inputs give byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub config: Value,
    pub summary: Map<String, Value>,
    pub table: Table,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Report>,
}

impl Report {
    pub fn new(command: &str, config: Value, table: Table) -> Self {
        Report {
            command: command.to_string(),
            passed: true,
            config,
            summary: Map::new(),
            table,
            sections: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => self.render_csv(),
            Format::Markdown => {
                let mut out = String::new();
                self.render_markdown(&mut out, 1);
                Ok(out)
            }
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            writer.write_record(row.iter().map(cell))?;
        }
        Ok(String::from_utf8(writer.into_inner()?)?)
    }

    fn render_markdown(&self, out: &mut String, level: usize) {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} {} ({status})\n", "#".repeat(level), self.command);
        if !self.summary.is_empty() {
            for (key, value) in &self.summary {
                let _ = writeln!(out, "- {key}: {}", cell(value));
            }
            out.push('\n');
        }
        if !self.table.columns.is_empty() {
            let _ = writeln!(out, "| {} |", self.table.columns.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(self.table.columns.len()));
            for row in &self.table.rows {
                let cells: Vec<String> = row.iter().map(|v| cell(v).replace('|', "\\|")).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
            out.push('\n');
        }
        for section in &self.sections {
            section.render_markdown(out, level + 1);
        }
    }
}

/// Plain-text form of a JSON value: strings unquoted, everything else as JSON.
fn cell(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut table = Table::new(&["name", "value"]);
        table.push(vec![json!("a|b"), json!(1.5)]);
        let mut report = Report::new("demo", json!({"seed": 1}), table);
        report.note("worst", 0.25);
        report
    }

    #[test]
    fn csv_has_header_and_rows() {
        let text = sample().render(Format::Csv).unwrap();
        assert_eq!(text, "name,value\na|b,1.5\n");
    }

    #[test]
    fn markdown_escapes_pipes() {
        let text = sample().render(Format::Markdown).unwrap();
        assert!(text.starts_with("# demo (PASS)"));
        assert!(text.contains("| a\\|b | 1.5 |"));
        assert!(text.contains("- worst: 0.25"));
    }

    #[test]
    fn json_round_trips() {
        let report = sample();
        let text = report.render(Format::Json).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
