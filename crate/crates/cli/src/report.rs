//! Versioned JSON report envelope and CSV tables. See `docs/report-schema.md`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    result: &'a T,
}

pub fn render<T: Serialize>(command: &str, config: &RunConfig, result: &T) -> String {
    let envelope = Envelope {
        schema: "seedpair.report",
        schema_version: SCHEMA_VERSION,
        tool: "seedpair",
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&envelope).expect("report types serialize");
    text.push('\n');
    text
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

/// Writes the report to `out`, or stdout when absent.
pub fn emit<T: Serialize>(command: &str, config: &RunConfig, result: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = render(command, config, result);
    match out {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("cannot write report: {e}"))),
    }
}

/// CSV table with a header row.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let fail = |e: csv::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

/// Shortest round-trip decimal form, matching the JSON report.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite number")
}
