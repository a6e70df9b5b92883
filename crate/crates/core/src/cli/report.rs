use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use super::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub parameters: Value,
    pub code_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub verdict: Verdict,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    manifest: &'a Manifest,
    body: &'a Value,
}

#[derive(Serialize)]
struct RunSidecar<'a> {
    schema_version: u32,
    manifest: &'a Manifest,
    report: String,
    jobs: usize,
    started_unix_ms: u128,
    finished_unix_ms: u128,
}

/// Lossy tabular projection of a report body.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Outcome {
    pub verdict: Verdict,
    pub seed: Option<u64>,
    pub body: Value,
    pub table: Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn render(manifest: &Manifest, outcome: &Outcome, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let report = Report { schema_version: SCHEMA_VERSION, manifest, body: &outcome.body };
            let mut text = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Output(e.to_string()))?;
            text.push(b'\n');
            Ok(text)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(&outcome.table.header).map_err(io)?;
            for row in &outcome.table.rows {
                w.write_record(row).map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".run.json");
    PathBuf::from(name)
}

pub struct Emit<'a> {
    pub out: Option<&'a Path>,
    pub format: Format,
    pub jobs: usize,
    pub started: u128,
}

pub fn emit(manifest: &Manifest, outcome: &Outcome, how: Emit<'_>) -> Result<(), CliError> {
    let bytes = render(manifest, outcome, how.format)?;
    let write_err = |p: &Path, e: std::io::Error| CliError::Output(format!("{}: {e}", p.display()));
    match how.out {
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Output(e.to_string())),
        Some(path) => {
            fs::write(path, &bytes).map_err(|e| write_err(path, e))?;
            let sidecar = RunSidecar {
                schema_version: SCHEMA_VERSION,
                manifest,
                report: path.display().to_string(),
                jobs: how.jobs,
                started_unix_ms: how.started,
                finished_unix_ms: now_ms(),
            };
            let side = sidecar_path(path);
            let mut text = serde_json::to_vec_pretty(&sidecar).map_err(|e| CliError::Output(e.to_string()))?;
            text.push(b'\n');
            fs::write(&side, text).map_err(|e| write_err(&side, e))
        }
    }
}
