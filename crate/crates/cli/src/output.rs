//! Reports, CSV tables and exit codes.

use crate::config::RunConfig;
use bubble_tower::scaled::Scaled;
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct Invocation {
    pub name: &'static str,
    pub config: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub only: Vec<u32>,
}

#[derive(Debug)]
pub enum Failure {
    /// Unusable input; exit code 2.
    Config(String),
    /// The computation itself failed; exit code 1.
    Compute(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

/// Wraps library errors raised while building inputs.
pub fn invalid<E: fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

pub fn failed<E: fmt::Display>(e: E) -> Failure {
    Failure::Compute(e.to_string())
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    pass: Option<bool>,
    error: Option<&'a str>,
    result: &'a T,
}

/// What a command hands back for reporting.
pub struct Outcome<T: Serialize> {
    pub config: RunConfig,
    pub result: T,
    /// Verdict for commands that check something.
    pub pass: Option<bool>,
    /// Set when some of the work failed; the result then holds what finished.
    pub error: Option<String>,
    pub summary: Vec<String>,
    pub rows: Vec<CsvRow>,
}

impl<T: Serialize> Outcome<T> {
    pub fn new(config: RunConfig, result: T) -> Self {
        Outcome { config, result, pass: None, error: None, summary: vec![], rows: vec![] }
    }
}

#[derive(Serialize)]
pub struct CsvRow {
    pub eps: f64,
    pub ratio: Option<f64>,
    pub value_mantissa: f64,
    pub value_log10: i64,
    pub model_value: Option<f64>,
}

impl CsvRow {
    pub fn new(eps: f64, ratio: Option<f64>, value: Scaled, model_value: Option<f64>) -> Self {
        let dec = value.decimal();
        CsvRow { eps, ratio, value_mantissa: dec.mantissa, value_log10: dec.log10, model_value }
    }
}

fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| failed(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(failed)?;
    }
    w.flush().map_err(failed)
}

/// Writes the outputs and returns `Ok(verdict)` or the recorded failure.
pub fn emit<T: Serialize>(inv: &Invocation, out: Outcome<T>) -> Result<bool, Failure> {
    let json_to_stdout = inv.json.as_deref() == Some(Path::new("-"));
    for line in &out.summary {
        if json_to_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    if let Some(path) = &inv.csv {
        write_csv(path, &out.rows)?;
    }
    if let Some(path) = &inv.json {
        let report = Report {
            tool: "bubble-tower",
            version: bubble_tower::VERSION,
            command: inv.name,
            config: &out.config,
            pass: out.pass,
            error: out.error.as_deref(),
            result: &out.result,
        };
        let mut text = serde_json::to_string_pretty(&report).map_err(failed)?;
        text.push('\n');
        if json_to_stdout {
            std::io::stdout().write_all(text.as_bytes()).map_err(failed)?;
        } else {
            std::fs::write(path, text).map_err(|e| failed(format!("{}: {e}", path.display())))?;
        }
    }
    match out.error {
        Some(e) => Err(Failure::Compute(e)),
        None => Ok(out.pass.unwrap_or(true)),
    }
}
