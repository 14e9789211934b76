use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Cli, Format, Global, Mode};

/// What a command hands back: the JSON body, a flat table for CSV, and any
/// failed checks.
pub struct Output {
    pub result: Value,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub failures: Vec<String>,
}

impl Output {
    pub fn new(result: impl Serialize) -> Result<Self> {
        Ok(Self { result: serde_json::to_value(result)?, headers: Vec::new(), rows: Vec::new(), failures: Vec::new() })
    }

    pub fn table(mut self, headers: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.headers = headers;
        self.rows = rows;
        self
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Cli,
    seed: u64,
    ms: Option<u64>,
    mode: Mode,
    failures: &'a [String],
    result: &'a Value,
}

impl<'a> Envelope<'a> {
    pub fn new(cli: &'a Cli, ms: Option<u64>, out: &'a Output) -> Self {
        Self {
            tool: "redeilab",
            version: env!("CARGO_PKG_VERSION"),
            config: cli,
            seed: cli.global.seed,
            ms,
            mode: cli.global.mode,
            failures: &out.failures,
            result: &out.result,
        }
    }
}

pub fn emit(global: &Global, env: &Envelope, out: &Output) -> Result<()> {
    let mut bytes = Vec::new();
    match global.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut bytes, env)?;
            bytes.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut bytes);
            w.write_record(&out.headers)?;
            for row in &out.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    match &global.output {
        Some(path) => std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().lock().write_all(&bytes).context("writing stdout"),
    }
}
