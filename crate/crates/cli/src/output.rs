use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use freqop::sampler::{RNG_ALGORITHM, STREAM_RULE};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Header carried by every output file.
#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub rng: &'static str,
    pub stream_rule: &'static str,
}

impl Metadata {
    pub fn new(command: &'static str, config: Value, seed: Option<u64>) -> Self {
        Self {
            tool: "freqop",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            seed,
            rng: RNG_ALGORITHM,
            stream_rule: STREAM_RULE,
        }
    }

    /// `# key=value` lines preceding a CSV header.
    fn csv_preamble(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!(
            "# tool={} {}\n# command={}\n# config={}\n# seed={}\n# rng={}\n# stream_rule={}\n",
            self.tool, self.version, self.command, self.config, seed, self.rng, self.stream_rule
        )
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    metadata: &'a Metadata,
    result: &'a T,
}

/// A CSV table; cells are preformatted.
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    /// Extra `# ` lines after the metadata block.
    pub notes: Vec<String>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn render<T: Serialize>(
    format: Format,
    metadata: &Metadata,
    result: &T,
    table: impl FnOnce() -> Table,
) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope { metadata, result })?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = table();
            let mut s = metadata.csv_preamble();
            for note in &table.notes {
                s.push_str(&format!("# {note}\n"));
            }
            s.push_str(&table.header.join(","));
            s.push('\n');
            for row in &table.rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            Ok(s)
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
