//! Output files. Every artifact starts with the version, command, seed and
//! the resolved configuration, and contains nothing that depends on the
//! time, the host or the thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;
use willslab::SeedSpec;

pub const VERSION: &str = concat!("willslab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A failed `--check`.
#[derive(Debug, thiserror::Error)]
#[error("check failed: {0}")]
pub struct CheckFailed(pub String);

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    version: &'a str,
    command: &'a str,
    seed: u64,
    stream: u64,
    config: &'a Value,
    result: &'a T,
}

pub struct Run {
    pub command: &'static str,
    pub config: Value,
    pub seed: SeedSpec,
    pub out: PathBuf,
    pub format: Format,
}

impl Run {
    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("cannot create `{}`", self.out.display()))?;
        Ok(self.out.join(name))
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path(name)?;
        fs::write(&path, bytes).with_context(|| format!("cannot write `{}`", path.display()))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        self.write_bytes(name, text.as_bytes())
    }

    pub fn json_text<T: Serialize>(&self, result: &T) -> Result<String> {
        let doc = Document {
            version: VERSION,
            command: self.command,
            seed: self.seed.seed,
            stream: self.seed.stream,
            config: &self.config,
            result,
        };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(text)
    }

    pub fn header_lines(&self) -> String {
        format!(
            "# {VERSION}\n# command: {}\n# seed: {} stream: {}\n# config: {}\n",
            self.command,
            self.seed.seed,
            self.seed.stream,
            serde_json::to_string(&self.config).expect("config serializes")
        )
    }

    pub fn write_json<T: Serialize>(&self, name: &str, result: &T) -> Result<PathBuf> {
        self.write_text(name, &self.json_text(result)?)
    }

    pub fn write_csv(&self, name: &str, table: &Table) -> Result<PathBuf> {
        let mut text = self.header_lines();
        text.push_str(&table.header.join(","));
        text.push('\n');
        for row in &table.rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    /// `<stem>.json` with the full result or `<stem>.csv` with the table.
    pub fn write_main<T: Serialize>(&self, stem: &str, result: &T, table: &Table) -> Result<PathBuf> {
        match self.format {
            Format::Json => self.write_json(&format!("{stem}.json"), result),
            Format::Csv => self.write_csv(&format!("{stem}.csv"), table),
        }
    }

    pub fn write_svg(&self, name: &str, svg: &str) -> Result<PathBuf> {
        let mut text = String::new();
        let meta = self.header_lines().replace("--", "- -");
        // the metadata goes into an XML comment right after the root element opens
        let (head, tail) = svg.split_once('>').expect("svg root element");
        let _ = write!(text, "{head}>\n<!--\n{meta}-->{tail}");
        self.write_text(name, &text)
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Serializes `args` and replaces the listed keys with resolved values.
pub fn echo<T: Serialize>(args: &T, resolved: Vec<(&str, Value)>) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(map) = &mut v {
        for (k, r) in resolved {
            map.insert(k.to_string(), r);
        }
    }
    v
}

pub fn ensure(ok: bool, what: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CheckFailed(what.into()).into())
    }
}
