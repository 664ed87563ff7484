//! Output artifacts with an embedded metadata block.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use rbf_lowrank::pointgen::GENERATOR_ID;
use rbf_lowrank::{Error, Result};

use crate::args::{Cli, Format};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(*v as i64),
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self.header.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

pub enum Body {
    Table(Table),
    Json(Value),
}

pub struct Artifact {
    pub name: String,
    pub body: Body,
}

impl Artifact {
    pub fn table(name: &str, t: Table) -> Self {
        Artifact { name: name.into(), body: Body::Table(t) }
    }

    pub fn json(name: &str, v: Value) -> Self {
        Artifact { name: name.into(), body: Body::Json(v) }
    }
}

fn meta(cli: &Cli, artifact: &str) -> Result<Value> {
    Ok(json!({
        "tool": "rbfk",
        "version": VERSION,
        "artifact": artifact,
        "seed": cli.globals.seed,
        "generator": GENERATOR_ID,
        "config": serde_json::to_value(cli).map_err(|e| Error::Format(e.to_string()))?,
    }))
}

/// Text of one artifact with its metadata: `# key: value` lines before a
/// CSV table, or a `meta` object next to `data` for JSON.
pub fn render(cli: &Cli, a: &Artifact) -> Result<(String, &'static str)> {
    let m = meta(cli, &a.name)?;
    let as_json = matches!(a.body, Body::Json(_)) || cli.globals.format == Format::Json;
    if as_json {
        let data = match &a.body {
            Body::Table(t) => t.to_json(),
            Body::Json(v) => v.clone(),
        };
        let text = serde_json::to_string_pretty(&json!({ "meta": m, "data": data }))
            .map_err(|e| Error::Format(e.to_string()))?;
        return Ok((text + "\n", "json"));
    }
    let Body::Table(t) = &a.body else { unreachable!() };
    let mut s = String::new();
    for key in ["tool", "version", "artifact", "seed", "generator"] {
        let v = &m[key];
        s.push_str(&format!("# {key}: {}\n", v.as_str().map_or_else(|| v.to_string(), str::to_string)));
    }
    s.push_str(&format!("# config: {}\n", m["config"]));
    s.push_str(&t.to_csv());
    Ok((s, "csv"))
}

/// Writes every artifact into `dir` (one file each) or to standard output.
pub fn emit(cli: &Cli, artifacts: &[Artifact], dir: Option<&Path>) -> Result<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let stdout = std::io::stdout();
    for a in artifacts {
        let (text, ext) = render(cli, a)?;
        match dir {
            Some(dir) => fs::write(dir.join(format!("{}.{ext}", a.name)), text)?,
            None => stdout.lock().write_all(text.as_bytes())?,
        }
    }
    Ok(())
}

/// Recovers the configuration embedded by [`render`].
pub fn read_config(text: &str) -> Result<Cli> {
    let config = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        v["meta"]["config"].clone()
    } else {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix("# config: "))
            .ok_or_else(|| Error::Format("no `# config:` line in the input".into()))?;
        serde_json::from_str(line).map_err(|e| Error::Format(e.to_string()))?
    };
    serde_json::from_value(config).map_err(|e| Error::Format(format!("unreadable configuration: {e}")))
}
