use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig};

pub const SCHEMA: u32 = 1;

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::I(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Rows for the CSV rendering of a result.
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match c {
                    // 17 significant digits
                    Cell::F(x) if x.is_finite() => write!(out, "{x:.16e}").unwrap(),
                    Cell::F(x) => write!(out, "{x}").unwrap(),
                    Cell::I(x) => write!(out, "{x}").unwrap(),
                    Cell::S(s) => out.push_str(s),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }
}

/// A command's result in both renderings.
pub struct Report {
    pub command: &'static str,
    pub data: Value,
    pub table: Table,
}

impl Report {
    pub fn render(&self, cfg: &RunConfig) -> String {
        match cfg.output_format {
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Json => {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "config": cfg.echo(),
                    "data": self.data,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

pub fn emit(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
