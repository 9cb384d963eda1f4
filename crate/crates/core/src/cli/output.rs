use std::io::Write;

use serde::Serialize;

use super::RunConfig;

/// How a table should be drawn by `--plot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlotKind {
    /// Columns 1.. against column 0.
    Lines,
    /// Column `value` over the (column 0, column 1) grid, column 0 outer.
    Heatmap { outer: usize, inner: usize, value: usize },
}

/// Result of one run: named columns, rows in emission order and metadata
/// lines for the header.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
    pub plot: PlotKind,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
            plot: PlotKind::Lines,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(out: &mut W, config: &RunConfig, table: &Table) -> std::io::Result<()> {
    writeln!(out, "# ladder-cs {}", env!("CARGO_PKG_VERSION"))?;
    let config_json = serde_json::to_string(config).map_err(std::io::Error::other)?;
    writeln!(out, "# config: {config_json}")?;
    for (k, v) in &table.metadata {
        writeln!(out, "# {k}: {v}")?;
    }
    writeln!(out, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRun<'a> {
    config: &'a RunConfig,
    version: &'static str,
    metadata: serde_json::Map<String, serde_json::Value>,
    columns: &'a [String],
    data: Vec<Vec<serde_json::Value>>,
}

fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(v.to_string()))
}

pub fn write_json<W: Write>(out: &mut W, config: &RunConfig, table: &Table) -> std::io::Result<()> {
    let run = JsonRun {
        config,
        version: env!("CARGO_PKG_VERSION"),
        metadata: table
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect(),
        columns: &table.columns,
        data: table
            .rows
            .iter()
            .map(|r| r.iter().map(|v| json_number(*v)).collect())
            .collect(),
    };
    serde_json::to_writer(&mut *out, &run).map_err(std::io::Error::other)?;
    writeln!(out)
}
