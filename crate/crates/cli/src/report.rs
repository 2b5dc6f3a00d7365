//! Tabular results and their table / CSV / JSON renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Map, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_json(&self) -> Json {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }

    fn plain(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub meta: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: String,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
            summary: String::new(),
        }
    }

    pub fn meta(&mut self, key: &'static str, value: impl Into<Cell>) -> &mut Self {
        self.meta.push((key, value.into()));
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {}", v.plain());
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::plain).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |fields: Vec<&str>| -> String {
            fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(out, "{}", line(self.columns.clone()));
        for r in &cells {
            let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
        }
        if !self.summary.is_empty() {
            let _ = writeln!(out, "{}", self.summary);
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {}", v.plain());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::plain)).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(body).expect("utf-8 fields"));
        out
    }

    fn json(&self) -> String {
        let meta: Map<String, Json> = self.meta.iter().map(|(k, v)| (k.to_string(), v.to_json())).collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| Json::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({
            "command": self.command,
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
            "summary": self.summary,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", vec!["degree", "rank", "note"]);
        r.meta("seed", 7u64);
        r.row(vec![2i64.into(), 1usize.into(), "a, b".into()]);
        r.row(vec![3i64.into(), 0.5f64.into(), true.into()]);
        r.summary = "done".into();
        r
    }

    #[test]
    fn table_is_aligned() {
        let t = sample().render(Format::Table);
        assert!(t.starts_with("# seed: 7\n"));
        assert!(t.contains("degree  rank  note"));
        assert!(t.ends_with("done\n"));
    }

    #[test]
    fn csv_quotes_and_comments() {
        let c = sample().render(Format::Csv);
        assert_eq!(c, "# seed: 7\ndegree,rank,note\n2,1,\"a, b\"\n3,0.5,true\n");
    }

    #[test]
    fn json_shape() {
        let j: Json = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(j["rows"][1], json!([3, 0.5, true]));
        assert_eq!(j["meta"]["seed"], json!(7));
    }
}
