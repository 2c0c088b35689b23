//! Tables rendered as JSON, CSV or aligned text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use penrose_strichartz::report::{to_json_string, Source};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// A number with a closed form (`paper`) or obtained numerically (`computed`).
    Tagged(f64, Source),
    Null,
}

impl Cell {
    pub fn paper(v: f64) -> Self {
        Cell::Tagged(v, Source::Paper)
    }

    pub fn computed(v: f64) -> Self {
        Cell::Tagged(v, Source::Computed)
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Num)
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => float(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Tagged(v, s) => serde_json::json!({ "value": float(*v), "source": s }),
            Cell::Null => Value::Null,
        }
    }

    fn plain(&self) -> String {
        match self {
            Cell::Num(v) | Cell::Tagged(v, _) => num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: serde_json::Map<_, _> =
                        self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }

    /// Tagged columns get a companion `<name>_source` column.
    pub fn to_csv(&self) -> String {
        let tagged: Vec<bool> = (0..self.columns.len())
            .map(|j| self.rows.iter().any(|r| matches!(r[j], Cell::Tagged(..))))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::new();
        for (c, &t) in self.columns.iter().zip(&tagged) {
            header.push(c.to_string());
            if t {
                header.push(format!("{c}_source"));
            }
        }
        w.write_record(&header).expect("in-memory CSV");
        for r in &self.rows {
            let mut rec = Vec::new();
            for (cell, &t) in r.iter().zip(&tagged) {
                rec.push(cell.plain());
                if t {
                    rec.push(match cell {
                        Cell::Tagged(_, Source::Paper) => "paper".into(),
                        Cell::Tagged(_, Source::Computed) => "computed".into(),
                        _ => String::new(),
                    });
                }
            }
            w.write_record(&rec).expect("in-memory CSV");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
    }

    fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Tagged(v, Source::Paper) => format!("{} [paper]", num(*v)),
                        Cell::Null => "-".into(),
                        c => c.plain(),
                    })
                    .collect()
            })
            .collect();
        let width: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                cells.iter().map(|r| r[j].chars().count()).chain([self.columns[j].len()]).max().unwrap_or(0)
            })
            .collect();
        let mut s = String::new();
        let line = |s: &mut String, items: &[String]| {
            let parts: Vec<String> = items.iter().zip(&width).map(|(x, &w)| format!("{x:<w$}")).collect();
            let _ = writeln!(s, "{}", parts.join("  ").trim_end());
        };
        line(&mut s, &self.columns.iter().map(|c| c.to_string()).collect::<Vec<_>>());
        for r in &cells {
            line(&mut s, r);
        }
        s
    }
}

/// Output of one command: a main table, optional named detail values and a verdict.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub table: Table,
    pub details: BTreeMap<String, Value>,
    /// None when the command checks nothing.
    pub passed: Option<bool>,
    pub failures: Vec<String>,
    /// Free-form lines appended to text output only.
    pub notes: Vec<String>,
    /// Printed as is in every format.
    pub raw: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, table: Table) -> Self {
        Report {
            command,
            table,
            details: BTreeMap::new(),
            passed: None,
            failures: Vec::new(),
            notes: Vec::new(),
            raw: None,
        }
    }

    pub fn detail<S: Serialize>(&mut self, key: &str, value: &S) {
        let text = to_json_string(value);
        self.details.insert(key.into(), serde_json::from_str(&text).expect("round trip of own JSON"));
    }

    pub fn render(&self, format: Format) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        match format {
            Format::Json => {
                let mut m = serde_json::Map::new();
                m.insert("command".into(), Value::from(self.command));
                m.insert("rows".into(), self.table.json());
                if !self.details.is_empty() {
                    m.insert("details".into(), Value::Object(self.details.clone().into_iter().collect()));
                }
                if let Some(p) = self.passed {
                    m.insert("passed".into(), Value::from(p));
                    m.insert("failures".into(), Value::from(self.failures.clone()));
                }
                let mut s = to_json_string(&Value::Object(m));
                s.push('\n');
                s
            }
            Format::Csv => self.table.to_csv(),
            Format::Text => {
                let mut s = self.table.to_text();
                for n in &self.notes {
                    let _ = writeln!(s, "{n}");
                }
                if let Some(p) = self.passed {
                    let _ = writeln!(s, "{}", if p { "PASS" } else { "FAIL" });
                    for f in &self.failures {
                        let _ = writeln!(s, "failed: {f}");
                    }
                }
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["d", "x", "y"]);
        t.push(vec![3usize.into(), Cell::paper(0.5), Cell::Num(1.0)]);
        t.push(vec![4usize.into(), Cell::computed(0.25), Cell::Null]);
        t
    }

    #[test]
    fn csv_adds_source_columns() {
        let csv = sample().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("d,x,x_source,y"));
        assert_eq!(lines.next(), Some("3,5.0000000000000000e-1,paper,1.0000000000000000e0"));
        assert_eq!(lines.next(), Some("4,2.5000000000000000e-1,computed,"));
    }

    #[test]
    fn json_is_tagged_and_stable() {
        let mut r = Report::new("demo", sample());
        r.passed = Some(true);
        let a = r.render(Format::Json);
        assert_eq!(a, r.render(Format::Json));
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["rows"][0]["x"]["source"], "paper");
        assert_eq!(v["rows"][1]["x"]["source"], "computed");
        assert!(a.contains("5.0000000000000000e-1"));
    }
}
