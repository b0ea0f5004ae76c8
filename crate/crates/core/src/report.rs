//! Tabular audit reports rendered as CSV or JSON.
//!
//! Cells are stored as strings so rendering is byte-stable: floats go through
//! [`fmt_f64`], which prints the shortest round-tripping decimal.

use std::fmt::Display;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    name: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    /// `name` is the file stem the report is written under.
    pub fn new(name: impl Into<String>, headers: &[&str]) -> Self {
        Table {
            name: name.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Panics if the row width differs from the header width.
    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(row.len(), self.headers.len(), "row width mismatch in {}", self.name);
        self.rows.push(row);
    }

    /// Value of `column` in row `i`.
    pub fn get(&self, i: usize, column: &str) -> Option<&str> {
        let j = self.headers.iter().position(|h| h == column)?;
        self.rows.get(i).map(|r| r[j].as_str())
    }

    pub fn file_name(&self, format: Format) -> String {
        format!("{}.{}", self.name, format.extension())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(&self.headers).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Array of objects; key order follows the header order.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (h, c) in self.headers.iter().zip(r) {
                    m.insert(h.clone(), Value::String(c.clone()));
                }
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("string values");
        s.push('\n');
        s
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x}")
    }
}

pub fn cell(x: impl Display) -> String {
    x.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(["1", "x,y"]);
        t.push([cell(2), fmt_f64(0.1)]);
        t
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(sample().to_csv().unwrap(), "a,b\n1,\"x,y\"\n2,0.1\n");
    }

    #[test]
    fn json_keeps_header_order() {
        let j = sample().to_json();
        assert!(j.find("\"a\"").unwrap() < j.find("\"b\"").unwrap());
        let v: Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v[1]["b"], "0.1");
    }

    #[test]
    fn lookup_by_column() {
        assert_eq!(sample().get(0, "b"), Some("x,y"));
        assert_eq!(sample().get(0, "c"), None);
    }

    #[test]
    #[should_panic]
    fn width_checked() {
        Table::new("t", &["a"]).push(["1", "2"]);
    }
}
