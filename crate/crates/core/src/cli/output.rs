//! Tabular output as CSV or JSON.

use std::io::Write;

use serde_json::{json, Map, Value};

use super::config::Format;
use super::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> Result<String, CliError> {
        match self {
            Cell::Int(v) => Ok(v.to_string()),
            Cell::Text(s) => Ok(s.clone()),
            Cell::Num(v) if v.is_nan() => Err(CliError::Output("refusing to serialize NaN".into())),
            Cell::Num(v) if *v == f64::INFINITY => Ok("inf".into()),
            Cell::Num(v) if *v == f64::NEG_INFINITY => Ok("-inf".into()),
            // Debug gives the shortest round-tripping form and switches to exponents at the extremes.
            Cell::Num(v) => Ok(format!("{v:?}")),
        }
    }

    fn to_json(&self) -> Result<Value, CliError> {
        match self {
            Cell::Int(v) => Ok(json!(v)),
            Cell::Num(v) if v.is_finite() => Ok(json!(v)),
            other => Ok(Value::String(other.render()?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns).map_err(|e| CliError::Output(e.to_string()))?;
        for row in &self.rows {
            let rendered = row.iter().map(Cell::render).collect::<Result<Vec<_>, _>>()?;
            w.write_record(&rendered).map_err(|e| CliError::Output(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn write_json<W: Write>(&self, mut out: W, config: &Value, seed: u64) -> Result<(), CliError> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut obj = Map::new();
            for (name, cell) in self.columns.iter().zip(row) {
                obj.insert(name.clone(), cell.to_json()?);
            }
            rows.push(Value::Object(obj));
        }
        let doc = json!({
            "meta": {"config": config, "seed": seed, "version": env!("CARGO_PKG_VERSION")},
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Output(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn write<W: Write>(&self, out: W, format: Format, config: &Value, seed: u64) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out, config, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["x", "value", "hits"]);
        t.push(vec![0.1.into(), f64::INFINITY.into(), 3u64.into()]);
        t.push(vec![(-2.5).into(), 1e-300.into(), 0u64.into()]);
        t
    }

    #[test]
    fn csv_uses_lf_and_inf_literal() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,value,hits\n0.1,inf,3\n-2.5,1e-300,0\n");
    }

    #[test]
    fn floats_round_trip_through_csv() {
        let mut t = Table::new(["v"]);
        let values = [std::f64::consts::PI, 1.0 / 3.0, -7.0e-17, 123456789.123];
        for v in values {
            t.push(vec![v.into()]);
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let parsed: Vec<f64> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.parse().unwrap())
            .collect();
        assert_eq!(parsed, values);
    }

    #[test]
    fn nan_is_an_error() {
        let mut t = Table::new(["v"]);
        t.push(vec![f64::NAN.into()]);
        assert!(t.write_csv(Vec::new()).is_err());
    }

    #[test]
    fn json_has_meta_and_rows() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf, &json!({"seed": 4}), 4).unwrap();
        let doc: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc["meta"]["seed"], 4);
        assert_eq!(doc["meta"]["config"]["seed"], 4);
        assert_eq!(doc["rows"][0]["value"], "inf");
        assert_eq!(doc["rows"][1]["hits"], 0);
    }
}
