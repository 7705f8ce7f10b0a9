use anyhow::Result;
use serde_json::{Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn full(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn display(&self) -> String {
        match self {
            Cell::Num(x) => sig6(*x),
            _ => self.full(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // NaN/inf have no JSON form
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// Six significant digits, fixed notation for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..6).contains(&mag) {
        format!("{:.*}", (5 - mag) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// Tabular rows plus the structured JSON document for one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// `None` renders the rows as an array of objects.
    pub json: Option<Value>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let doc = match &self.json {
                    Some(v) => v.clone(),
                    None => Value::Array(self.rows.iter().map(|r| self.row_object(r)).collect()),
                };
                serde_json::to_string_pretty(&doc)? + "\n"
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::full))?;
                }
                String::from_utf8(w.into_inner()?)?
            }
            Format::Table => self.table(),
        })
    }

    fn row_object(&self, row: &[Cell]) -> Value {
        let map: Map<String, Value> = self.columns.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
        Value::Object(map)
    }

    fn table(&self) -> String {
        let mut out = String::new();
        if self.rows.len() == 1 {
            let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for (name, cell) in self.columns.iter().zip(&self.rows[0]) {
                out += &format!("{name:<width$}  {}\n", cell.display());
            }
            return out;
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::display).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap())
            .collect();
        let line = |items: Vec<&str>| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
                + "\n"
        };
        out += &line(self.columns.clone());
        for r in &cells {
            out += &line(r.iter().map(String::as_str).collect());
        }
        out
    }
}
