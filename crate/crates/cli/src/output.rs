//! Tables and their CSV / JSON renderings.
//!
//! CSV: a fixed header, one line per row, numbers with 12 significant digits,
//! lists joined by `;`, empty cells for missing values, then `# key=value`
//! summary lines. JSON: `{"command", "columns", "rows": [{column: value}],
//! "summary": {key: value}}` with 17 significant digits and `null` for
//! missing or non-finite values.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    List(Vec<f64>),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell)).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        let mut out = String::from_utf8(bytes).expect("cells are UTF-8");
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k}={}\n", csv_cell(v)));
        }
        out
    }
}

/// `x` with `digits` significant digits, fixed notation for moderate
/// exponents and scientific otherwise, trailing zeros removed.
pub fn significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s.to_owned()
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Num(x) => significant(*x, 12),
        Cell::Text(s) => s.clone(),
        Cell::List(v) => v.iter().map(|x| significant(*x, 12)).collect::<Vec<_>>().join(";"),
        Cell::Empty => String::new(),
    }
}

fn json_number(x: f64) -> Box<RawValue> {
    if x.is_finite() {
        RawValue::from_string(format!("{x:.16e}")).expect("valid JSON number")
    } else {
        RawValue::from_string("null".into()).expect("valid JSON")
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_u64(*i),
            Cell::Num(x) => json_number(*x).serialize(s),
            Cell::Text(t) => s.serialize_str(t),
            Cell::List(v) => v.iter().map(|x| json_number(*x)).collect::<Vec<_>>().serialize(s),
            Cell::Empty => s.serialize_none(),
        }
    }
}

struct Row<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Summary<'a>(&'a [(String, Cell)]);

impl Serialize for Summary<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Row> = self.rows.iter().map(|r| Row(&self.columns, r)).collect();
        let mut st = s.serialize_struct("Table", 4)?;
        st.serialize_field("command", self.command)?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("rows", &rows)?;
        st.serialize_field("summary", &Summary(&self.summary))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.1021804152265841, 12), "0.102180415227");
        assert_eq!(significant(-2.5e-8, 12), "-2.5e-8");
        assert_eq!(significant(16384.0, 12), "16384");
        assert_eq!(significant(1.5e20, 12), "1.5e20");
        assert_eq!(significant(0.0, 12), "0");
    }

    #[test]
    fn json_round_trips_seventeen_digits() {
        let mut t = Table::new("mgf", &["x", "y"]);
        let x = 0.1 + 0.2;
        t.push(vec![Cell::Num(x), Cell::Empty]);
        let v: serde_json::Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v["rows"][0]["x"].as_f64().unwrap(), x);
        assert!(v["rows"][0]["y"].is_null());
    }
}
