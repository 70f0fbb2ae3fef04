//! Report model shared by the JSON and CSV writers.
//!
//! Every command builds one [`Report`]; both formats are rendered from it so
//! they carry identical numbers. Floats are written with 17 significant
//! digits, which round-trips every `f64`.

use std::io::{self, Write};

use serde_json::ser::Formatter;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    List(Vec<Cell>),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::from(*x),
            Cell::Num(x) => Value::String(fmt_f64(*x)),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::List(items) => Value::Array(items.iter().map(Cell::to_json).collect()),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::List(items) => items.iter().map(Cell::to_csv).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Ordered key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(&'static str, Cell)>);

impl Record {
    pub fn push(&mut self, key: &'static str, cell: Cell) -> &mut Self {
        self.0.push((key, cell));
        self
    }

    fn to_json(&self) -> Map<String, Value> {
        self.0
            .iter()
            .map(|(k, c)| (k.to_string(), c.to_json()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Record(Record),
    /// `meta` fields repeat on every CSV line and appear once in JSON next to
    /// a `rows` array.
    Table {
        meta: Record,
        rows: Vec<Record>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `{:.16e}`, with `inf`/`-inf` for infinities.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

pub fn write_report<W: Write>(report: &Report, format: Format, mut out: W) -> io::Result<()> {
    match format {
        Format::Json => {
            let value = match report {
                Report::Record(r) => Value::Object(r.to_json()),
                Report::Table { meta, rows } => {
                    let mut obj = meta.to_json();
                    obj.insert(
                        "rows".into(),
                        Value::Array(rows.iter().map(|r| Value::Object(r.to_json())).collect()),
                    );
                    Value::Object(obj)
                }
            };
            let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits);
            serde::Serialize::serialize(&value, &mut ser).map_err(io::Error::other)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            let (meta, rows) = match report {
                Report::Record(r) => (Record::default(), std::slice::from_ref(r)),
                Report::Table { meta, rows } => (meta.clone(), rows.as_slice()),
            };
            let header = meta
                .0
                .iter()
                .chain(rows.first().map_or(&[][..], |r| &r.0[..]));
            w.write_record(header.map(|(k, _)| *k))?;
            for row in rows {
                w.write_record(meta.0.iter().chain(row.0.iter()).map(|(_, c)| c.to_csv()))?;
            }
            w.flush()?;
        }
    }
    out.flush()
}
