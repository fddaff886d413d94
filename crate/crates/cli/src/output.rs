//! Tabular output in CSV or JSON.
//!
//! Floats are written with 17 significant digits in exponent notation so
//! the same run always produces the same bytes.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => {
                let raw = RawValue::from_string(fmt_num(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Cell::Num(_) => s.serialize_none(),
            Cell::Int(n) => s.serialize_u64(*n),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    fn records(&self) -> Records<'_> {
        Records(self)
    }
}

struct Record<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Records<'a>(&'a Table);

impl Serialize for Records<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for row in &self.0.rows {
            seq.serialize_element(&Record(&self.0.columns, row))?;
        }
        seq.end()
    }
}

struct Named<'a>(&'a [Table]);

impl Serialize for Named<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for t in self.0 {
            map.serialize_entry(&t.name, &t.records())?;
        }
        map.end()
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    /// Single-row result, emitted as a JSON object.
    Record(Table),
    Table(Table),
    /// Several tables: sections on standard output, one file each under
    /// an output directory.
    Tables(Vec<Table>),
}

fn json_line<T: Serialize>(value: &T, w: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer(&mut *w, value).map_err(io::Error::other)?;
    writeln!(w)
}

fn write_table(t: &Table, record: bool, format: Format, w: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => t.write_csv(w),
        Format::Json if record && t.rows.len() == 1 => json_line(&Record(&t.columns, &t.rows[0]), w),
        Format::Json => json_line(&t.records(), w),
    }
}

pub fn emit(output: &Output, format: Format, w: &mut dyn Write) -> io::Result<()> {
    match output {
        Output::Record(t) => write_table(t, true, format, w),
        Output::Table(t) => write_table(t, false, format, w),
        Output::Tables(ts) => match format {
            Format::Csv => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        writeln!(w)?;
                    }
                    writeln!(w, "# {}", t.name)?;
                    t.write_csv(w)?;
                }
                Ok(())
            }
            Format::Json => json_line(&Named(ts), w),
        },
    }
}

/// Writes to `path`; multi-table output treats `path` as a directory.
/// Returns the files written.
pub fn emit_to_path(output: &Output, format: Format, path: &Path) -> io::Result<Vec<std::path::PathBuf>> {
    match output {
        Output::Tables(ts) => {
            fs::create_dir_all(path)?;
            let mut written = Vec::with_capacity(ts.len());
            for t in ts {
                let file = path.join(format!("{}.{}", t.name, format.extension()));
                let mut buf = Vec::new();
                write_table(t, false, format, &mut buf)?;
                fs::write(&file, buf)?;
                written.push(file);
            }
            Ok(written)
        }
        single => {
            let mut buf = Vec::new();
            emit(single, format, &mut buf)?;
            fs::write(path, buf)?;
            Ok(vec![path.to_path_buf()])
        }
    }
}
