use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Significant digits for real-valued CSV cells.
const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    /// Not applicable for this row.
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Rounds to nine significant digits and prints the shortest form that
/// reads back to the rounded value. Plain notation in `[1e-4, 1e15)`,
/// exponent notation outside it.
pub fn format_real(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses");
    let mag = rounded.abs();
    if rounded == 0.0 || (1e-4..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Real values of one column, `None` for text or empty cells.
    pub fn reals(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| r[c].as_real()).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush().map_err(|e| Error::io("<csv stream>", e))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// Writes `table` as UTF-8 CSV with a header row.
pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    table.write_csv(std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_real(200.133_333_333_3), "200.133333");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(0.1), "0.1");
        assert_eq!(format_real(1.234_567_891_23e-7), "1.23456789e-7");
        assert_eq!(format_real(1e-27), "1e-27");
        assert_eq!(format_real(-2.5e20), "-2.5e20");
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(f64::INFINITY), "inf");
        assert_eq!(format_real(123_456_789_012.0), "123456789000");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv_string().unwrap(), "a,b\n");
    }

    #[test]
    fn parse_back_matches() {
        let mut t = Table::new(&["name", "n", "value", "opt"]);
        t.push(vec!["x,y".into(), 3usize.into(), std::f64::consts::PI.into(), Cell::Empty]);
        t.push(vec!["z".into(), 4usize.into(), 6.02214076e23.into(), 1e-3.into()]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        emit_csv(&t, &path).unwrap();
        let mut rdr = csv::Reader::from_path(&path).unwrap();
        assert_eq!(rdr.headers().unwrap(), vec!["name", "n", "value", "opt"]);
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        for (row, rec) in t.rows.iter().zip(&rows) {
            for (cell, field) in row.iter().zip(rec.iter()) {
                assert_eq!(cell.render(), field);
                if let Cell::Real(v) = cell {
                    let back: f64 = field.parse().unwrap();
                    assert!((back - v).abs() <= 5e-9 * v.abs());
                }
            }
        }
        assert_eq!(&rows[0][0], "x,y");
        assert!(emit_csv(&t, &dir.path().join("no/such/dir.csv")).is_err());
    }
}
