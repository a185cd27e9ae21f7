use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::logvalue::LogValue;

/// Rows of strings under a fixed header, with optional `#` preamble lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub preamble: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            preamble: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Values of one column, in row order.
    pub fn values(&self, name: &str) -> Vec<&str> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r[i].as_str()).collect(),
            None => Vec::new(),
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for line in &self.preamble {
            writeln!(w, "# {line}").map_err(|source| Error::Io {
                path: "<output>".into(),
                source,
            })?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.header)?;
        for r in &self.rows {
            csv.write_record(r)?;
        }
        csv.flush().map_err(|source| Error::Io {
            path: "<output>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn write_path(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(std::io::BufWriter::new(file))
    }
}

/// Shortest decimal that reads back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// `v` rounded to 15 significant digits, which hides the last-bit noise
/// of `exp(log v)`.
pub fn num15(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return num(v);
    }
    num(format!("{v:.14e}").parse::<f64>().expect("formatted float"))
}

/// Linear value (to 15 digits) and exact log of a log-domain quantity.
pub fn log_pair(v: LogValue) -> [String; 2] {
    [num15(v.value()), num(v.ln())]
}

pub fn opt_log_pair(v: Option<LogValue>) -> [String; 2] {
    match v {
        Some(v) => log_pair(v),
        None => [String::new(), String::new()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456789.0, 2f64.sqrt()] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(18.0), "18");
        assert_eq!(num15(250.9999999999999), "251");
        assert_eq!(num15(0.1 + 0.2), "0.3");
    }

    #[test]
    fn header_only_output() {
        let mut t = Table::new(&["a", "b"]);
        t.preamble.push("note".into());
        assert_eq!(t.to_csv_string().unwrap(), "# note\na,b\n");
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv_string().unwrap(), "# note\na,b\n1,\"x,y\"\n");
    }
}
