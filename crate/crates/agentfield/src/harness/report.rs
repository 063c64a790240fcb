//! CSV report files: the single interchange format of the toolkit.
//!
//! Every file starts with a stamp line `# config=<hash> seed=<seed>`
//! followed by a header row and comma-separated values. Values never
//! contain commas (numbers and short labels only), so no quoting is needed.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::RunStamp;

pub struct ReportWriter {
    dir: PathBuf,
    stamp: RunStamp,
}

impl ReportWriter {
    pub fn new(dir: impl AsRef<Path>, stamp: RunStamp) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, stamp })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write `<dir>/<name>` with the stamp header; returns the path.
    pub fn write_csv<I>(&self, name: &str, columns: &[&str], rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.dir.join(name);
        let mut text = String::new();
        text.push_str(&self.stamp.header_line());
        text.push('\n');
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            if row.len() != columns.len() {
                return Err(Error::Input(format!(
                    "row with {} fields in a {}-column table '{name}'",
                    row.len(),
                    columns.len()
                )));
            }
            text.push_str(&row.join(","));
            text.push('\n');
        }
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Shortest-roundtrip decimal form; empty for missing values so tables stay
/// rectangular.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

/// A parsed report file.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub path: PathBuf,
    pub stamp_line: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    fn format_err(&self, reason: impl Into<String>) -> Error {
        Error::Format { path: self.path.display().to_string(), reason: reason.into() }
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| self.format_err(format!("missing column '{name}'")))
    }

    /// Column parsed as f64; empty cells become NaN.
    pub fn f64_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column(name)?;
        self.rows
            .iter()
            .map(|row| {
                let cell = &row[idx];
                if cell.is_empty() {
                    Ok(f64::NAN)
                } else {
                    cell.parse::<f64>().map_err(|_| {
                        self.format_err(format!("non-numeric value '{cell}' in column '{name}'"))
                    })
                }
            })
            .collect()
    }

    pub fn str_column(&self, name: &str) -> Result<Vec<&str>> {
        let idx = self.column(name)?;
        Ok(self.rows.iter().map(|row| row[idx].as_str()).collect())
    }
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<CsvTable> {
    let path = path.as_ref().to_path_buf();
    let text = fs::read_to_string(&path)?;
    let mut lines = text.lines();
    let fail = |reason: &str| Error::Format {
        path: path.display().to_string(),
        reason: reason.to_string(),
    };
    let stamp_line = lines.next().ok_or_else(|| fail("empty file"))?.to_string();
    if !stamp_line.starts_with('#') {
        return Err(fail("missing stamp header line"));
    }
    let columns: Vec<String> = lines
        .next()
        .ok_or_else(|| fail("missing column header"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        if row.len() != columns.len() {
            return Err(fail(&format!(
                "row with {} fields, expected {}",
                row.len(),
                columns.len()
            )));
        }
        rows.push(row);
    }
    Ok(CsvTable { path, stamp_line, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stamp() -> RunStamp {
        RunStamp { config_hash: "0011223344556677".into(), master_seed: 42 }
    }

    #[test]
    fn roundtrip_with_stamp_header() {
        let dir = tempfile::tempdir().unwrap();
        let writer = ReportWriter::new(dir.path(), stamp()).unwrap();
        let path = writer
            .write_csv(
                "table.csv",
                &["n", "value"],
                vec![
                    vec!["50".to_string(), fmt_f64(0.125)],
                    vec!["1000".to_string(), fmt_f64(f64::NAN)],
                ],
            )
            .unwrap();
        let table = parse_csv(&path).unwrap();
        assert!(table.stamp_line.contains("config=0011223344556677"));
        assert!(table.stamp_line.contains("seed=42"));
        assert_eq!(table.columns, vec!["n", "value"]);
        let values = table.f64_column("value").unwrap();
        assert_eq!(values[0], 0.125);
        assert!(values[1].is_nan());
        assert_eq!(table.str_column("n").unwrap(), vec!["50", "1000"]);
    }

    #[test]
    fn missing_column_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let writer = ReportWriter::new(dir.path(), stamp()).unwrap();
        let path = writer.write_csv("t.csv", &["a"], vec![vec!["1".to_string()]]).unwrap();
        let table = parse_csv(&path).unwrap();
        let err = table.column("missing").unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err}");
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "no stamp\na,b\n1,2\n").unwrap();
        assert!(parse_csv(&p).is_err());
        let p2 = dir.path().join("ragged.csv");
        std::fs::write(&p2, "# config=x seed=0\na,b\n1\n").unwrap();
        assert!(parse_csv(&p2).is_err());
    }

    #[test]
    fn ragged_rows_rejected_on_write() {
        let dir = tempfile::tempdir().unwrap();
        let writer = ReportWriter::new(dir.path(), stamp()).unwrap();
        let err = writer.write_csv("t.csv", &["a", "b"], vec![vec!["1".to_string()]]);
        assert!(err.is_err());
    }

    #[test]
    fn float_formatting_roundtrips() {
        let v = 0.1 + 0.2;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        assert_eq!(fmt_f64(f64::NAN), "");
    }
}
