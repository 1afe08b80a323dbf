//! CSV matrix ingestion and artifact writers.
//!
//! Files hold traits as rows and objects as columns unless `transpose` is
//! set. An optional header row labels the columns and an optional first
//! column labels the rows.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use centerlab_core::{DMatrix, DataMatrix};
use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Default significant digits for numeric text output. Enough to round-trip
/// any `f64`.
pub const DEFAULT_DIGITS: usize = 17;

const DOMAIN_LISTING_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Transform {
    #[default]
    None,
    Log10,
    /// `log10(x + 1)`, for counts.
    #[value(name = "log10-plus1")]
    Log10Plus1,
}

impl Transform {
    fn name(self) -> &'static str {
        match self {
            Transform::None => "none",
            Transform::Log10 => "log10",
            Transform::Log10Plus1 => "log10-plus1",
        }
    }

    fn admits(self, v: f64) -> bool {
        match self {
            Transform::None => true,
            Transform::Log10 => v > 0.0,
            Transform::Log10Plus1 => v >= 0.0,
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Transform::None => v,
            Transform::Log10 => v.log10(),
            Transform::Log10Plus1 => (v + 1.0).log10(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Headers {
    /// Detect a header row and label column from non-numeric cells.
    #[default]
    Auto,
    None,
    /// First line holds column labels.
    Row,
    /// First field of each line holds a row label.
    Col,
    Both,
}

#[derive(Debug, Clone)]
pub struct MatrixFile {
    pub path: PathBuf,
    /// File rows are objects rather than traits.
    pub transpose: bool,
    pub headers: Headers,
    pub delimiter: u8,
}

impl MatrixFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        MatrixFile {
            path: path.into(),
            transpose: false,
            headers: Headers::Auto,
            delimiter: b',',
        }
    }
}

/// A parsed matrix in traits × objects orientation with optional labels.
#[derive(Debug, Clone)]
pub struct LoadedMatrix {
    pub matrix: DataMatrix,
    pub trait_labels: Option<Vec<String>>,
    pub object_labels: Option<Vec<String>>,
}

fn is_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

pub fn load_matrix(file: &MatrixFile, transform: Transform) -> Result<LoadedMatrix> {
    let path = &file.path;
    let handle = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(file.delimiter)
        .trim(csv::Trim::All)
        .from_reader(handle);

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(CliError::Parse {
            path: path.clone(),
            line: 1,
            message: "no data rows".into(),
        });
    }

    let (has_row_header, has_col_header) = match file.headers {
        Headers::None => (false, false),
        Headers::Row => (true, false),
        Headers::Col => (false, true),
        Headers::Both => (true, true),
        Headers::Auto => {
            // An empty corner cell marks both a header row and a label column
            // even when the labels themselves are numeric.
            let corner_empty = records[0].1.get(0).is_some_and(str::is_empty);
            let col = corner_empty
                || records
                    .iter()
                    .skip(1)
                    .any(|(_, r)| r.get(0).is_some_and(|f| !is_numeric(f)));
            let skip = usize::from(col);
            let row = corner_empty || records[0].1.iter().skip(skip).any(|f| !is_numeric(f));
            (row, col)
        }
    };

    let skip = usize::from(has_col_header);
    let mut column_labels = None;
    let body = if has_row_header {
        let (_, first) = &records[0];
        column_labels = Some(first.iter().skip(skip).map(str::to_owned).collect::<Vec<_>>());
        &records[1..]
    } else {
        &records[..]
    };
    if body.is_empty() {
        return Err(CliError::Parse {
            path: path.clone(),
            line: records[0].0,
            message: "header row but no data rows".into(),
        });
    }

    let width = column_labels.as_ref().map_or(body[0].1.len() - skip, Vec::len);
    let mut row_labels = has_col_header.then(Vec::new);
    let mut values = Vec::with_capacity(body.len() * width);
    let mut bad = Vec::new();
    for (line, rec) in body {
        if rec.len() - skip != width {
            return Err(CliError::Parse {
                path: path.clone(),
                line: *line,
                message: format!("expected {width} values, found {}", rec.len() - skip),
            });
        }
        if let Some(labels) = row_labels.as_mut() {
            labels.push(rec[0].to_owned());
        }
        for (j, field) in rec.iter().skip(skip).enumerate() {
            let v: f64 = field.parse().map_err(|_| CliError::Parse {
                path: path.clone(),
                line: *line,
                message: format!("field {} is not a number: {field:?}", j + skip + 1),
            })?;
            if !v.is_finite() {
                return Err(CliError::Parse {
                    path: path.clone(),
                    line: *line,
                    message: format!("field {} is not finite: {field:?}", j + skip + 1),
                });
            }
            if !transform.admits(v) {
                bad.push(format!("line {line} field {} ({v})", j + skip + 1));
            }
            values.push(transform.apply(v));
        }
    }
    if !bad.is_empty() {
        let count = bad.len();
        let mut listing = bad
            .into_iter()
            .take(DOMAIN_LISTING_LIMIT)
            .collect::<Vec<_>>()
            .join(", ");
        if count > DOMAIN_LISTING_LIMIT {
            listing.push_str(", ...");
        }
        return Err(CliError::Domain {
            transform: transform.name(),
            count,
            listing,
        });
    }

    let m = DMatrix::from_row_slice(body.len(), width, &values);
    let (m, trait_labels, object_labels) = if file.transpose {
        (m.transpose(), column_labels, row_labels)
    } else {
        (m, row_labels, column_labels)
    };
    Ok(LoadedMatrix {
        matrix: DataMatrix::new(m)?,
        trait_labels,
        object_labels,
    })
}

/// Formats `v` with `digits` significant digits in scientific notation.
pub fn format_number(v: f64, digits: usize) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{:.*e}", digits.max(1) - 1, v)
}

/// Column-labeled numeric table writer.
pub struct TableWriter {
    digits: usize,
    delimiter: u8,
}

impl TableWriter {
    pub fn new(digits: usize, delimiter: u8) -> Self {
        TableWriter { digits, delimiter }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    fn open(&self, path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
        let f = File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(csv::WriterBuilder::new()
            .delimiter(self.delimiter)
            .from_writer(BufWriter::new(f)))
    }

    /// Writes `m` with an optional header row and label column.
    pub fn matrix(
        &self,
        path: &Path,
        m: &DMatrix<f64>,
        row_labels: Option<&[String]>,
        column_labels: Option<&[String]>,
    ) -> Result<()> {
        let mut w = self.open(path)?;
        if let Some(cols) = column_labels {
            let mut header = Vec::with_capacity(cols.len() + 1);
            if row_labels.is_some() {
                header.push(String::new());
            }
            header.extend(cols.iter().cloned());
            w.write_record(&header)?;
        }
        for i in 0..m.nrows() {
            let mut rec = Vec::with_capacity(m.ncols() + 1);
            if let Some(labels) = row_labels {
                rec.push(labels[i].clone());
            }
            rec.extend(m.row(i).iter().map(|&v| format_number(v, self.digits)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    /// Writes named columns of equal length under a header row.
    pub fn columns(&self, path: &Path, names: &[&str], cols: &[Vec<f64>]) -> Result<()> {
        let mut w = self.open(path)?;
        w.write_record(names)?;
        let len = cols.first().map_or(0, Vec::len);
        for i in 0..len {
            w.write_record(cols.iter().map(|c| format_number(c[i], self.digits)))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    /// Writes a label column followed by numeric columns.
    pub fn labeled_columns(&self, path: &Path, names: &[&str], labels: &[String], cols: &[Vec<f64>]) -> Result<()> {
        let mut w = self.open(path)?;
        w.write_record(names)?;
        for (i, label) in labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(cols.iter().map(|c| format_number(c[i], self.digits)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Reads a label file of `object,group` lines (object indices are 0-based)
/// and returns one group per object. A non-numeric first line is taken as a
/// header. Objects not listed get no group.
pub fn load_labels(path: &Path, objects: usize) -> Result<Vec<Option<String>>> {
    let handle = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(handle);
    let mut groups = vec![None; objects];
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(CliError::Parse {
                path: path.into(),
                line,
                message: format!("expected `object,group`, found {} fields", rec.len()),
            });
        }
        let Ok(index) = rec[0].parse::<usize>() else {
            if k == 0 {
                continue;
            }
            return Err(CliError::Parse {
                path: path.into(),
                line,
                message: format!("object index {:?} is not a non-negative integer", &rec[0]),
            });
        };
        if index >= objects {
            return Err(CliError::Parse {
                path: path.into(),
                line,
                message: format!("object index {index} out of range for {objects} objects"),
            });
        }
        groups[index] = Some(rec[1].to_owned());
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_csv(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn load(text: &str, transpose: bool, transform: Transform) -> Result<LoadedMatrix> {
        let f = temp_csv(text);
        let mut spec = MatrixFile::new(f.path());
        spec.transpose = transpose;
        load_matrix(&spec, transform)
    }

    #[test]
    fn plain_and_transposed() {
        let m = load("1,2,3\n4,5,6\n", false, Transform::None).unwrap();
        assert_eq!(
            m.matrix.as_matrix(),
            &DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.])
        );
        assert!(m.trait_labels.is_none() && m.object_labels.is_none());
        let t = load("1,2,3\n4,5,6", true, Transform::None).unwrap();
        assert_eq!(t.matrix.shape(), (3, 2));
        assert_eq!(t.matrix.get(2, 1), 6.0);
    }

    #[test]
    fn log10_plus1_values() {
        let m = load("0,9,99\n", false, Transform::Log10Plus1).unwrap();
        assert_eq!(m.matrix.to_rows(), vec![vec![0.0, 1.0, 2.0]]);
    }

    #[test]
    fn ragged_row_reports_line() {
        match load("1,2,3\n4,5\n", false, Transform::None) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn domain_violation_lists_cells() {
        match load("1,0\n-2,3\n", false, Transform::Log10) {
            Err(CliError::Domain { count, listing, .. }) => {
                assert_eq!(count, 2);
                assert!(listing.contains("line 1 field 2"));
                assert!(listing.contains("line 2 field 1"));
            }
            other => panic!("{other:?}"),
        }
        assert!(load("1,0\n", false, Transform::Log10Plus1).is_ok());
    }

    #[test]
    fn header_detection() {
        let m = load(",1908,1909\n0,1,2\n1,3,4\n", false, Transform::None).unwrap();
        assert_eq!(m.matrix.shape(), (2, 2));
        assert_eq!(m.object_labels.unwrap(), vec!["1908", "1909"]);
        assert_eq!(m.trait_labels.unwrap(), vec!["0", "1"]);

        // Numeric row labels under a named corner need an explicit choice.
        let f = temp_csv("age,1908,1909\n0,1,2\n1,3,4\n");
        let mut spec = MatrixFile::new(f.path());
        spec.headers = Headers::Both;
        assert_eq!(load_matrix(&spec, Transform::None).unwrap().matrix.shape(), (2, 2));

        let m = load("a,b\n1,2\n", false, Transform::None).unwrap();
        assert_eq!(m.object_labels.unwrap(), vec!["a", "b"]);
        assert!(m.trait_labels.is_none());

        let t = load(",g1,g2\ns1,1,2\ns2,3,4\ns3,5,6\n", true, Transform::None).unwrap();
        assert_eq!(t.matrix.shape(), (2, 3));
        assert_eq!(t.trait_labels.unwrap(), vec!["g1", "g2"]);
        assert_eq!(t.object_labels.unwrap(), vec!["s1", "s2", "s3"]);
    }

    #[test]
    fn non_numeric_cell_is_parse_error() {
        let f = temp_csv("1,2\n3,x\n");
        let mut spec = MatrixFile::new(f.path());
        spec.headers = Headers::None;
        assert!(matches!(
            load_matrix(&spec, Transform::None),
            Err(CliError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn write_then_read_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = DMatrix::from_row_slice(2, 3, &[0.1, -1.0 / 3.0, 1e-300, 2.5e10, -0.0, std::f64::consts::PI]);
        TableWriter::new(DEFAULT_DIGITS, b',')
            .matrix(&path, &m, None, None)
            .unwrap();
        let back = load_matrix(&MatrixFile::new(&path), Transform::None).unwrap();
        assert_eq!(back.matrix.as_matrix(), &m);
    }

    #[test]
    fn labels_file() {
        let f = temp_csv("object,group\n0,early\n2,late\n");
        let g = load_labels(f.path(), 3).unwrap();
        assert_eq!(g, vec![Some("early".into()), None, Some("late".into())]);
        assert!(load_labels(f.path(), 2).is_err());
    }
}
