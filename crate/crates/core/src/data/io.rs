//! Readers and writers for the on-disk formats: comma-separated tables,
//! `label index:value` sparse lines, and group files (one id per line).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::data::matrix::{CscMatrix, DesignMatrix};
use crate::data::response::ResponseVector;
use crate::engine::Family;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseColumn {
    Name(String),
    Index(usize),
    Last,
}

impl ResponseColumn {
    /// Interprets a bare integer as a 0-based index, anything else as a name.
    pub fn parse(s: &str) -> Self {
        s.parse::<usize>()
            .map(ResponseColumn::Index)
            .unwrap_or_else(|_| ResponseColumn::Name(s.to_string()))
    }
}

/// A loaded dataset plus the predictor names from the header, if any.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub x: DesignMatrix,
    pub y: ResponseVector,
    pub names: Option<Vec<String>>,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_csv(
    path: impl AsRef<Path>,
    response: &ResponseColumn,
    has_header: bool,
    family: Family,
) -> Result<Loaded> {
    let text = read_to_string(path.as_ref())?;
    parse_csv(&text, response, has_header, family)
}

/// Header (if requested) and numeric rows of a rectangular CSV table.
struct Table {
    header: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
    width: usize,
}

fn parse_table(text: &str, has_header: bool) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header: Option<Vec<String>> = if has_header {
        match records.next() {
            Some(rec) => Some(
                rec.map_err(|e| Error::data(e.to_string()))?
                    .iter()
                    .map(str::to_string)
                    .collect(),
            ),
            None => return Err(Error::data("file is empty")),
        }
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = header.as_ref().map(Vec::len);
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::data(e.to_string()))?;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(Error::data(format!(
                "ragged row {i}: {} fields, expected {expected}",
                rec.len()
            )));
        }
        let mut row = Vec::with_capacity(expected);
        for (j, field) in rec.iter().enumerate() {
            let v = field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                Error::Cell {
                    row: i,
                    column: j,
                    message: format!("cannot parse {field:?} as a finite decimal number"),
                }
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let width = width.ok_or_else(|| Error::data("file has no data rows"))?;
    Ok(Table { header, rows, width })
}

pub fn parse_csv(
    text: &str,
    response: &ResponseColumn,
    has_header: bool,
    family: Family,
) -> Result<Loaded> {
    let Table { header, rows, width } = parse_table(text, has_header)?;
    if rows.len() < 2 {
        return Err(Error::data(format!("need at least 2 data rows, got {}", rows.len())));
    }
    if width < 2 {
        return Err(Error::data("need a response column and at least one predictor"));
    }

    let target = match response {
        ResponseColumn::Last => width - 1,
        ResponseColumn::Index(k) if *k < width => *k,
        ResponseColumn::Index(k) => {
            return Err(Error::usage(format!("response column {k} not found ({width} columns)")))
        }
        ResponseColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::usage(format!("response column {name:?} not found")))?,
    };

    let n = rows.len();
    let p = width - 1;
    let mut data = vec![0.0; n * p];
    let mut y = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let mut k = 0;
        for (j, &v) in row.iter().enumerate() {
            if j == target {
                y.push(v);
            } else {
                data[k * n + i] = v;
                k += 1;
            }
        }
    }
    let names = header.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|&(j, _)| j != target)
            .map(|(_, s)| s)
            .collect()
    });
    Ok(Loaded {
        x: DesignMatrix::dense(n, p, data)?,
        y: ResponseVector::new(y, family)?,
        names,
    })
}

pub fn load_sparse(path: impl AsRef<Path>, family: Family) -> Result<Loaded> {
    let text = read_to_string(path.as_ref())?;
    parse_sparse(&text, family)
}

pub fn parse_sparse(text: &str, family: Family) -> Result<Loaded> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut p = 0;
    for (line_no, line) in text.lines().enumerate() {
        let mut tokens = line.split_whitespace();
        let Some(label) = tokens.next() else { continue };
        let label = label.parse::<f64>().map_err(|_| {
            Error::data(format!("line {}: cannot parse label {label:?}", line_no + 1))
        })?;
        let mut entries = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let bad = || Error::data(format!("line {}: cannot parse token {tok:?}", line_no + 1));
            let (idx, val) = tok.split_once(':').ok_or_else(bad)?;
            let idx: usize = idx.parse().map_err(|_| bad())?;
            let val: f64 = val.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(bad)?;
            if idx == 0 {
                return Err(Error::data(format!("line {}: indices are 1-based", line_no + 1)));
            }
            if idx <= last {
                return Err(Error::data(format!(
                    "line {}: index {idx} is not strictly increasing",
                    line_no + 1
                )));
            }
            last = idx;
            p = p.max(idx);
            if val != 0.0 {
                entries.push((idx - 1, val));
            }
        }
        labels.push(label);
        rows.push(entries);
    }
    if rows.is_empty() {
        return Err(Error::data("sparse file is empty"));
    }
    let csc = CscMatrix::from_row_entries(p, &rows);
    Ok(Loaded {
        x: DesignMatrix::sparse(rows.len(), p, csc)?,
        y: ResponseVector::new(labels, family)?,
        names: None,
    })
}

/// Writes predictors followed by the response as the last column.
pub fn write_csv(
    path: impl AsRef<Path>,
    x: &DesignMatrix,
    y: &[f64],
    names: Option<&[String]>,
) -> Result<()> {
    let mut out = String::new();
    if let Some(names) = names {
        out.push_str(&names.join(","));
        out.push_str(",y\n");
    }
    for i in 0..x.n() {
        for j in 0..x.p() {
            write!(out, "{},", x.get(i, j)).unwrap();
        }
        writeln!(out, "{}", y[i]).unwrap();
    }
    write_file(path.as_ref(), &out)
}

pub fn write_sparse(path: impl AsRef<Path>, x: &DesignMatrix, y: &[f64]) -> Result<()> {
    let mut out = String::new();
    for i in 0..x.n() {
        write!(out, "{}", y[i]).unwrap();
        for j in 0..x.p() {
            let v = x.get(i, j);
            if v != 0.0 {
                write!(out, " {}:{}", j + 1, v).unwrap();
            }
        }
        out.push('\n');
    }
    write_file(path.as_ref(), &out)
}

pub fn load_groups(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let text = read_to_string(path.as_ref())?;
    parse_groups(&text)
}

pub fn parse_groups(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| Error::data(format!("groups line {}: {l:?} is not a group id", i + 1)))
        })
        .collect()
}

pub fn write_groups(path: impl AsRef<Path>, group_of: &[usize]) -> Result<()> {
    let mut out = String::new();
    for g in group_of {
        writeln!(out, "{g}").unwrap();
    }
    write_file(path.as_ref(), &out)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a table with no response column: every column is a feature.
pub fn load_matrix_csv(path: impl AsRef<Path>, has_header: bool) -> Result<(DesignMatrix, Option<Vec<String>>)> {
    let text = read_to_string(path.as_ref())?;
    let Table { header, rows, .. } = parse_table(&text, has_header)?;
    Ok((DesignMatrix::from_rows(&rows)?, header))
}

/// Reads a square matrix (no response column), e.g. a covariance.
pub fn load_square_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let text = read_to_string(path.as_ref())?;
    let Table { rows, width, .. } = parse_table(&text, has_header)?;
    if rows.len() != width {
        return Err(Error::data(format!(
            "expected a square matrix, got {} rows of {width} columns",
            rows.len()
        )));
    }
    Ok(rows)
}
