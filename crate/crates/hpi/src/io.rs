//! CSV readers and writers.
//!
//! Raw series files have a `DATE,VALUE` header (the value column may carry a series
//! id instead of `VALUE`), ISO dates, and `.` or an empty cell for missing values.
//! Wide HPI files have a `QUARTER,<country>,...` header with `YYYY-Qn` quarters.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use hpi_core::data::{CountryDataset, Date, DatedSeries, Indicator, Quarter, QuarterlySeries};

use crate::error::{Error, Result};

fn read_text(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingFile { path: path.into() });
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Err(Error::EmptyFile { path: path.into() });
    }
    Ok(text)
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "."
}

/// Reads a two-column dated series at its native frequency.
pub fn parse_series_csv(path: &Path) -> Result<DatedSeries> {
    let text = read_text(path)?;
    parse_series_text(&text, path)
}

pub fn parse_series_text(text: &str, path: &Path) -> Result<DatedSeries> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.into(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.len() != 2 {
        return Err(parse_err(1, format!("expected header DATE,VALUE, found {} columns", header.len())));
    }
    let first = header[0].to_ascii_lowercase();
    if first != "date" && first != "observation_date" {
        return Err(parse_err(1, format!("expected DATE as first column, found '{}'", &header[0])));
    }
    let mut points = Vec::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows += 1;
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let date: Date = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid date '{}'", &record[0])))?;
        if is_missing(&record[1]) {
            continue;
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid number '{}'", &record[1])))?;
        if !value.is_finite() {
            return Err(parse_err(line, format!("non-finite value '{}'", &record[1])));
        }
        points.push((date, value));
    }
    if rows == 0 {
        return Err(Error::EmptyFile { path: path.into() });
    }
    Ok(DatedSeries::from_unsorted(points))
}

/// Reads a wide quarterly HPI table into one series per country column.
pub fn read_wide_hpi(path: &Path) -> Result<BTreeMap<String, QuarterlySeries>> {
    let text = read_text(path)?;
    parse_wide_hpi(&text, path)
}

pub fn parse_wide_hpi(text: &str, path: &Path) -> Result<BTreeMap<String, QuarterlySeries>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.into(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.len() < 2 || !header[0].eq_ignore_ascii_case("quarter") {
        return Err(parse_err(1, "expected header QUARTER,<country>,...".into()));
    }
    let countries: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut columns: Vec<Vec<(Quarter, f64)>> = vec![Vec::new(); countries.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let quarter: Quarter = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid quarter '{}'", &record[0])))?;
        for (j, cell) in record.iter().skip(1).enumerate() {
            if is_missing(cell) {
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, format!("invalid number '{cell}' for {}", countries[j])))?;
            columns[j].push((quarter, v));
        }
    }
    let mut out = BTreeMap::new();
    for (country, mut values) in countries.into_iter().zip(columns) {
        values.sort_by_key(|(q, _)| *q);
        let series = QuarterlySeries::from_values(country.clone(), Indicator::Hpi, values)
            .map_err(|e| Error::Format {
                path: path.into(),
                message: format!("column {country}: {e}"),
            })?;
        out.insert(country, series);
    }
    Ok(out)
}

/// Rows of strings to CSV bytes.
pub fn csv_bytes<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref())).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes via a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

/// `quarter,y,<feature...>`.
pub fn dataset_csv(data: &CountryDataset) -> Vec<u8> {
    let mut header = vec!["quarter", "y"];
    header.extend(data.feature_names().iter().map(String::as_str));
    let rows: Vec<Vec<String>> = (0..data.n())
        .map(|i| {
            let mut row = vec![data.quarters()[i].to_string(), fmt_f64(data.y()[i])];
            row.extend(data.x().row(i).iter().map(|v| fmt_f64(*v)));
            row
        })
        .collect();
    csv_bytes(&header, &rows)
}
