//! Series ingestion and report / table serialization.
//!
//! Input files are delimited text: one value per line, or `index,value`
//! pairs. Commas and whitespace both delimit; lines starting with `#` are
//! comments. Output floats use Rust's shortest round-trip formatting, so every
//! written number reads back bit-identical and identical inputs produce
//! identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ConfidenceInterval, EstimationReport, IndexWindow, TimeSeries};
use crate::simulate::{CoverageRow, CoverageTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesFormat {
    /// Decide from the number of fields on the first data line.
    #[default]
    Auto,
    /// One value per line on the window `1..=n`.
    SingleColumn,
    /// `index,value` pairs over a contiguous index run.
    TwoColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_value(path: &Path, line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_error(path, line, format!("not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(parse_error(path, line, format!("non-finite value: {field:?}")));
    }
    Ok(v)
}

/// Parses series text; `path` only labels diagnostics.
pub fn parse_series<R: BufRead>(reader: R, path: &Path, format: SeriesFormat) -> Result<TimeSeries> {
    let mut format = format;
    let mut first_index: Option<i64> = None;
    let mut values = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = fields(trimmed).collect();
        if format == SeriesFormat::Auto {
            format = match cols.len() {
                1 => SeriesFormat::SingleColumn,
                2 => SeriesFormat::TwoColumn,
                n => {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!("expected 1 or 2 fields, found {n}"),
                    ))
                }
            };
        }
        match format {
            SeriesFormat::SingleColumn => {
                if cols.len() != 1 {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!("expected 1 field, found {}", cols.len()),
                    ));
                }
                values.push(parse_value(path, line_no, cols[0])?);
            }
            SeriesFormat::TwoColumn => {
                if cols.len() != 2 {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!("expected 2 fields, found {}", cols.len()),
                    ));
                }
                let index: i64 = cols[0].parse().map_err(|_| {
                    parse_error(path, line_no, format!("not an integer index: {:?}", cols[0]))
                })?;
                let start = *first_index.get_or_insert(index);
                let expected = start + values.len() as i64;
                if index != expected {
                    return Err(Error::NonContiguousIndex {
                        path: path.to_path_buf(),
                        line: line_no,
                        expected,
                        found: index,
                    });
                }
                values.push(parse_value(path, line_no, cols[1])?);
            }
            SeriesFormat::Auto => unreachable!("resolved above"),
        }
    }

    if values.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    let window = IndexWindow::with_len(first_index.unwrap_or(1), values.len())?;
    TimeSeries::new(window, values)
}

pub fn load_series(path: impl AsRef<Path>, format: SeriesFormat) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    parse_series(BufReader::new(file), path, format)
}

/// Two-column `index,value` text that [`load_series`] reads back exactly.
pub fn write_series<W: Write>(series: &TimeSeries, mut out: W) -> Result<()> {
    let mut buf = String::from("# index,value\n");
    for (t, y) in series.iter() {
        writeln!(buf, "{t},{y}").expect("writing to a String");
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Serialized form of an [`EstimationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tau_hat: i64,
    pub rate_hat: f64,
    pub bandwidth: usize,
    pub interval: ConfidenceInterval,
    pub distribution: Vec<DistributionPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionPoint {
    pub index: i64,
    pub trend: f64,
    pub mass: f64,
}

impl From<&EstimationReport> for ReportDocument {
    fn from(report: &EstimationReport) -> Self {
        let distribution = report
            .trend_hat
            .iter()
            .zip(report.distribution.mass())
            .map(|((index, trend), &mass)| DistributionPoint { index, trend, mass })
            .collect();
        Self {
            tau_hat: report.tau_hat,
            rate_hat: report.rate_hat,
            bandwidth: report.bandwidth,
            interval: report.interval,
            distribution,
        }
    }
}

/// `index,trend_hat,mass,log_mass` rows; `log_mass` is empty where mass is 0.
pub fn distribution_csv<'a>(points: impl IntoIterator<Item = &'a DistributionPoint>) -> String {
    let mut buf = String::from("index,trend_hat,mass,log_mass\n");
    for p in points {
        if p.mass > 0.0 {
            writeln!(buf, "{},{},{},{}", p.index, p.trend, p.mass, p.mass.ln())
        } else {
            writeln!(buf, "{},{},{},", p.index, p.trend, p.mass)
        }
        .expect("writing to a String");
    }
    buf
}

pub fn write_report<W: Write>(report: &EstimationReport, format: OutputFormat, mut out: W) -> Result<()> {
    let doc = ReportDocument::from(report);
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
        }
        OutputFormat::Csv => out.write_all(distribution_csv(&doc.distribution).as_bytes())?,
    }
    Ok(())
}

pub fn read_report<R: Read>(reader: R) -> Result<ReportDocument> {
    Ok(serde_json::from_reader(reader)?)
}

pub fn write_coverage_table<W: Write>(table: &CoverageTable, format: OutputFormat, mut out: W) -> Result<()> {
    let mut rows = table.rows.clone();
    rows.sort_by_key(|r| r.bandwidth);
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &CoverageTable { rows })?;
            out.write_all(b"\n")?;
        }
        OutputFormat::Csv => {
            let mut buf = String::from("h,coverage_rate,mean_interval_length\n");
            for r in rows {
                writeln!(
                    buf,
                    "{},{},{}",
                    r.bandwidth, r.coverage_rate, r.mean_interval_length
                )
                .expect("writing to a String");
            }
            out.write_all(buf.as_bytes())?;
        }
    }
    Ok(())
}

fn csv_rows<R: BufRead>(reader: R, path: &Path, width: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if cols.len() != width {
            return Err(parse_error(
                path,
                i + 1,
                format!("expected {width} fields, found {}", cols.len()),
            ));
        }
        rows.push((i + 1, cols));
    }
    Ok(rows)
}

fn parse_field<T: FromStr>(path: &Path, line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| parse_error(path, line, format!("bad field {field:?}")))
}

/// Reads the CSV layout written by [`write_coverage_table`].
pub fn read_coverage_table_csv<R: BufRead>(reader: R) -> Result<CoverageTable> {
    let path = PathBuf::from("<coverage table>");
    let rows = csv_rows(reader, &path, 3)?
        .into_iter()
        .map(|(line, c)| {
            Ok(CoverageRow {
                bandwidth: parse_field(&path, line, &c[0])?,
                coverage_rate: parse_field(&path, line, &c[1])?,
                mean_interval_length: parse_field(&path, line, &c[2])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CoverageTable { rows })
}

/// Interval endpoints for one bandwidth of a sweep over a single series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointRow {
    pub bandwidth: usize,
    pub left_end: i64,
    pub right_end: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointsTable {
    pub level: f64,
    pub rows: Vec<EndpointRow>,
}

impl EndpointsTable {
    pub fn from_reports(reports: &[EstimationReport]) -> Self {
        let mut rows: Vec<EndpointRow> = reports
            .iter()
            .map(|r| EndpointRow {
                bandwidth: r.bandwidth,
                left_end: r.interval.left,
                right_end: r.interval.right,
            })
            .collect();
        rows.sort_by_key(|r| r.bandwidth);
        Self {
            level: reports.first().map_or(0.95, |r| r.interval.level),
            rows,
        }
    }
}

pub fn write_endpoints_table<W: Write>(
    table: &EndpointsTable,
    format: OutputFormat,
    mut out: W,
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, table)?;
            out.write_all(b"\n")?;
        }
        OutputFormat::Csv => {
            let mut buf = String::from("h,left_end,right_end\n");
            for r in &table.rows {
                writeln!(buf, "{},{},{}", r.bandwidth, r.left_end, r.right_end).expect("writing to a String");
            }
            out.write_all(buf.as_bytes())?;
        }
    }
    Ok(())
}

/// Reads the CSV layout written by [`write_endpoints_table`]; the level is
/// not stored in CSV and must be supplied.
pub fn read_endpoints_table_csv<R: BufRead>(reader: R, level: f64) -> Result<EndpointsTable> {
    let path = PathBuf::from("<endpoints table>");
    let rows = csv_rows(reader, &path, 3)?
        .into_iter()
        .map(|(line, c)| {
            Ok(EndpointRow {
                bandwidth: parse_field(&path, line, &c[0])?,
                left_end: parse_field(&path, line, &c[1])?,
                right_end: parse_field(&path, line, &c[2])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EndpointsTable { level, rows })
}
