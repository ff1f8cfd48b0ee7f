//! Reading a column of numbers from CSV or JSON-lines files.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl`/`.ndjson` are JSON lines; anything else is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: no column {column:?}; available: {available}", path.display())]
    MissingColumn {
        path: PathBuf,
        column: String,
        available: String,
    },
    #[error("{}: {count} columns ({available}); choose one with --column", path.display())]
    AmbiguousColumn {
        path: PathBuf,
        count: usize,
        available: String,
    },
    #[error("{}: line {line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

/// Values of one column, in file order. Non-numeric or non-finite entries
/// are rejected with their line number.
pub fn ingest(path: &Path, format: Option<Format>, column: Option<&str>) -> Result<Vec<f64>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format.unwrap_or_else(|| Format::from_path(path)) {
        Format::Csv => read_csv(path, file, column),
        Format::Jsonl => read_jsonl(path, file, column),
    }
}

fn number(path: &Path, line: u64, raw: &str, what: &str) -> Result<f64, IngestError> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(IngestError::Malformed {
            path: path.to_path_buf(),
            line,
            message: format!("{what} value {raw:?} is not a finite number"),
        }),
    }
}

fn read_csv(path: &Path, file: File, column: Option<&str>) -> Result<Vec<f64>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_error = |e: csv::Error| IngestError::Malformed {
        path: path.to_path_buf(),
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let headers = reader.headers().map_err(csv_error)?.clone();
    let available = headers.iter().collect::<Vec<_>>().join(", ");
    let index = match column {
        Some(c) => headers.iter().position(|h| h == c).ok_or_else(|| IngestError::MissingColumn {
            path: path.to_path_buf(),
            column: c.to_string(),
            available: available.clone(),
        })?,
        None if headers.len() == 1 => 0,
        None => {
            return Err(IngestError::AmbiguousColumn {
                path: path.to_path_buf(),
                count: headers.len(),
                available,
            })
        }
    };
    let name = &headers[index];
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        values.push(number(path, line, &record[index], &format!("column {name:?}"))?);
    }
    Ok(values)
}

fn read_jsonl(path: &Path, file: File, field: Option<&str>) -> Result<Vec<f64>, IngestError> {
    let mut values = Vec::new();
    for (i, text) in BufReader::new(file).lines().enumerate() {
        let line = i as u64 + 1;
        let malformed = |message: String| IngestError::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        let text = text.map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if text.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
        let object = value
            .as_object()
            .ok_or_else(|| malformed("expected a JSON object".into()))?;
        let (name, entry) = match field {
            Some(f) => (
                f,
                object.get(f).ok_or_else(|| malformed(format!("no field {f:?}")))?,
            ),
            None if object.len() == 1 => {
                let (k, v) = object.iter().next().expect("one entry");
                (k.as_str(), v)
            }
            None => {
                return Err(malformed(format!(
                    "{} fields; choose one with --column",
                    object.len()
                )))
            }
        };
        match entry.as_f64() {
            Some(v) if v.is_finite() => values.push(v),
            _ => return Err(malformed(format!("field {name:?} value {entry} is not a number"))),
        }
    }
    Ok(values)
}
