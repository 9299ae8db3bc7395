use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::{RawSeries, MIN_POINTS};

/// An ingested series together with its labels, when the input had them.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub values: Vec<f64>,
    pub labels: Option<Vec<String>>,
}

/// Read a series file into a [`RawSeries`] whose fit window is the whole file.
pub fn ingest(path: impl AsRef<Path>) -> Result<RawSeries> {
    RawSeries::new(ingest_labeled(path)?.values)
}

/// Read a series file, keeping any labels.
///
/// Each record is either a single value or a `label,value` pair. Blank lines
/// and lines starting with `#` are skipped. Every value must be a finite,
/// strictly positive number; all records must have the same shape.
pub fn ingest_labeled(path: impl AsRef<Path>) -> Result<Ingested> {
    let mut text = String::new();
    File::open(path.as_ref())?.read_to_string(&mut text)?;
    parse_series(&text)
}

/// Parse series text; see [`ingest_labeled`].
pub fn parse_series(text: &str) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut labeled: Option<bool> = None;
    let mut record = csv::StringRecord::new();
    loop {
        let more = reader.read_record(&mut record).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                line,
                content: e.to_string(),
            }
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        let content = || record.iter().collect::<Vec<_>>().join(",");
        let fields: Vec<&str> = record.iter().collect();
        let (label, field) = match fields.as_slice() {
            [v] if !v.is_empty() => (None, *v),
            [l, v] => (Some(*l), *v),
            _ => {
                return Err(Error::Parse {
                    line,
                    content: content(),
                })
            }
        };
        if *labeled.get_or_insert(label.is_some()) != label.is_some() {
            return Err(Error::Parse {
                line,
                content: content(),
            });
        }
        let value: f64 = field.parse().map_err(|_| Error::Parse {
            line,
            content: content(),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line,
                content: content(),
            });
        }
        if value <= 0.0 {
            return Err(Error::InvalidSeries(format!(
                "line {line}: value {value} is not strictly positive"
            )));
        }
        values.push(value);
        if let Some(l) = label {
            labels.push(l.to_string());
        }
    }

    if values.len() < MIN_POINTS {
        return Err(Error::InvalidSeries(format!(
            "{} observations, at least {MIN_POINTS} are needed",
            values.len()
        )));
    }
    Ok(Ingested {
        values,
        labels: (labeled == Some(true)).then_some(labels),
    })
}
