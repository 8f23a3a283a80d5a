//! Plain-text sample and report formats.
//!
//! Floats are written with the shortest representation that parses back
//! to the same value, so files round-trip exactly.

use std::fs;
use std::path::Path;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};

/// `x0,x1,...,x{n-1}`.
pub fn samples_header(n: usize) -> String {
    (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

/// Header line followed by one row per sample.
pub fn samples_to_csv(n: usize, samples: &[DVector<f64>]) -> String {
    let mut out = samples_header(n);
    out.push('\n');
    for s in samples {
        out.push_str(&join_row(s.iter()));
        out.push('\n');
    }
    out
}

fn join_row<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Parse a sample CSV with a header row. Returns the column count and the
/// rows.
pub fn samples_from_csv(text: &str) -> Result<(usize, Vec<DVector<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("sample file is empty".into()))?;
    let n = header.split(',').count();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row = parse_row(line).map_err(|e| Error::Parse(format!("row {}: {e}", k + 1)))?;
        if row.len() != n {
            return Err(Error::Parse(format!(
                "row {} has {} columns, header has {n}",
                k + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok((n, rows))
}

fn parse_row(line: &str) -> Result<DVector<f64>> {
    let values = line
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {:?}: {e}", f.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(values))
}

/// A single vector given as comma- or whitespace-separated numbers, on one
/// line or one per line. A non-numeric first line is skipped as a header.
pub fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let split = |t: &'_ str| -> Vec<String> {
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(str::to_string)
            .collect()
    };
    let mut fields = split(text);
    if let Some(first) = text.lines().map(split).find(|f| !f.is_empty()) {
        if first[0].parse::<f64>().is_err() {
            fields.drain(..first.len());
        }
    }
    if fields.is_empty() {
        return Err(Error::Parse("vector is empty".into()));
    }
    let values = fields
        .iter()
        .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("bad number {f:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(values))
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<(usize, Vec<DVector<f64>>)> {
    samples_from_csv(&read_text(path.as_ref())?)
}

pub fn write_samples(path: impl AsRef<Path>, n: usize, samples: &[DVector<f64>]) -> Result<()> {
    write_text(path.as_ref(), &samples_to_csv(n, samples))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    write_text(path.as_ref(), &to_json_pretty(value)?)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let s = vec![
            DVector::from_vec(vec![0.1, -1.0 / 3.0]),
            DVector::from_vec(vec![1e-300, 5.0]),
        ];
        let text = samples_to_csv(2, &s);
        assert!(text.starts_with("x0,x1\n"));
        let (n, back) = samples_from_csv(&text).unwrap();
        assert_eq!(n, 2);
        assert_eq!(back, s);
    }

    #[test]
    fn empty_csv_has_header() {
        assert_eq!(samples_to_csv(3, &[]), "x0,x1,x2\n");
        assert_eq!(samples_from_csv("x0,x1,x2\n").unwrap().1.len(), 0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(samples_from_csv("x0,x1\n1,2\n3\n").is_err());
    }

    #[test]
    fn vector_forms() {
        let v = DVector::from_vec(vec![0.5, -0.25]);
        assert_eq!(parse_vector("0.5,-0.25").unwrap(), v);
        assert_eq!(parse_vector("0.5\n-0.25\n").unwrap(), v);
        assert_eq!(parse_vector("x0,x1\n0.5,-0.25\n").unwrap(), v);
        assert_eq!(parse_vector("0.5 -0.25\n").unwrap(), v);
        assert_eq!(parse_vector("x0 x1\n0.5 -0.25").unwrap(), v);
        assert!(parse_vector("").is_err());
    }
}
