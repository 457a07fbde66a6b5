//! Text forms of matrices.
//!
//! CSV: `n` lines of `n` comma-separated decimals, no header.
//! JSON: `{"n": 3, "entries": [[...], ...]}`.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! `parse(serialize(m)) == m` bit for bit.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{ComparisonMatrix, MatrixJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// JSON if the first non-blank character is `{`, CSV otherwise.
    pub fn detect(text: &str) -> Format {
        match text.trim_start().chars().next() {
            Some('{') => Format::Json,
            _ => Format::Csv,
        }
    }
}

pub fn to_csv(m: &ComparisonMatrix) -> String {
    rows_to_csv(&m.rows())
}

pub fn to_json(m: &ComparisonMatrix) -> String {
    serde_json::to_string(m).expect("matrix serialization is infallible")
}

pub fn serialize(m: &ComparisonMatrix, format: Format) -> String {
    match format {
        Format::Csv => to_csv(m),
        Format::Json => to_json(m),
    }
}

pub fn rows_to_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
    }
    out
}

pub fn from_csv(text: &str) -> Result<ComparisonMatrix> {
    ComparisonMatrix::from_rows(&square_rows(parse_csv_rows(text)?)?)
}

pub fn from_json(text: &str) -> Result<ComparisonMatrix> {
    let json: MatrixJson = serde_json::from_str(text)?;
    ComparisonMatrix::try_from(json)
}

/// Parses a comparison matrix, detecting the format.
pub fn parse(text: &str) -> Result<ComparisonMatrix> {
    match Format::detect(text) {
        Format::Csv => from_csv(text),
        Format::Json => from_json(text),
    }
}

/// Parses an arbitrary square real matrix (a matrix rate), in either format.
pub fn parse_real(text: &str) -> Result<DMatrix<f64>> {
    let rows = match Format::detect(text) {
        Format::Csv => square_rows(parse_csv_rows(text)?)?,
        Format::Json => {
            let json: MatrixJson = serde_json::from_str(text)?;
            if json.entries.len() != json.n {
                return Err(Error::DimensionMismatch {
                    expected: json.n,
                    found: json.entries.len(),
                });
            }
            square_rows(json.entries)?
        }
    };
    let n = rows.len();
    for (row, values) in rows.iter().enumerate() {
        for (col, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { row, col, value });
            }
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Parses CSV into rows of equal length, reporting the first ragged row.
pub fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Malformed {
            row,
            message: e.to_string(),
        })?;
        let values = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| Error::Malformed {
                    row,
                    message: format!("column {col}: `{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(Error::Malformed {
                    row,
                    message: format!("expected {} entries, found {}", first.len(), values.len()),
                });
            }
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::Malformed {
            row: 0,
            message: "no rows".into(),
        });
    }
    Ok(rows)
}

fn square_rows(rows: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = rows.len();
    for (row, values) in rows.iter().enumerate() {
        if values.len() != n {
            return Err(Error::Malformed {
                row,
                message: format!(
                    "expected {n} entries for a square matrix, found {}",
                    values.len()
                ),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let m = from_csv("1,2\n0.5,1").unwrap();
        assert_eq!(m.rows(), vec![vec![1.0, 2.0], vec![0.5, 1.0]]);
        assert_eq!(to_csv(&m), "1,2\n0.5,1");
        assert_eq!(from_csv(&to_csv(&m)).unwrap(), m);
    }

    #[test]
    fn ragged_csv_names_row() {
        let err = from_csv("1,2\n0.5").unwrap_err();
        assert!(matches!(err, Error::Malformed { row: 1, .. }), "{err}");
    }

    #[test]
    fn csv_rejects_nonpositive() {
        assert!(matches!(
            from_csv("1,-2\n0.5,1"),
            Err(Error::NonPositive { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            from_csv("1,x\n0.5,1"),
            Err(Error::Malformed { row: 0, .. })
        ));
    }

    #[test]
    fn json_dimension_mismatch() {
        let err = from_json(r#"{"n":3,"entries":[[1,2],[0.5,1]]}"#).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 3,
                found: 2
            }
        ));
    }

    #[test]
    fn json_round_trip_and_detection() {
        let m = from_csv("1,3,0.2\n0.3333333333333333,1,7\n5,0.14285714285714285,1").unwrap();
        let text = to_json(&m);
        assert!(text.starts_with(r#"{"n":3,"entries":"#));
        assert_eq!(parse(&text).unwrap(), m);
        assert_eq!(Format::detect("  {"), Format::Json);
    }

    #[test]
    fn real_matrices_accept_any_sign() {
        let m = parse_real("1,-2\n0,4").unwrap();
        assert_eq!(m[(0, 1)], -2.0);
        assert!(parse_real("1,2,3\n4,5,6").is_err());
    }
}
