//! Plain-text sparse matrix files.
//!
//! ```text
//! # optional comment lines
//! <rows> <cols> <nnz>
//! <row> <col> <value>      (one line per stored entry, 0-based indices)
//! ```
//!
//! Labels live in a sidecar file with one `0`/`1` per line, row-aligned.
//! Values are written in shortest round-trip decimal form.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::label::Label;
use crate::preprocess::hex;
use crate::sparse::{FeatureMatrix, SparseVector};

#[derive(Debug, Error, PartialEq)]
pub enum MatrixIoError {
    #[error("missing `rows cols nnz` header")]
    MissingHeader,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("header declares {declared} entries but {found} were read")]
    NnzMismatch { declared: usize, found: usize },
    #[error("matrix has {rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
}

pub fn write_matrix(matrix: &FeatureMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", matrix.len(), matrix.dim(), matrix.nnz());
    for (r, row) in matrix.rows().iter().enumerate() {
        for (c, v) in row.iter() {
            let _ = writeln!(out, "{r} {c} {v:?}");
        }
    }
    out
}

pub fn write_labels(labels: &[Label]) -> String {
    let mut out = String::with_capacity(labels.len() * 2);
    for l in labels {
        let _ = writeln!(out, "{l}");
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn read_labels(text: &str) -> Result<Vec<Label>, MatrixIoError> {
    content_lines(text)
        .map(|(line, l)| match l {
            "0" => Ok(Label::NonSpam),
            "1" => Ok(Label::Spam),
            other => Err(MatrixIoError::Parse {
                line,
                message: format!("label must be 0 or 1, got `{other}`"),
            }),
        })
        .collect()
}

pub fn read_matrix(matrix_text: &str, labels_text: &str) -> Result<FeatureMatrix, MatrixIoError> {
    let mut lines = content_lines(matrix_text);
    let (header_line, header) = lines.next().ok_or(MatrixIoError::MissingHeader)?;
    let parse_usize = |line: usize, field: &str, what: &str| {
        field.parse::<usize>().map_err(|_| MatrixIoError::Parse {
            line,
            message: format!("invalid {what} `{field}`"),
        })
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(MatrixIoError::Parse {
            line: header_line,
            message: "header must be `rows cols nnz`".into(),
        });
    }
    let rows = parse_usize(header_line, fields[0], "row count")?;
    let cols = parse_usize(header_line, fields[1], "column count")?;
    let nnz = parse_usize(header_line, fields[2], "entry count")?;

    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
    let mut found = 0;
    for (line, text) in lines {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(MatrixIoError::Parse {
                line,
                message: "expected `row col value`".into(),
            });
        }
        let r = parse_usize(line, parts[0], "row")?;
        let c = parse_usize(line, parts[1], "column")?;
        let v: f64 = parts[2].parse().map_err(|_| MatrixIoError::Parse {
            line,
            message: format!("invalid value `{}`", parts[2]),
        })?;
        if r >= rows || c >= cols {
            return Err(MatrixIoError::Parse {
                line,
                message: format!("entry ({r}, {c}) outside {rows}x{cols}"),
            });
        }
        if !v.is_finite() {
            return Err(MatrixIoError::Parse {
                line,
                message: "non-finite value".into(),
            });
        }
        entries[r].push((c, v));
        found += 1;
    }
    if found != nnz {
        return Err(MatrixIoError::NnzMismatch { declared: nnz, found });
    }
    let labels = read_labels(labels_text)?;
    if labels.len() != rows {
        return Err(MatrixIoError::LabelCount {
            rows,
            labels: labels.len(),
        });
    }
    let mut vectors = Vec::with_capacity(rows);
    for (r, mut row) in entries.into_iter().enumerate() {
        row.sort_by_key(|&(c, _)| c);
        if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(MatrixIoError::Parse {
                line: 0,
                message: format!("duplicate entry ({r}, {})", w[0].0),
            });
        }
        vectors.push(SparseVector::new(cols, row).expect("validated entries"));
    }
    Ok(FeatureMatrix::new(cols, vectors, labels).expect("validated shape"))
}

/// Hex SHA-256 of the matrix file text followed by the labels file text.
pub fn matrix_digest(matrix: &FeatureMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update(write_matrix(matrix).as_bytes());
    hasher.update(write_labels(matrix.labels()).as_bytes());
    hex(&hasher.finalize())
}

/// Hex SHA-256 of arbitrary bytes, used for dataset digests.
pub fn bytes_digest(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FeatureMatrix {
        FeatureMatrix::new(
            4,
            vec![
                SparseVector::new(4, vec![(0, 0.1), (3, 2.5)]).unwrap(),
                SparseVector::zeros(4),
                SparseVector::new(4, vec![(1, 1.0 / 3.0)]).unwrap(),
            ],
            vec![Label::NonSpam, Label::Spam, Label::Spam],
        )
        .unwrap()
    }

    #[test]
    fn format_layout() {
        let m = sample();
        assert_eq!(write_matrix(&m), "3 4 3\n0 0 0.1\n0 3 2.5\n2 1 0.3333333333333333\n");
        assert_eq!(write_labels(m.labels()), "0\n1\n1\n");
    }

    #[test]
    fn round_trip_is_exact() {
        let m = sample();
        let back = read_matrix(&write_matrix(&m), &write_labels(m.labels())).unwrap();
        assert_eq!(back, m);
        assert_eq!(matrix_digest(&back), matrix_digest(&m));
    }

    #[test]
    fn accepts_comments_and_unsorted_entries() {
        let m = read_matrix("# hi\n2 3 2\n0 2 1.5\n0 0 -1\n", "0\n1\n").unwrap();
        assert_eq!(m.rows()[0].indices(), [0, 2]);
    }

    #[test]
    fn reports_errors() {
        assert_eq!(read_matrix("", ""), Err(MatrixIoError::MissingHeader));
        assert!(matches!(
            read_matrix("1 2 1\n0 5 1.0\n", "0\n"),
            Err(MatrixIoError::Parse { line: 2, .. })
        ));
        assert_eq!(
            read_matrix("1 2 2\n0 1 1.0\n", "0\n"),
            Err(MatrixIoError::NnzMismatch { declared: 2, found: 1 })
        );
        assert_eq!(
            read_matrix("2 2 0\n", "0\n"),
            Err(MatrixIoError::LabelCount { rows: 2, labels: 1 })
        );
        assert!(matches!(read_matrix("1 2 0\n", "3\n"), Err(MatrixIoError::Parse { line: 1, .. })));
        assert!(matches!(
            read_matrix("1 2 2\n0 1 1.0\n0 1 2.0\n", "0\n"),
            Err(MatrixIoError::Parse { .. })
        ));
    }
}
