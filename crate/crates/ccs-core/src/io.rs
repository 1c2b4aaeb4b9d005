//! Text formats: `.cc` scheme files, `.perm` permutation generators and
//! `.inc` design incidence matrices. Parsing is strict; any deviation is an
//! error with line/column information.

use crate::constructors::{DesignInput, PermutationGroupInput};
use crate::scheme::{verify_scheme, Scheme, VerifyError};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `{expected}`")]
    BadHeader { line: usize, expected: String },
    #[error("line {line}, column {col}: {message}")]
    BadToken {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    BadFieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} lines, found {found}")]
    BadLineCount { expected: usize, found: usize },
    #[error("trailing content on line {line}")]
    TrailingContent { line: usize },
    #[error("scheme verification failed: {0}")]
    InvalidScheme(#[from] VerifyError),
}

fn header_value(line: &str, key: &str, line_no: usize) -> Result<usize, ParseError> {
    let expected = format!("{key}=<n>");
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| ParseError::BadHeader {
            line: line_no,
            expected: expected.clone(),
        })?;
    rest.parse().map_err(|_| ParseError::BadHeader {
        line: line_no,
        expected,
    })
}

/// Parses the `.cc` format: `points=<n>`, `colors=<k>`, then `n` lines of `n`
/// space-separated integers in `0..k-1`. The scheme axioms are verified.
pub fn parse_cc(text: &str) -> Result<Scheme, ParseError> {
    let matrix = parse_cc_matrix(text)?;
    Ok(verify_scheme(&matrix)?)
}

/// Parses the `.cc` format without verifying the axioms.
pub fn parse_cc_matrix(text: &str) -> Result<Vec<Vec<usize>>, ParseError> {
    let mut lines = text.lines().enumerate();
    let (ln, first) = lines.next().ok_or(ParseError::BadHeader {
        line: 1,
        expected: "points=<n>".into(),
    })?;
    let points = header_value(first, "points", ln + 1)?;
    let (ln, second) = lines.next().ok_or(ParseError::BadHeader {
        line: 2,
        expected: "colors=<k>".into(),
    })?;
    let colors = header_value(second, "colors", ln + 1)?;

    let mut matrix = Vec::with_capacity(points);
    for _ in 0..points {
        let (ln, line) = lines.next().ok_or(ParseError::BadLineCount {
            expected: points + 2,
            found: matrix.len() + 2,
        })?;
        let mut row = Vec::with_capacity(points);
        let mut col_start = 0usize;
        for token in line.split(' ') {
            let col = col_start + 1;
            col_start += token.len() + 1;
            if token.is_empty() {
                return Err(ParseError::BadToken {
                    line: ln + 1,
                    col,
                    message: "empty field".into(),
                });
            }
            let value: usize = token.parse().map_err(|_| ParseError::BadToken {
                line: ln + 1,
                col,
                message: format!("`{token}` is not a non-negative integer"),
            })?;
            if value >= colors {
                return Err(ParseError::BadToken {
                    line: ln + 1,
                    col,
                    message: format!("color {value} out of range 0..{colors}"),
                });
            }
            row.push(value);
        }
        if row.len() != points {
            return Err(ParseError::BadFieldCount {
                line: ln + 1,
                expected: points,
                found: row.len(),
            });
        }
        matrix.push(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(ParseError::TrailingContent { line: ln + 1 });
    }
    Ok(matrix)
}

/// Emits the `.cc` format, with a trailing newline.
pub fn write_cc(s: &Scheme) -> String {
    let mut out = String::new();
    writeln!(out, "points={}", s.point_count()).unwrap();
    writeln!(out, "colors={}", s.relation_count()).unwrap();
    for u in 0..s.point_count() {
        for v in 0..s.point_count() {
            if v > 0 {
                out.push(' ');
            }
            write!(out, "{}", s.color(u, v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses the `.perm` format: `degree=<n>`, then one generator per line as
/// `n` space-separated images.
pub fn parse_perm(text: &str) -> Result<PermutationGroupInput, ParseError> {
    let mut lines = text.lines().enumerate();
    let (ln, first) = lines.next().ok_or(ParseError::BadHeader {
        line: 1,
        expected: "degree=<n>".into(),
    })?;
    let degree = header_value(first, "degree", ln + 1)?;
    let mut generators = Vec::new();
    for (ln, line) in lines {
        let mut images = Vec::with_capacity(degree);
        for token in line.split(' ') {
            let value: usize = token.parse().map_err(|_| ParseError::BadToken {
                line: ln + 1,
                col: 1,
                message: format!("`{token}` is not a non-negative integer"),
            })?;
            images.push(value);
        }
        if images.len() != degree {
            return Err(ParseError::BadFieldCount {
                line: ln + 1,
                expected: degree,
                found: images.len(),
            });
        }
        generators.push(images);
    }
    Ok(PermutationGroupInput { degree, generators })
}

/// Parses the `.inc` format: `v=<v> b=<b>`, then `v` lines of `b` characters
/// from `{0,1}`.
pub fn parse_inc(text: &str) -> Result<DesignInput, ParseError> {
    let mut lines = text.lines().enumerate();
    let (ln, first) = lines.next().ok_or(ParseError::BadHeader {
        line: 1,
        expected: "v=<v> b=<b>".into(),
    })?;
    let (v_part, b_part) = first.split_once(' ').ok_or_else(|| ParseError::BadHeader {
        line: ln + 1,
        expected: "v=<v> b=<b>".into(),
    })?;
    let v = header_value(v_part, "v", ln + 1)?;
    let b = header_value(b_part, "b", ln + 1)?;
    let mut incidence = Vec::with_capacity(v);
    for _ in 0..v {
        let (ln, line) = lines.next().ok_or(ParseError::BadLineCount {
            expected: v + 1,
            found: incidence.len() + 1,
        })?;
        if line.chars().count() != b {
            return Err(ParseError::BadFieldCount {
                line: ln + 1,
                expected: b,
                found: line.chars().count(),
            });
        }
        let mut row = Vec::with_capacity(b);
        for (i, ch) in line.chars().enumerate() {
            match ch {
                '0' => row.push(0u8),
                '1' => row.push(1u8),
                other => {
                    return Err(ParseError::BadToken {
                        line: ln + 1,
                        col: i + 1,
                        message: format!("`{other}` is not 0 or 1"),
                    })
                }
            }
        }
        incidence.push(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(ParseError::TrailingContent { line: ln + 1 });
    }
    Ok(DesignInput { incidence })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cc_round_trip() {
        let text = "points=3\ncolors=2\n0 1 1\n1 0 1\n1 1 0\n";
        let s = parse_cc(text).unwrap();
        assert_eq!(write_cc(&s), text);
    }

    #[test]
    fn cc_bad_header() {
        assert!(matches!(parse_cc("n=3\n"), Err(ParseError::BadHeader { line: 1, .. })));
    }

    #[test]
    fn cc_color_out_of_range() {
        let text = "points=2\ncolors=2\n0 2\n2 0\n";
        assert!(matches!(
            parse_cc(text),
            Err(ParseError::BadToken { line: 3, col: 3, .. })
        ));
    }

    #[test]
    fn cc_short_row() {
        let text = "points=2\ncolors=2\n0 1\n1\n";
        assert!(matches!(
            parse_cc(text),
            Err(ParseError::BadFieldCount { line: 4, expected: 2, found: 1 })
        ));
    }

    #[test]
    fn perm_parse() {
        let g = parse_perm("degree=3\n1 2 0\n").unwrap();
        assert_eq!(g.degree, 3);
        assert_eq!(g.generators, vec![vec![1, 2, 0]]);
    }

    #[test]
    fn inc_parse() {
        let d = parse_inc("v=2 b=2\n10\n01\n").unwrap();
        assert_eq!(d.incidence, vec![vec![1, 0], vec![0, 1]]);
    }
}
