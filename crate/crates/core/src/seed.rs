//! Seed files: a JSON document holding a monodromy representation with its
//! permutations in cycle notation.
//!
//! ```json
//! {
//!   "name": "tetragonal-g0",
//!   "degree": 4,
//!   "base_genus": 0,
//!   "handles": [],
//!   "branches": ["(0 1)(4 5)", "(0 5)(1 4)"]
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{CoverError, MonodromyRep};
use crate::perm::{PermError, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: {field}: {source}")]
    Permutation {
        line: usize,
        column: usize,
        field: String,
        source: PermError,
    },
    #[error("{0}")]
    Structure(#[from] CoverError),
}

impl SeedError {
    /// Position in the source text, when one is known.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            SeedError::Syntax { line, column, .. }
            | SeedError::Permutation { line, column, .. } => Some((*line, *column)),
            SeedError::Structure(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub degree: usize,
    pub base_genus: usize,
    #[serde(default)]
    pub handles: Vec<[String; 2]>,
    #[serde(default)]
    pub branches: Vec<String>,
}

impl SeedFile {
    pub fn from_rep(rep: &MonodromyRep, name: Option<String>, notes: Option<String>) -> Self {
        SeedFile {
            name,
            notes,
            degree: rep.degree_n(),
            base_genus: rep.base_genus(),
            handles: rep
                .handles()
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
            branches: rep.branches().iter().map(|c| c.to_string()).collect(),
        }
    }

    /// Canonical text: two-space indented JSON with a trailing newline.
    pub fn to_canonical(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("seed serializes");
        text.push('\n');
        text
    }
}

/// Parses seed text into its document and representation.
pub fn parse_seed(text: &str) -> Result<(SeedFile, MonodromyRep), SeedError> {
    let file: SeedFile = serde_json::from_str(text).map_err(|e| SeedError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let degree = 2 * file.degree;
    let mut cursor = 0;
    let mut parse = |field: String, cycles: &str| -> Result<Permutation, SeedError> {
        let (line, column, next) = locate_literal(text, cycles, cursor);
        cursor = next;
        Permutation::parse_cycles(cycles, degree).map_err(|source| {
            let column = match &source {
                PermError::Syntax { offset, .. } => column + 1 + offset,
                _ => column,
            };
            SeedError::Permutation {
                line,
                column,
                field,
                source,
            }
        })
    };
    let mut handles = Vec::with_capacity(file.handles.len());
    for (h, [a, b]) in file.handles.iter().enumerate() {
        let a = parse(format!("a{}", h + 1), a)?;
        let b = parse(format!("b{}", h + 1), b)?;
        handles.push((a, b));
    }
    let mut branches = Vec::with_capacity(file.branches.len());
    for (j, c) in file.branches.iter().enumerate() {
        branches.push(parse(format!("c{}", j + 1), c)?);
    }
    let rep = MonodromyRep::new(file.degree, file.base_genus, handles, branches)?;
    Ok((file, rep))
}

/// Canonical seed text of a representation.
pub fn print_seed(rep: &MonodromyRep, name: Option<String>, notes: Option<String>) -> String {
    SeedFile::from_rep(rep, name, notes).to_canonical()
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// 1-based line and column of the opening quote of the first occurrence of
/// the string literal at or after `from`, plus the offset just past it.
fn locate_literal(text: &str, value: &str, from: usize) -> (usize, usize, usize) {
    let needle = format!("\"{value}\"");
    let at = text[from..]
        .find(&needle)
        .map(|i| i + from)
        .or_else(|| text.find(&needle))
        .unwrap_or(0);
    let line = text[..at].matches('\n').count() + 1;
    let line_start = text[..at].rfind('\n').map_or(0, |i| i + 1);
    let column = text[line_start..at].chars().count() + 1;
    (line, column, at + needle.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
  "name": "sample",
  "degree": 3,
  "base_genus": 1,
  "handles": [
    [
      "(0 1)(3 4)",
      "()"
    ]
  ],
  "branches": [
    "(0 4)(1 3)",
    "(0 1)(3 4)"
  ]
}
"#;

    #[test]
    fn canonical_round_trip() {
        let (file, rep) = parse_seed(SAMPLE).unwrap();
        assert_eq!(file.to_canonical(), SAMPLE);
        assert_eq!(print_seed(&rep, Some("sample".into()), None), SAMPLE);
        assert_eq!(rep.branch_count(), 2);
    }

    #[test]
    fn bad_permutation_is_located() {
        let text = SAMPLE.replace("\"(0 4)(1 3)\"", "\"(0 4)(4 3)\"");
        match parse_seed(&text) {
            Err(SeedError::Permutation {
                line,
                column,
                field,
                ..
            }) => {
                assert_eq!((line, column), (12, 5));
                assert_eq!(field, "c1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_is_located() {
        let text = SAMPLE.replace("\"degree\": 3,", "\"degree\": 3");
        let err = parse_seed(&text).unwrap_err();
        assert_eq!(err.location().map(|(l, _)| l), Some(4));
    }

    #[test]
    fn cycle_syntax_column_points_inside_literal() {
        let text = SAMPLE.replace(
            "\"(0 1)(3 4)\",\n      \"()\"",
            "\"(0 1)(3 4)\",\n      \"(x)\"",
        );
        let err = parse_seed(&text).unwrap_err();
        assert_eq!(err.location(), Some((8, 9)));
    }

    #[test]
    fn handle_count_must_match_genus() {
        let text = SAMPLE.replace("\"base_genus\": 1", "\"base_genus\": 2");
        assert!(matches!(
            parse_seed(&text),
            Err(SeedError::Structure(CoverError::HandleCount { .. }))
        ));
    }
}
