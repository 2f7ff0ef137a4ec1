//! Plain-text space blocks.
//!
//! ```text
//! # a doublet on five points
//! points: 5
//! open: 1 2
//! ```
//!
//! The empty set and the full set are implicit. A blank line ends a block;
//! `#` starts a comment. A family file is a sequence of blocks on the same
//! number of points.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::pointset::{PointSet, MAX_POINTS};
use crate::quotient::QuotientFamily;
use crate::space::FiniteSpace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

struct Block {
    start_line: usize,
    n: usize,
    sets: Vec<PointSet>,
}

/// Parse every space block in `text`.
pub fn parse_spaces(text: &str) -> Result<Vec<FiniteSpace>, ParseError> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut current: Option<Block> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            // Comment-only lines do not end a block.
            if raw.trim().is_empty() {
                if let Some(b) = current.take() {
                    blocks.push(b);
                }
            }
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix("points:") {
            if let Some(b) = current.take() {
                blocks.push(b);
            }
            let col = indent + "points:".len() + 1;
            let n: usize = rest.trim().parse().map_err(|_| {
                ParseError::new(line_no, col, format!("invalid point count {:?}", rest.trim()))
            })?;
            if n > MAX_POINTS {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("point count {n} exceeds {MAX_POINTS}"),
                ));
            }
            current = Some(Block {
                start_line: line_no,
                n,
                sets: Vec::new(),
            });
            continue;
        }
        let (body, offset) = match trimmed.strip_prefix("open:") {
            Some(rest) => (rest, indent + "open:".len()),
            None => (trimmed, indent),
        };
        let block = current.as_mut().ok_or_else(|| {
            ParseError::new(line_no, indent + 1, "open set before any `points:` line")
        })?;
        let mut set = PointSet::EMPTY;
        let mut pos = 0;
        for token in body.split_whitespace() {
            let at = body[pos..].find(token).unwrap() + pos;
            pos = at + token.len();
            let col = offset + at + 1;
            let p: usize = token
                .parse()
                .map_err(|_| ParseError::new(line_no, col, format!("invalid point label {token:?}")))?;
            if p == 0 || p > block.n {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("point {p} outside 1..={}", block.n),
                ));
            }
            set = set.with(p);
        }
        block.sets.push(set);
    }
    if let Some(b) = current.take() {
        blocks.push(b);
    }
    if blocks.is_empty() {
        return Err(ParseError::new(1, 1, "no space blocks found"));
    }
    blocks
        .into_iter()
        .map(|b| {
            FiniteSpace::new(b.n, b.sets)
                .map_err(|e| ParseError::new(b.start_line, 1, e.to_string()))
        })
        .collect()
}

/// Parse exactly one space block.
pub fn parse_space(text: &str) -> Result<FiniteSpace, ParseError> {
    let mut spaces = parse_spaces(text)?;
    if spaces.len() != 1 {
        return Err(ParseError::new(
            1,
            1,
            format!("expected one space block, found {}", spaces.len()),
        ));
    }
    Ok(spaces.pop().unwrap())
}

/// Parse a quotient family: blocks that all share one point count.
pub fn parse_family(text: &str) -> Result<QuotientFamily, ParseError> {
    let spaces = parse_spaces(text)?;
    QuotientFamily::new(spaces).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Write one space block (without a trailing blank line).
pub fn write_space(space: &FiniteSpace) -> String {
    let mut out = String::new();
    write_space_into(&mut out, space).unwrap();
    out
}

fn write_space_into(out: &mut String, space: &FiniteSpace) -> fmt::Result {
    writeln!(out, "points: {}", space.n())?;
    let full = space.full();
    let mut sets: Vec<PointSet> = space
        .opens()
        .iter()
        .copied()
        .filter(|&o| !o.is_empty() && o != full)
        .collect();
    sets.sort_by(|a, b| a.cmp_lex(b));
    for s in sets {
        out.push_str("open:");
        for p in s.points() {
            write!(out, " {p}")?;
        }
        out.push('\n');
    }
    Ok(())
}

/// Write several blocks separated by blank lines.
pub fn write_spaces<'a, I: IntoIterator<Item = &'a FiniteSpace>>(spaces: I) -> String {
    let mut out = String::new();
    for (i, s) in spaces.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_space_into(&mut out, s).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_doc_block() {
        let s = parse_space("# T1\npoints: 5\nopen: 1 2\n").unwrap();
        assert_eq!(s.n(), 5);
        assert_eq!(s.opens().len(), 3);
    }

    #[test]
    fn bare_label_lines_and_comments() {
        let s = parse_space("points: 3\n1  # singleton\n1 2\n").unwrap();
        assert_eq!(s.opens().len(), 4);
    }

    #[test]
    fn comment_lines_do_not_split_blocks() {
        let spaces = parse_spaces("points: 3\n# note\nopen: 1\n\npoints: 3\n").unwrap();
        assert_eq!(spaces.len(), 2);
        assert_eq!(spaces[0].opens().len(), 3);
    }

    #[test]
    fn reports_positions() {
        let err = parse_space("points: 3\nopen: 1 9\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 9));
        let err = parse_space("open: 1\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_space("").unwrap_err();
        assert!(err.message.contains("no space"));
        let err = parse_space("points: x\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));
    }

    #[test]
    fn rejects_non_topology() {
        let err = parse_space("points: 3\nopen: 1\nopen: 2\n").unwrap_err();
        assert!(err.message.contains("not a topology"));
    }

    #[test]
    fn family_requires_equal_sizes() {
        assert!(parse_family("points: 2\n\npoints: 2\n").is_ok());
        assert!(parse_family("points: 2\n\npoints: 2\n\npoints: 2\n").is_err());
        assert!(parse_family("points: 2\n\npoints: 3\n").is_err());
    }

    #[test]
    fn emission_is_lexicographic() {
        let s = FiniteSpace::new(
            4,
            [PointSet::from_points([2, 3]), PointSet::from_points([1, 4])],
        )
        .unwrap();
        assert_eq!(write_space(&s), "points: 4\nopen: 1 4\nopen: 2 3\n");
    }

    proptest! {
        #[test]
        fn round_trip(covers in (1usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(0u64..(1u64 << n), n).prop_map(move |v| (n, v))
        })) {
            let (n, raw) = covers;
            let sets: Vec<PointSet> = raw.into_iter().map(PointSet::from_bits).collect();
            let space = FiniteSpace::generated_by(n, sets).unwrap();
            let text = write_space(&space);
            prop_assert_eq!(parse_space(&text).unwrap(), space);
        }
    }
}
