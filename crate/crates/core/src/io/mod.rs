//! Line-oriented text formats.
//!
//! All formats share one lexical layer: UTF-8 text, `#` starts a comment that
//! runs to the end of the line, blank lines are ignored, and fields are
//! separated by spaces or tabs. Parsing is strict: unknown directives and
//! extra fields are errors.

mod config;
mod netlist;
mod profile;

pub use config::{parse_device_profile, parse_power_model, serialize_power_model, DEVICE_HEADER};
pub use netlist::{parse_netlist, serialize_netlist, NetlistDocument, NETLIST_HEADER};
pub use profile::{parse_profile, serialize_profile, PROFILE_HEADER};

use thiserror::Error;

use crate::error::Rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input is not valid UTF-8 (byte {offset})")]
    Encoding { offset: usize },
    #[error("missing header, expected {expected:?}")]
    MissingHeader { expected: &'static str },
    #[error("version mismatch at line {line}: expected {expected:?}, found {found:?}")]
    Version {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("{message} at line {line}, column {column}")]
    Lexical {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },
    #[error("{message} at line {line}")]
    Semantic { line: usize, message: String },
    #[error("{}", render_invalid(.0))]
    Invalid(Vec<LocatedViolation>),
}

impl ParseError {
    /// Line of the first problem, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Version { line, .. }
            | ParseError::Lexical { line, .. }
            | ParseError::Semantic { line, .. } => Some(*line),
            ParseError::Invalid(v) => v.first().and_then(|v| v.line),
            ParseError::Encoding { .. } | ParseError::MissingHeader { .. } => None,
        }
    }
}

/// A netlist invariant violation tied back to its source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedViolation {
    pub line: Option<usize>,
    pub rule: Rule,
    pub message: String,
}

fn render_invalid(violations: &[LocatedViolation]) -> String {
    violations
        .iter()
        .map(|v| match v.line {
            Some(l) => format!("line {l}: [{}] {}", v.rule, v.message),
            None => format!("[{}] {}", v.rule, v.message),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// One whitespace-separated field with its 1-based column.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

#[derive(Debug)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    pub fn error(&self, at: usize, message: impl Into<String>) -> ParseError {
        let (column, token) = match self.tokens.get(at) {
            Some(t) => (t.column, t.text.to_owned()),
            None => (
                self.tokens
                    .last()
                    .map_or(1, |t| t.column + t.text.chars().count()),
                String::new(),
            ),
        };
        ParseError::Lexical {
            line: self.number,
            column,
            token,
            message: message.into(),
        }
    }

    pub fn semantic(&self, message: impl Into<String>) -> ParseError {
        ParseError::Semantic {
            line: self.number,
            message: message.into(),
        }
    }

    /// Fails unless the line has exactly `n` fields.
    pub fn expect_len(&self, n: usize, usage: &str) -> Result<(), ParseError> {
        match self.tokens.len().cmp(&n) {
            std::cmp::Ordering::Equal => Ok(()),
            std::cmp::Ordering::Less => Err(self.error(
                self.tokens.len(),
                format!("missing field, expected `{usage}`"),
            )),
            std::cmp::Ordering::Greater => {
                Err(self.error(n, format!("unexpected extra field, expected `{usage}`")))
            }
        }
    }

    pub fn text(&self, at: usize) -> &'a str {
        self.tokens[at].text
    }

    pub fn id(&self, at: usize, what: &str) -> Result<&'a str, ParseError> {
        let text = self.text(at);
        if crate::netlist::is_valid_id(text) {
            Ok(text)
        } else {
            Err(self.error(at, format!("invalid {what} {text}")))
        }
    }

    /// Non-negative integer field.
    pub fn unsigned(&self, at: usize, what: &str) -> Result<u64, ParseError> {
        let text = self.text(at);
        if let Some(digits) = text.strip_prefix('-') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(self.error(at, format!("negative {what} {text}")));
            }
        }
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.error(at, format!("invalid {what} {text}")));
        }
        text.parse()
            .map_err(|_| self.error(at, format!("{what} {text} out of range")))
    }

    /// Finite non-negative decimal field.
    pub fn decimal(&self, at: usize, what: &str) -> Result<f64, ParseError> {
        let text = self.text(at);
        let ok = !text.is_empty()
            && text.bytes().all(|b| {
                b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || b == b'-' || b == b'+'
            });
        match text.parse::<f64>() {
            Ok(v) if ok && v.is_finite() && v >= 0.0 => Ok(v),
            Ok(v) if ok && v < 0.0 => Err(self.error(at, format!("negative {what} {text}"))),
            _ => Err(self.error(at, format!("invalid {what} {text}"))),
        }
    }
}

/// Splits `text` into non-empty, comment-stripped lines.
pub(crate) fn lex(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start: Option<usize> = None;
        for (pos, ch) in content
            .char_indices()
            .chain(std::iter::once((content.len(), ' ')))
        {
            let blank = ch == ' ' || ch == '\t' || ch == '\r';
            match (start, blank) {
                (None, false) => start = Some(pos),
                (Some(s), true) => {
                    tokens.push(Token {
                        text: &content[s..pos],
                        column: content[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            lines.push(Line {
                number: i + 1,
                tokens,
            });
        }
    }
    lines
}

pub(crate) fn decode(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| ParseError::Encoding {
        offset: e.valid_up_to(),
    })
}

/// Checks the first line against `header`; returns the remaining lines.
pub(crate) fn split_header<'t, 'a>(
    lines: &'t [Line<'a>],
    header: &'static str,
) -> Result<&'t [Line<'a>], ParseError> {
    let Some(first) = lines.first() else {
        return Err(ParseError::MissingHeader { expected: header });
    };
    let found = first
        .tokens
        .iter()
        .map(|t| t.text)
        .collect::<Vec<_>>()
        .join(" ");
    let (magic, _) = header
        .split_once(' ')
        .expect("headers are `<magic> <version>`");
    if found == header {
        Ok(&lines[1..])
    } else if first.tokens[0].text == magic {
        Err(ParseError::Version {
            line: first.number,
            expected: header,
            found,
        })
    } else {
        Err(ParseError::MissingHeader { expected: header })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexer_columns_and_comments() {
        let lines = lex("# header comment\n\n  cell  a\tLUT1 3 # trailing\n");
        assert_eq!(lines.len(), 1);
        let l = &lines[0];
        assert_eq!(l.number, 3);
        let cols: Vec<_> = l.tokens.iter().map(|t| (t.text, t.column)).collect();
        assert_eq!(cols, [("cell", 3), ("a", 9), ("LUT1", 11), ("3", 16)]);
    }

    #[test]
    fn numbers() {
        let lines = lex("x -5 abc 12 1.5 -0.5");
        let l = &lines[0];
        assert!(l
            .unsigned(1, "delay")
            .unwrap_err()
            .to_string()
            .starts_with("negative delay -5"));
        assert!(l.unsigned(2, "delay").is_err());
        assert_eq!(l.unsigned(3, "delay").unwrap(), 12);
        assert_eq!(l.decimal(4, "w").unwrap(), 1.5);
        assert!(l.decimal(5, "w").is_err());
    }
}
