//! Native Manchester-flavoured text format.

mod lexer;
mod parser;
mod writer;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_concept, parse_text};
pub use writer::{serialize_text, write_concept, write_name, write_role};

/// 1-based position in a source text. Columns count characters, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceLocation {
    pub line: usize,
    pub column: usize,
}

impl SourceLocation {
    pub fn new(line: usize, column: usize) -> Self {
        SourceLocation { line, column }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnknownKeyword,
    UndeclaredEntity,
    MalformedNumber,
    DuplicateDeclaration,
    UnsupportedConstruct,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub location: SourceLocation,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, location: SourceLocation, message: impl Into<String>) -> Self {
        ParseError {
            location,
            kind,
            message: message.into(),
        }
    }
}

/// Words with a fixed meaning inside class expressions. A class or role with
/// one of these names has to be written in quotes.
pub(crate) const RESERVED: &[&str] = &[
    "and", "or", "not", "some", "only", "value", "min", "max", "inverse", "range", "Thing", "Nothing",
];

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

/// True when `name` can be written without quotes.
pub(crate) fn is_bare_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => chars.all(is_ident_char) && !RESERVED.contains(&name),
        _ => false,
    }
}
