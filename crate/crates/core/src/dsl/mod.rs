//! Textual definition language for hierarchical timed nets (`.hpn`) and
//! workflow-pattern expressions (`.pat`).
//!
//! Net documents:
//!
//! ```text
//! document   := netdef+
//! netdef     := "net" IDENT "{" item* "}"
//! item       := placedecl | transdecl | arcdecl
//! placedecl  := "place" IDENT ("entry" "exit"? | "exit")? ("tc" interval)? ";"
//! transdecl  := "trans" IDENT STRING? ("guard" IDENT)? ("pre" labels)? ("post" labels)?
//!               ("tc" interval)? ("td" NAT)? ("refine" IDENT | "refinable")? ";"
//! arcdecl    := "arc" IDENT "->" IDENT ";"
//! labels     := "{" (IDENT ("," IDENT)*)? "}"
//! interval   := "[" NAT "," (NAT | "inf") "]"
//! ```
//!
//! `#` starts a comment running to the end of the line. The first net of a
//! document is the root; the others are subnets that `refine` clauses may
//! bind to.
//!
//! Pattern documents hold a single expression:
//!
//! ```text
//! pexpr := "act" "(" IDENT "," "teb" "=" interval ")"
//!        | "seq" "(" pexpr ("," pexpr)+ ("," "tec" "=" interval)? ")"
//!        | "par" "(" pexpr ("," pexpr)* ")"
//!        | "cond" "(" pexpr ("," pexpr)+ ("," "tec" "=" interval)? ")"
//!        | "loop" "(" pexpr "," "k" "=" NAT ")"
//! ```

mod lexer;
mod net_parser;
mod pattern_parser;
mod serialize;

use std::fmt;

use serde::Serialize;

pub use net_parser::{parse_net, parse_net_with, ParseOptions};
pub use pattern_parser::parse_pattern;
pub use serialize::{serialize_hierarchy, serialize_net};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    pub text: String,
    pub origin: String,
}

impl SourceDocument {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceDocument { text: text.into(), origin: origin.into() }
    }

    pub fn from_memory(text: impl Into<String>) -> Self {
        SourceDocument::new(text, "<memory>")
    }

    /// Decodes UTF-8, reporting the position of the first invalid byte.
    pub fn from_bytes(bytes: &[u8], origin: impl Into<String>) -> Result<Self, Diagnostic> {
        match std::str::from_utf8(bytes) {
            Ok(text) => Ok(SourceDocument::new(text, origin)),
            Err(e) => {
                let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
                let line = valid.matches('\n').count() + 1;
                let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
                Err(Diagnostic::error("INVALID_UTF8", "input is not valid UTF-8", Pos { line, column }))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub fn error(code: &str, message: impl Into<String>, pos: Pos) -> Self {
        Diagnostic { severity: Severity::Error, code: code.to_string(), message: message.into(), line: pos.line, column: pos.column }
    }

    pub fn warning(code: &str, message: impl Into<String>, pos: Pos) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(code, message, pos) }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}[{}]: {}", self.line, self.column, self.code, self.message)
    }
}

/// A successfully parsed value together with any warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Diagnostic>,
}
