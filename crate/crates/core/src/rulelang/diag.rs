use alloc::string::String;
use core::fmt;

use super::ast::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// Diagnostic codes. Lexical and syntax errors come from the parser; the rest
/// from validation.
pub mod code {
    pub const LEX_ERROR: &str = "LEX_ERROR";
    pub const SYNTAX_ERROR: &str = "SYNTAX_ERROR";
    pub const CF_RANGE: &str = "CF_RANGE";
    pub const BAD_IDENTIFIER: &str = "BAD_IDENTIFIER";
    pub const DUPLICATE_RULE_ID: &str = "DUPLICATE_RULE_ID";
    pub const DUPLICATE_ASKABLE: &str = "DUPLICATE_ASKABLE";
    pub const MENU_INVALID: &str = "MENU_INVALID";
    pub const EMPTY_PREMISE: &str = "EMPTY_PREMISE";
    pub const GOAL_CYCLE: &str = "GOAL_CYCLE";
    pub const ISA_CYCLE: &str = "ISA_CYCLE";
    pub const GOAL_UNPROVABLE: &str = "GOAL_UNPROVABLE";
    pub const DUPLICATE_GOAL: &str = "DUPLICATE_GOAL";
    pub const ATTRIBUTE_UNDEFINED: &str = "ATTRIBUTE_UNDEFINED";
    pub const RULE_UNREACHABLE: &str = "RULE_UNREACHABLE";
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    /// `None` for knowledge bases built in code rather than parsed.
    pub location: Option<Span>,
}

impl Diagnostic {
    pub fn error(code: &'static str, location: Option<Span>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), location }
    }

    pub fn warning(code: &'static str, location: Option<Span>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), location }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// True for lexical and syntax errors, i.e. the source is not a KB at all.
    pub fn is_syntactic(&self) -> bool {
        self.code == code::LEX_ERROR || self.code == code::SYNTAX_ERROR
    }

    /// Location-less diagnostics sort after located ones.
    pub(crate) fn sort_key(&self) -> (u32, u32) {
        match self.location {
            Some(s) if s.line > 0 => (s.line, s.col),
            _ => (u32::MAX, u32::MAX),
        }
    }
}

/// `severity code line:col message`; `-` stands in for a missing location.
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.severity.as_str(), self.code)?;
        match self.location {
            Some(s) if s.line > 0 => write!(f, "{s}")?,
            _ => f.write_str("-")?,
        }
        write!(f, " {}", self.message)
    }
}
