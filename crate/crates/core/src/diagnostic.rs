//! Coded diagnostics shared by the parser, the JSON reader, the outline
//! compiler and the validator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
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

/// Every diagnostic code this crate emits.
///
/// `E`/`W` codes come from the semantic rule set; `P` codes are lexical
/// and syntax errors, `J` codes JSON interchange errors and `O` codes
/// outline listing errors.
pub mod codes {
    pub const EDGE_ENDPOINT_UNKNOWN: &str = "E001";
    pub const DECISION_TOO_FEW_BRANCHES: &str = "E002";
    pub const DUPLICATE_CRITERION: &str = "E003";
    pub const MISSING_CRITERION: &str = "E004";
    pub const TERMINAL_MISUSE: &str = "E005";
    pub const UNRESOLVED_REFERENCE: &str = "E006";
    pub const CYCLIC_NESTING: &str = "E007";
    pub const FLOW_CYCLE: &str = "E008";
    pub const MALFORMED_ELEMENT: &str = "E009";
    pub const DUPLICATE_ID: &str = "E010";
    pub const NESTED_OUTCOME_MISMATCH: &str = "E011";

    pub const UNREACHABLE: &str = "W001";
    pub const DECISION_UNCITED: &str = "W002";
    pub const SAME_LANE_DEPENDENCY: &str = "W003";
    pub const CRITERION_ON_NON_DECISION: &str = "W004";
    pub const LIKELY_DECISION: &str = "W005";
    pub const DEAD_END: &str = "W006";

    pub const LEXICAL: &str = "P001";
    pub const SYNTAX: &str = "P002";

    pub const JSON_MALFORMED: &str = "J001";
    pub const JSON_SCHEMA: &str = "J002";

    pub const OUTLINE_INDENT: &str = "O001";
    pub const OUTLINE_SEQUENCE: &str = "O002";
    pub const OUTLINE_STRUCTURE: &str = "O003";

    /// All registered codes, in registry order.
    pub const REGISTRY: &[&str] = &[
        EDGE_ENDPOINT_UNKNOWN,
        DECISION_TOO_FEW_BRANCHES,
        DUPLICATE_CRITERION,
        MISSING_CRITERION,
        TERMINAL_MISUSE,
        UNRESOLVED_REFERENCE,
        CYCLIC_NESTING,
        FLOW_CYCLE,
        MALFORMED_ELEMENT,
        DUPLICATE_ID,
        NESTED_OUTCOME_MISMATCH,
        UNREACHABLE,
        DECISION_UNCITED,
        SAME_LANE_DEPENDENCY,
        CRITERION_ON_NON_DECISION,
        LIKELY_DECISION,
        DEAD_END,
        LEXICAL,
        SYNTAX,
        JSON_MALFORMED,
        JSON_SCHEMA,
        OUTLINE_INDENT,
        OUTLINE_SEQUENCE,
        OUTLINE_STRUCTURE,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub span: Option<Span>,
    /// Id of the node or edge the diagnostic is about.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub node_or_edge: Option<String>,
}

impl Diagnostic {
    pub fn error(code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code: code.to_string(),
            message: message.into(),
            span: None,
            node_or_edge: None,
        }
    }

    pub fn warning(code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, message)
        }
    }

    pub fn at(mut self, span: Option<&Span>) -> Self {
        self.span = span.cloned();
        self
    }

    pub fn on(mut self, id: impl Into<String>) -> Self {
        self.node_or_edge = Some(id.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `<file>:<line>:<col>: <severity> <code>: <message>`, using
    /// `fallback_file` when the diagnostic has no span.
    pub fn render(&self, fallback_file: &str) -> String {
        match &self.span {
            Some(s) => format!(
                "{}:{}:{}: {} {}: {}",
                s.file,
                s.start_line,
                s.start_col,
                self.severity.as_str(),
                self.code,
                self.message
            ),
            None => format!(
                "{}: {} {}: {}",
                fallback_file,
                self.severity.as_str(),
                self.code,
                self.message
            ),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("<input>"))
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
