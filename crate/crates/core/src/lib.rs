//! Lawmaps: flowchart models of legislation and lawyerly processes.
//!
//! The crate parses the `.lawmap` authoring language, validates maps
//! against a coded rule set, traverses them given answers to decision
//! criteria, compiles plain-language listings into draft maps and renders
//! DOT and SVG.

pub mod diagnostic;
pub mod dsl;
pub mod fixtures;
pub mod model;
pub mod outline;
pub mod render;
pub mod traverse;
pub mod validate;

pub use diagnostic::{Diagnostic, Severity};
pub use model::{Edge, EdgeKind, Explanation, ExplanationKind, Lane, LawmapDoc, LawmapSet, Node, NodeKind, SourceRef, SourceRefKind, Span};
pub use traverse::{Assignment, Mode, Route, RouteStatus};
pub use validate::{check, resolve_set, ResolvedSet};
