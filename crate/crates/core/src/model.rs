//! In-memory representation of lawmaps.
//!
//! A [`LawmapDoc`] is a single map: lanes, nodes, edges and document-level
//! source references. A [`LawmapSet`] bundles the documents that reference
//! each other through nested nodes and multi-level links.
//!
//! Types here are plain values. Construction does not validate; the
//! `validate` module reports every invariant violation as a coded
//! diagnostic so broken maps can still be rendered and inspected.
//! Structural equality ignores source spans.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A region of source text, 1-based and inclusive of the start position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub file: String,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file: impl Into<String>, start: (u32, u32), end: (u32, u32)) -> Self {
        Span {
            file: file.into(),
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

/// Where an element was declared. Always compares equal, so that a
/// re-parsed document is equal to the one it was printed from.
#[derive(Debug, Clone, Default)]
pub struct Origin(pub Option<Span>);

impl PartialEq for Origin {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Origin {}

impl Origin {
    pub fn span(&self) -> Option<&Span> {
        self.0.as_ref()
    }
}

impl From<Span> for Origin {
    fn from(span: Span) -> Self {
        Origin(Some(span))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Entry,
    Exit,
    Activity,
    NestedActivity,
    Decision,
    NestedDecision,
}

impl NodeKind {
    pub const ALL: [NodeKind; 6] = [
        NodeKind::Entry,
        NodeKind::Exit,
        NodeKind::Activity,
        NodeKind::NestedActivity,
        NodeKind::Decision,
        NodeKind::NestedDecision,
    ];

    pub fn is_decision(self) -> bool {
        matches!(self, NodeKind::Decision | NodeKind::NestedDecision)
    }

    pub fn is_nested(self) -> bool {
        matches!(self, NodeKind::NestedActivity | NodeKind::NestedDecision)
    }

    pub fn is_activity(self) -> bool {
        matches!(self, NodeKind::Activity | NodeKind::NestedActivity)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Entry => "Entry",
            NodeKind::Exit => "Exit",
            NodeKind::Activity => "Activity",
            NodeKind::NestedActivity => "NestedActivity",
            NodeKind::Decision => "Decision",
            NodeKind::NestedDecision => "NestedDecision",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    Flow,
    Dependency,
    MultiLevel,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Flow => "Flow",
            EdgeKind::Dependency => "Dependency",
            EdgeKind::MultiLevel => "MultiLevel",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExplanationKind {
    Rationale,
    TaskDescription,
    ClientAdvice,
    RecordKeeping,
    Correspondence,
    Other,
}

impl ExplanationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExplanationKind::Rationale => "Rationale",
            ExplanationKind::TaskDescription => "TaskDescription",
            ExplanationKind::ClientAdvice => "ClientAdvice",
            ExplanationKind::RecordKeeping => "RecordKeeping",
            ExplanationKind::Correspondence => "Correspondence",
            ExplanationKind::Other => "Other",
        }
    }
}

/// Why an activity, decision or arrow exists, or what it involves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub kind: ExplanationKind,
    pub text: String,
}

impl Explanation {
    pub fn new(kind: ExplanationKind, text: impl Into<String>) -> Self {
        Explanation {
            kind,
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceRefKind {
    Statute,
    CaseLaw,
    PracticeRule,
    Text,
}

/// A traceability citation back to legislation, case law, a practice rule
/// or other source material.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceRef {
    pub kind: SourceRefKind,
    pub act: Option<String>,
    pub year: Option<i32>,
    /// Section path segments, e.g. `["24C", "(3)", "(a)"]`. Empty when absent.
    pub section_path: Vec<String>,
    pub citation: Option<String>,
    pub quote: Option<String>,
    pub note: Option<String>,
}

impl Default for SourceRefKind {
    fn default() -> Self {
        SourceRefKind::Text
    }
}

impl SourceRef {
    pub fn statute<S: Into<String>>(act: impl Into<String>, path: impl IntoIterator<Item = S>) -> Self {
        SourceRef {
            kind: SourceRefKind::Statute,
            act: Some(act.into()),
            section_path: path.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn case(citation: impl Into<String>) -> Self {
        SourceRef {
            kind: SourceRefKind::CaseLaw,
            citation: Some(citation.into()),
            ..Default::default()
        }
    }

    pub fn rule(citation: impl Into<String>) -> Self {
        SourceRef {
            kind: SourceRefKind::PracticeRule,
            citation: Some(citation.into()),
            ..Default::default()
        }
    }

    pub fn text(note: impl Into<String>) -> Self {
        SourceRef {
            kind: SourceRefKind::Text,
            note: Some(note.into()),
            ..Default::default()
        }
    }

    pub fn with_quote(mut self, quote: impl Into<String>) -> Self {
        self.quote = Some(quote.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Human-readable citation, e.g. `Landlord and Tenant Act 1954 s24C(3)(a)`.
    pub fn citation_text(&self) -> String {
        let mut out = String::new();
        match self.kind {
            SourceRefKind::Statute => {
                if let Some(act) = &self.act {
                    out.push_str(act);
                }
                if let Some(year) = self.year {
                    out.push_str(&format!(" {year}"));
                }
                if !self.section_path.is_empty() {
                    out.push_str(" s");
                    out.push_str(&self.section_path.concat());
                }
                if let Some(note) = &self.note {
                    out.push_str(&format!(" ({note})"));
                }
            }
            SourceRefKind::CaseLaw | SourceRefKind::PracticeRule => {
                if let Some(note) = &self.note {
                    out.push_str(note);
                    out.push(' ');
                }
                if let Some(citation) = &self.citation {
                    out.push_str(citation);
                }
                if let Some(year) = self.year {
                    out.push_str(&format!(" ({year})"));
                }
            }
            SourceRefKind::Text => {
                if let Some(note) = &self.note {
                    out.push_str(note);
                }
                if let Some(year) = self.year {
                    out.push_str(&format!(" ({year})"));
                }
            }
        }
        if let Some(quote) = &self.quote {
            out.push_str(&format!(": \"{quote}\""));
        }
        out.trim().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lane {
    pub id: String,
    pub label: String,
    pub origin: Origin,
}

impl Lane {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Lane {
            id: id.into(),
            label: label.into(),
            origin: Origin::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub lane: Option<String>,
    /// The question asked at a decision; drives the walkthrough prompt.
    pub prompt: Option<String>,
    /// Target document of a nested activity or decision.
    pub nested_ref: Option<String>,
    /// Outcome reported by an exit when its map resolves a nested decision.
    pub outcome_label: Option<String>,
    pub explanations: Vec<Explanation>,
    pub refs: Vec<SourceRef>,
    pub origin: Origin,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind, label: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            kind,
            label: label.into(),
            lane: None,
            prompt: None,
            nested_ref: None,
            outcome_label: None,
            explanations: Vec::new(),
            refs: Vec::new(),
            origin: Origin::default(),
        }
    }

    pub fn in_lane(mut self, lane: impl Into<String>) -> Self {
        self.lane = Some(lane.into());
        self
    }

    pub fn with_prompt(mut self, prompt: impl Into<String>) -> Self {
        self.prompt = Some(prompt.into());
        self
    }

    pub fn with_map(mut self, doc_id: impl Into<String>) -> Self {
        self.nested_ref = Some(doc_id.into());
        self
    }

    pub fn with_outcome(mut self, outcome: impl Into<String>) -> Self {
        self.outcome_label = Some(outcome.into());
        self
    }

    pub fn with_ref(mut self, r: SourceRef) -> Self {
        self.refs.push(r);
        self
    }

    pub fn with_explanation(mut self, e: Explanation) -> Self {
        self.explanations.push(e);
        self
    }

    /// Text shown when the node is asked as a question.
    pub fn question(&self) -> &str {
        self.prompt.as_deref().unwrap_or(&self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub kind: EdgeKind,
    /// Node id; for `MultiLevel` edges a `doc.node` reference.
    pub from: String,
    pub to: String,
    pub criterion: Option<String>,
    pub explanations: Vec<Explanation>,
    pub refs: Vec<SourceRef>,
    pub origin: Origin,
}

impl Edge {
    /// Id an edge receives when declared in the textual syntax.
    ///
    /// Flow edges are `from->to`, with the criterion appended in brackets
    /// when labelled; dependencies use `~>`; links use `->` between
    /// qualified endpoints.
    pub fn derive_id(kind: EdgeKind, from: &str, to: &str, criterion: Option<&str>) -> String {
        match (kind, criterion) {
            (EdgeKind::Flow, Some(c)) => format!("{from}->{to}[{c}]"),
            (EdgeKind::Flow, None) | (EdgeKind::MultiLevel, _) => format!("{from}->{to}"),
            (EdgeKind::Dependency, _) => format!("{from}~>{to}"),
        }
    }

    fn with_kind(kind: EdgeKind, from: String, to: String, criterion: Option<String>) -> Self {
        Edge {
            id: Edge::derive_id(kind, &from, &to, criterion.as_deref()),
            kind,
            from,
            to,
            criterion,
            explanations: Vec::new(),
            refs: Vec::new(),
            origin: Origin::default(),
        }
    }

    pub fn flow(from: impl Into<String>, to: impl Into<String>) -> Self {
        Edge::with_kind(EdgeKind::Flow, from.into(), to.into(), None)
    }

    pub fn branch(from: impl Into<String>, to: impl Into<String>, criterion: impl Into<String>) -> Self {
        Edge::with_kind(EdgeKind::Flow, from.into(), to.into(), Some(criterion.into()))
    }

    /// A dependency edge pointing prerequisite → dependent.
    pub fn dependency(prerequisite: impl Into<String>, dependent: impl Into<String>) -> Self {
        Edge::with_kind(EdgeKind::Dependency, prerequisite.into(), dependent.into(), None)
    }

    pub fn link(from_doc: &str, from_exit: &str, to_doc: &str, to_entry: &str) -> Self {
        Edge::with_kind(
            EdgeKind::MultiLevel,
            format!("{from_doc}.{from_exit}"),
            format!("{to_doc}.{to_entry}"),
            None,
        )
    }

    pub fn with_explanation(mut self, e: Explanation) -> Self {
        self.explanations.push(e);
        self
    }

    pub fn with_ref(mut self, r: SourceRef) -> Self {
        self.refs.push(r);
        self
    }

    /// Splits a `MultiLevel` endpoint into `(doc, node)` at the first dot.
    pub fn split_qualified(endpoint: &str) -> Option<(&str, &str)> {
        let (doc, node) = endpoint.split_once('.')?;
        (!doc.is_empty() && !node.is_empty()).then_some((doc, node))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawmapDoc {
    pub id: String,
    pub title: String,
    pub lanes: Vec<Lane>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub source_refs: Vec<SourceRef>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown node id '{0}'")]
    UnknownNode(String),
}

impl LawmapDoc {
    pub fn new(id: impl Into<String>, title: impl Into<String>) -> Self {
        LawmapDoc {
            id: id.into(),
            title: title.into(),
            lanes: Vec::new(),
            nodes: Vec::new(),
            edges: Vec::new(),
            source_refs: Vec::new(),
            origin: Origin::default(),
        }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn lane(&self, id: &str) -> Option<&Lane> {
        self.lanes.iter().find(|l| l.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn flows(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Flow)
    }

    pub fn outgoing_flows<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.flows().filter(move |e| e.from == node)
    }

    pub fn incoming_flows<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.flows().filter(move |e| e.to == node)
    }

    pub fn nodes_of(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    /// Entry and exit node ids, in declaration order.
    pub fn entry_exit_sets(&self) -> (Vec<String>, Vec<String>) {
        let ids = |kind| self.nodes_of(kind).map(|n| n.id.clone()).collect();
        (ids(NodeKind::Entry), ids(NodeKind::Exit))
    }

    /// Incoming and outgoing Flow edge counts for a node.
    pub fn flow_degree(&self, node: &str) -> (usize, usize) {
        (self.incoming_flows(node).count(), self.outgoing_flows(node).count())
    }

    /// Transitive closure over Flow edges from `start`.
    ///
    /// Dependency and multi-level edges do not convey reachability.
    pub fn reachable_set<S: AsRef<str>>(&self, start: &[S]) -> Result<BTreeSet<String>, ModelError> {
        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in self.flows() {
            adjacency.entry(e.from.as_str()).or_default().push(e.to.as_str());
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        for s in start {
            let s = s.as_ref();
            if self.node(s).is_none() {
                return Err(ModelError::UnknownNode(s.to_string()));
            }
            if seen.insert(s.to_string()) {
                queue.push_back(s);
            }
        }
        while let Some(cur) = queue.pop_front() {
            for &next in adjacency.get(cur).into_iter().flatten() {
                if self.node(next).is_some() && seen.insert(next.to_string()) {
                    queue.push_back(next);
                }
            }
        }
        Ok(seen)
    }

    /// Documents referenced by nested nodes and outgoing links.
    pub fn referenced_docs(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        let nested = self.nodes.iter().filter_map(|n| n.nested_ref.as_deref());
        let linked = self
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::MultiLevel)
            .filter_map(|e| Edge::split_qualified(&e.to).map(|(d, _)| d));
        for d in nested.chain(linked) {
            if !out.contains(&d) {
                out.push(d);
            }
        }
        out
    }
}

/// A root document and every document it can reach by reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawmapSet {
    pub docs: BTreeMap<String, LawmapDoc>,
    pub root: String,
}

impl LawmapSet {
    pub fn single(doc: LawmapDoc) -> Self {
        let root = doc.id.clone();
        let mut docs = BTreeMap::new();
        docs.insert(root.clone(), doc);
        LawmapSet { docs, root }
    }

    /// Builds a set whose root is the first document.
    pub fn from_docs(docs: impl IntoIterator<Item = LawmapDoc>) -> Option<Self> {
        let mut iter = docs.into_iter();
        let first = iter.next()?;
        let mut set = LawmapSet::single(first);
        for d in iter {
            set.docs.insert(d.id.clone(), d);
        }
        Some(set)
    }

    pub fn root_doc(&self) -> &LawmapDoc {
        &self.docs[&self.root]
    }

    pub fn doc(&self, id: &str) -> Option<&LawmapDoc> {
        self.docs.get(id)
    }

    /// Documents with the root first, then the rest by id.
    pub fn ordered_docs(&self) -> impl Iterator<Item = &LawmapDoc> {
        self.docs
            .get(&self.root)
            .into_iter()
            .chain(self.docs.values().filter(move |d| d.id != self.root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> LawmapDoc {
        let mut d = LawmapDoc::new("m", "T");
        d.nodes.push(Node::new("s", NodeKind::Entry, ""));
        d.nodes.push(Node::new("a", NodeKind::Activity, "A"));
        d.nodes.push(Node::new("e", NodeKind::Exit, ""));
        d.edges.push(Edge::flow("s", "a"));
        d.edges.push(Edge::flow("a", "e"));
        d
    }

    #[test]
    fn empty_doc_has_no_entries_or_exits() {
        let d = LawmapDoc::new("m", "T");
        assert_eq!(d.entry_exit_sets(), (vec![], vec![]));
    }

    #[test]
    fn reachable_over_chain() {
        let d = chain();
        let (entries, _) = d.entry_exit_sets();
        let r = d.reachable_set(&entries).unwrap();
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec!["a", "e", "s"]);
        assert_eq!(d.reachable_set(&["e"]).unwrap().len(), 1);
    }

    #[test]
    fn reachable_ignores_dependencies() {
        let mut d = chain();
        d.nodes.push(Node::new("x", NodeKind::Activity, "X"));
        d.edges.push(Edge::dependency("a", "x"));
        assert!(!d.reachable_set(&["s"]).unwrap().contains("x"));
    }

    #[test]
    fn reachable_unknown_start() {
        let d = chain();
        assert_eq!(
            d.reachable_set(&["nope"]),
            Err(ModelError::UnknownNode("nope".into()))
        );
    }

    #[test]
    fn equality_ignores_spans() {
        let a = chain();
        let mut b = chain();
        b.nodes[0].origin = Span::new("f", (1, 1), (1, 5)).into();
        assert_eq!(a, b);
        b.nodes[0].label = "changed".into();
        assert_ne!(a, b);
    }

    #[test]
    fn derived_edge_ids() {
        assert_eq!(Edge::flow("a", "b").id, "a->b");
        assert_eq!(Edge::branch("d", "b", "yes").id, "d->b[yes]");
        assert_eq!(Edge::dependency("a", "b").id, "a~>b");
        assert_eq!(Edge::link("m", "x", "n", "s").id, "m.x->n.s");
    }

    #[test]
    fn statute_citation_text() {
        let r = SourceRef::statute("Landlord and Tenant Act 1954", ["24C", "(3)", "(a)"])
            .with_quote("differs substantially");
        assert_eq!(
            r.citation_text(),
            "Landlord and Tenant Act 1954 s24C(3)(a): \"differs substantially\""
        );
    }
}
