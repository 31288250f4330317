//! JSON interchange for lawmap sets.
//!
//! Shape: `{root, docs}`; each doc is `{id, title, lanes, nodes, edges,
//! refs}`. Kind fields carry the exact enum variant names. Unknown fields
//! are rejected.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagnostic::{codes, Diagnostic};
use crate::model::{
    Edge, EdgeKind, Explanation, ExplanationKind, Lane, LawmapDoc, LawmapSet, Node, NodeKind, Origin,
    SourceRef, SourceRefKind, Span,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetDto {
    root: String,
    docs: BTreeMap<String, DocDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocDto {
    id: String,
    title: String,
    #[serde(default)]
    lanes: Vec<LaneDto>,
    #[serde(default)]
    nodes: Vec<NodeDto>,
    #[serde(default)]
    edges: Vec<EdgeDto>,
    #[serde(default)]
    refs: Vec<RefDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaneDto {
    id: String,
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplanationDto {
    kind: ExplanationKind,
    text: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct NodeDto {
    id: String,
    kind: NodeKind,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lane: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prompt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nested_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcome: Option<String>,
    #[serde(default)]
    explanations: Vec<ExplanationDto>,
    #[serde(default)]
    refs: Vec<RefDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDto {
    id: String,
    kind: EdgeKind,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    criterion: Option<String>,
    #[serde(default)]
    explanations: Vec<ExplanationDto>,
    #[serde(default)]
    refs: Vec<RefDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RefDto {
    kind: SourceRefKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    act: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    year: Option<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    section_path: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    citation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quote: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl From<&SourceRef> for RefDto {
    fn from(r: &SourceRef) -> Self {
        RefDto {
            kind: r.kind,
            act: r.act.clone(),
            year: r.year,
            section_path: r.section_path.clone(),
            citation: r.citation.clone(),
            quote: r.quote.clone(),
            note: r.note.clone(),
        }
    }
}

impl From<RefDto> for SourceRef {
    fn from(r: RefDto) -> Self {
        SourceRef {
            kind: r.kind,
            act: r.act,
            year: r.year,
            section_path: r.section_path,
            citation: r.citation,
            quote: r.quote,
            note: r.note,
        }
    }
}

fn explanations_out(e: &[Explanation]) -> Vec<ExplanationDto> {
    e.iter()
        .map(|e| ExplanationDto {
            kind: e.kind,
            text: e.text.clone(),
        })
        .collect()
}

fn explanations_in(e: Vec<ExplanationDto>) -> Vec<Explanation> {
    e.into_iter().map(|e| Explanation::new(e.kind, e.text)).collect()
}

fn doc_out(d: &LawmapDoc) -> DocDto {
    DocDto {
        id: d.id.clone(),
        title: d.title.clone(),
        lanes: d
            .lanes
            .iter()
            .map(|l| LaneDto {
                id: l.id.clone(),
                label: l.label.clone(),
            })
            .collect(),
        nodes: d
            .nodes
            .iter()
            .map(|n| NodeDto {
                id: n.id.clone(),
                kind: n.kind,
                label: n.label.clone(),
                lane: n.lane.clone(),
                prompt: n.prompt.clone(),
                nested_ref: n.nested_ref.clone(),
                outcome: n.outcome_label.clone(),
                explanations: explanations_out(&n.explanations),
                refs: n.refs.iter().map(RefDto::from).collect(),
            })
            .collect(),
        edges: d
            .edges
            .iter()
            .map(|e| EdgeDto {
                id: e.id.clone(),
                kind: e.kind,
                from: e.from.clone(),
                to: e.to.clone(),
                criterion: e.criterion.clone(),
                explanations: explanations_out(&e.explanations),
                refs: e.refs.iter().map(RefDto::from).collect(),
            })
            .collect(),
        refs: d.source_refs.iter().map(RefDto::from).collect(),
    }
}

fn doc_in(d: DocDto) -> LawmapDoc {
    LawmapDoc {
        id: d.id,
        title: d.title,
        lanes: d.lanes.into_iter().map(|l| Lane::new(l.id, l.label)).collect(),
        nodes: d
            .nodes
            .into_iter()
            .map(|n| Node {
                id: n.id,
                kind: n.kind,
                label: n.label,
                lane: n.lane,
                prompt: n.prompt,
                nested_ref: n.nested_ref,
                outcome_label: n.outcome,
                explanations: explanations_in(n.explanations),
                refs: n.refs.into_iter().map(SourceRef::from).collect(),
                origin: Origin::default(),
            })
            .collect(),
        edges: d
            .edges
            .into_iter()
            .map(|e| Edge {
                id: e.id,
                kind: e.kind,
                from: e.from,
                to: e.to,
                criterion: e.criterion,
                explanations: explanations_in(e.explanations),
                refs: e.refs.into_iter().map(SourceRef::from).collect(),
                origin: Origin::default(),
            })
            .collect(),
        source_refs: d.refs.into_iter().map(SourceRef::from).collect(),
        origin: Origin::default(),
    }
}

/// Serializes a set with deterministic key order.
pub fn to_json(set: &LawmapSet) -> String {
    serde_json::to_string_pretty(&set_out(set)).expect("lawmap DTOs always serialize")
}

pub fn to_json_value(set: &LawmapSet) -> serde_json::Value {
    serde_json::to_value(set_out(set)).expect("lawmap DTOs always serialize")
}

fn set_out(set: &LawmapSet) -> SetDto {
    SetDto {
        root: set.root.clone(),
        docs: set.docs.iter().map(|(k, d)| (k.clone(), doc_out(d))).collect(),
    }
}

/// JSON for a single document, as nested in [`to_json`] output.
pub fn doc_to_json_value(doc: &LawmapDoc) -> serde_json::Value {
    serde_json::to_value(doc_out(doc)).expect("lawmap DTOs always serialize")
}

fn tidy_serde_message(raw: &str) -> String {
    let msg = match raw.rfind(" at line ") {
        Some(i) => &raw[..i],
        None => raw,
    };
    for prefix in ["missing field", "unknown field"] {
        if let Some(rest) = msg.strip_prefix(prefix) {
            let rest = rest.trim_start();
            if let Some(inner) = rest.strip_prefix('`') {
                if let Some(end) = inner.find('`') {
                    let name = &inner[..end];
                    let tail = inner[end + 1..].trim_start_matches(',').trim();
                    return if tail.is_empty() {
                        format!("{prefix}: {name}")
                    } else {
                        format!("{prefix}: {name} ({tail})")
                    };
                }
            }
        }
    }
    msg.to_string()
}

/// Parses and schema-checks a set.
///
/// Beyond the schema, document keys must match ids, the root must exist,
/// ids must be unique (E010) and flow/dependency endpoints must name
/// nodes of the same document (E001).
pub fn from_json(text: &str) -> Result<LawmapSet, Vec<Diagnostic>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let dto: SetDto = match serde_path_to_error::deserialize(de) {
        Ok(v) => v,
        Err(err) => {
            let path = err.path().to_string();
            let inner = err.into_inner();
            let span = Span::new("<json>", (inner.line() as u32, inner.column() as u32), (inner.line() as u32, inner.column() as u32));
            let message = tidy_serde_message(&inner.to_string());
            let d = if inner.is_data() {
                let message = if path == "." { message } else { format!("{path}: {message}") };
                Diagnostic::error(codes::JSON_SCHEMA, message)
            } else {
                Diagnostic::error(codes::JSON_MALFORMED, format!("malformed JSON: {message}"))
            };
            return Err(vec![d.at(Some(&span))]);
        }
    };
    let mut diags = Vec::new();
    for (key, doc) in &dto.docs {
        if &doc.id != key {
            diags.push(Diagnostic::error(
                codes::JSON_SCHEMA,
                format!("docs.{key}.id: document id '{}' does not match its key", doc.id),
            ));
        }
    }
    if !dto.docs.contains_key(&dto.root) {
        diags.push(Diagnostic::error(
            codes::JSON_SCHEMA,
            format!("root: document '{}' not found in docs", dto.root),
        ));
    }
    let set = LawmapSet {
        root: dto.root,
        docs: dto.docs.into_iter().map(|(k, d)| (k, doc_in(d))).collect(),
    };
    for doc in set.docs.values() {
        diags.extend(integrity(doc));
    }
    if diags.is_empty() {
        Ok(set)
    } else {
        Err(diags)
    }
}

/// Duplicate ids and dangling flow/dependency endpoints.
pub(crate) fn integrity(doc: &LawmapDoc) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut dup = |what: &str, ids: &mut dyn Iterator<Item = &String>| {
        let mut seen = BTreeSet::new();
        for id in ids {
            if !seen.insert(id.as_str()) {
                out.push(
                    Diagnostic::error(codes::DUPLICATE_ID, format!("duplicate {what} id '{id}' in '{}'", doc.id))
                        .on(id.clone()),
                );
            }
        }
    };
    dup("lane", &mut doc.lanes.iter().map(|l| &l.id));
    dup("node", &mut doc.nodes.iter().map(|n| &n.id));
    dup("edge", &mut doc.edges.iter().map(|e| &e.id));
    for e in doc.edges.iter().filter(|e| e.kind != EdgeKind::MultiLevel) {
        for end in [&e.from, &e.to] {
            if doc.node(end).is_none() {
                out.push(
                    Diagnostic::error(
                        codes::EDGE_ENDPOINT_UNKNOWN,
                        format!("edge '{}' references unknown node '{end}'", e.id),
                    )
                    .at(e.origin.span())
                    .on(e.id.clone()),
                );
            }
        }
    }
    out
}
