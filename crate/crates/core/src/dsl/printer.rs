use std::fmt::Write;

use crate::model::{EdgeKind, Explanation, ExplanationKind, LawmapDoc, LawmapSet, NodeKind, SourceRef, SourceRefKind};

use super::parser::NOTE_KINDS;

/// Quotes and escapes a string literal.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text of one document.
///
/// Lanes come first, then document-level refs, nodes and edges, each in
/// declaration order. Edge ids are not written; the parser derives them
/// from the endpoints and criterion.
pub fn print_canonical(doc: &LawmapDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lawmap {} {} {{", doc.id, quote(&doc.title));
    for lane in &doc.lanes {
        let _ = writeln!(out, "  lane {} {}", lane.id, quote(&lane.label));
    }
    for r in &doc.source_refs {
        let _ = writeln!(out, "  {}", print_ref(r));
    }
    for n in &doc.nodes {
        let mut line = String::from("  ");
        let kw = match n.kind {
            NodeKind::Entry => "entry",
            NodeKind::Exit => "exit",
            NodeKind::Activity => "activity",
            NodeKind::Decision => "decision",
            NodeKind::NestedActivity => "nested activity",
            NodeKind::NestedDecision => "nested decision",
        };
        let _ = write!(line, "{kw} {}", n.id);
        if n.kind.is_nested() {
            let _ = write!(line, " {} map {}", quote(&n.label), n.nested_ref.as_deref().unwrap_or_default());
        } else if !n.label.is_empty() {
            let _ = write!(line, " {}", quote(&n.label));
        }
        if let Some(lane) = &n.lane {
            let _ = write!(line, " in {lane}");
        }
        if let Some(p) = &n.prompt {
            let _ = write!(line, " prompt {}", quote(p));
        }
        if !n.kind.is_nested() {
            if let Some(o) = &n.outcome_label {
                let _ = write!(line, " outcome {}", quote(o));
            }
        }
        out.push_str(&line);
        print_body(&mut out, &n.explanations, &n.refs);
    }
    for e in &doc.edges {
        let kw = match e.kind {
            EdgeKind::Flow => "flow",
            EdgeKind::Dependency => "depends",
            EdgeKind::MultiLevel => "link",
        };
        let _ = write!(out, "  {kw} {} -> {}", e.from, e.to);
        if e.kind == EdgeKind::Flow {
            if let Some(c) = &e.criterion {
                let _ = write!(out, " [label {}]", quote(c));
            }
        }
        print_body(&mut out, &e.explanations, &e.refs);
    }
    out.push_str("}\n");
    out
}

/// Canonical text of a set: the root first, then the others by id.
pub fn print_set(set: &LawmapSet) -> String {
    set.ordered_docs().map(print_canonical).collect::<Vec<_>>().join("\n")
}

fn print_body(out: &mut String, notes: &[Explanation], refs: &[SourceRef]) {
    if notes.is_empty() && refs.is_empty() {
        out.push('\n');
        return;
    }
    out.push_str(" {\n");
    for n in notes {
        let word = NOTE_KINDS.iter().find(|(_, k)| *k == n.kind).map(|(w, _)| *w);
        match (n.kind, word) {
            (ExplanationKind::Other, _) | (_, None) => {
                let _ = writeln!(out, "    note {}", quote(&n.text));
            }
            (_, Some(w)) => {
                let _ = writeln!(out, "    note {w} {}", quote(&n.text));
            }
        }
    }
    for r in refs {
        let _ = writeln!(out, "    {}", print_ref(r));
    }
    out.push_str("  }\n");
}

fn print_ref(r: &SourceRef) -> String {
    let mut s = String::from("ref ");
    match r.kind {
        SourceRefKind::Statute => {
            let _ = write!(s, "statute {} s", quote(r.act.as_deref().unwrap_or_default()));
            for seg in &r.section_path {
                let _ = write!(s, " {}", quote(seg));
            }
        }
        SourceRefKind::CaseLaw => {
            let _ = write!(s, "case {}", quote(r.citation.as_deref().unwrap_or_default()));
        }
        SourceRefKind::PracticeRule => {
            let _ = write!(s, "rule {}", quote(r.citation.as_deref().unwrap_or_default()));
        }
        SourceRefKind::Text => {
            let _ = write!(s, "text {}", quote(r.note.as_deref().unwrap_or_default()));
        }
    }
    if let Some(y) = r.year {
        let _ = write!(s, " year {y}");
    }
    if let Some(q) = &r.quote {
        let _ = write!(s, " quote {}", quote(q));
    }
    if r.kind != SourceRefKind::Text {
        if let Some(n) = &r.note {
            let _ = write!(s, " memo {}", quote(n));
        }
    }
    s
}
