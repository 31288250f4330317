use std::fmt::Write;

use crate::model::{EdgeKind, LawmapDoc, Node};

use super::Glyph;

fn q(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_stmt(n: &Node, indent: &str) -> String {
    let glyph = Glyph::for_kind(n.kind);
    let shape = match glyph {
        Glyph::Terminator => "oval",
        Glyph::Box | Glyph::BoxDouble => "box",
        Glyph::Diamond | Glyph::DiamondDouble => "diamond",
    };
    let label = if n.label.is_empty() { &n.id } else { &n.label };
    let mut attrs = format!("label={}, shape={shape}", q(label));
    if glyph.is_double() {
        attrs.push_str(", peripheries=2");
    }
    format!("{indent}{} [{attrs}];\n", q(&n.id))
}

/// Graphviz source for one document.
pub fn emit_dot(doc: &LawmapDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", q(&doc.id));
    let _ = writeln!(out, "  graph [label={}, labelloc=t, rankdir=TB];", q(&doc.title));
    for lane in &doc.lanes {
        let _ = writeln!(out, "  subgraph {} {{", q(&format!("cluster_{}", lane.id)));
        let _ = writeln!(out, "    label={};", q(&lane.label));
        for n in doc.nodes.iter().filter(|n| n.lane.as_deref() == Some(lane.id.as_str())) {
            out.push_str(&node_stmt(n, "    "));
        }
        out.push_str("  }\n");
    }
    for n in &doc.nodes {
        let laned = n.lane.as_deref().is_some_and(|l| doc.lane(l).is_some());
        if !laned {
            out.push_str(&node_stmt(n, "  "));
        }
    }
    for e in &doc.edges {
        let mut attrs = Vec::new();
        if let Some(c) = &e.criterion {
            attrs.push(format!("label={}", q(c)));
        }
        match e.kind {
            EdgeKind::Flow => {}
            EdgeKind::Dependency => attrs.push("style=dashed".to_string()),
            EdgeKind::MultiLevel => {
                attrs.push("style=dotted".to_string());
                attrs.push("constraint=false".to_string());
            }
        }
        let from = match e.kind {
            EdgeKind::MultiLevel => crate::model::Edge::split_qualified(&e.from).map_or(e.from.as_str(), |(_, n)| n),
            _ => e.from.as_str(),
        };
        let attrs = if attrs.is_empty() { String::new() } else { format!(" [{}]", attrs.join(", ")) };
        let _ = writeln!(out, "  {} -> {}{attrs};", q(from), q(&e.to));
    }
    out.push_str("}\n");
    out
}
