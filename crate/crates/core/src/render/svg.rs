use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use crate::model::{NodeKind, SourceRef};
use crate::traverse::{Route, ROOT_PREFIX};

use super::layout::{EdgeStyle, LayoutGraph, PlacedNode};
use super::{num, Glyph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("route refers to node '{0}', which is not on this map")]
    UnknownRouteNode(String),
    #[error("route refers to edge '{0}', which is not on this map")]
    UnknownRouteEdge(String),
}

const STYLE: &str = "\
text{font-family:Helvetica,Arial,sans-serif;font-size:12px;fill:#222}
.lane{fill:#f6f7f9;stroke:#c9ced6}
.lane-label{font-weight:bold;font-size:14px}
.title{font-weight:bold;font-size:16px}
.node .shape{fill:#fff;stroke:#445;stroke-width:1.5}
.node.entry .shape,.node.exit .shape{fill:#eef3fb}
.node.decision .shape,.node.nested-decision .shape{fill:#fff8e6}
.node.hl .shape{stroke:#1a7f37;stroke-width:3.5}
.node.pending .shape{stroke:#bf8700;stroke-width:3}
.node.blocked .shape{stroke:#cf222e;stroke-dasharray:4 3}
.edge path{fill:none;stroke:#667;stroke-width:1.5}
.edge.dependency path{stroke:#000;stroke-dasharray:6 4}
.edge.hl path{stroke:#1a7f37;stroke-width:3.5}
.edge-label{font-size:11px;fill:#333}
.ref{font-size:9px;fill:#0550ae}
.footnotes text{font-size:11px}
";

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}

fn kind_class(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Entry => "entry",
        NodeKind::Exit => "exit",
        NodeKind::Activity => "activity",
        NodeKind::NestedActivity => "nested-activity",
        NodeKind::Decision => "decision",
        NodeKind::NestedDecision => "nested-decision",
    }
}

/// Splits a label into at most `max_lines` lines of roughly `width` chars.
fn wrap(text: &str, width: usize, max_lines: usize) -> Vec<String> {
    let mut lines: Vec<String> = Vec::new();
    let mut cur = String::new();
    for word in text.split_whitespace() {
        if !cur.is_empty() && cur.chars().count() + 1 + word.chars().count() > width {
            lines.push(std::mem::take(&mut cur));
        }
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(word);
    }
    if !cur.is_empty() {
        lines.push(cur);
    }
    if lines.len() > max_lines {
        lines.truncate(max_lines);
        if let Some(last) = lines.last_mut() {
            last.push('…');
        }
    }
    lines
}

/// Footnote numbers for `refs`, adding unseen refs to `footnotes`.
fn cite<'a>(footnotes: &mut Vec<&'a SourceRef>, refs: &'a [SourceRef]) -> String {
    let mut marks = Vec::new();
    for r in refs {
        let n = match footnotes.iter().position(|f| *f == r) {
            Some(i) => i + 1,
            None => {
                footnotes.push(r);
                footnotes.len()
            }
        };
        marks.push(n.to_string());
    }
    marks.join(",")
}

struct Highlight {
    nodes: BTreeSet<String>,
    edges: BTreeSet<String>,
    pending: BTreeSet<String>,
    blocked: BTreeSet<String>,
}

/// Maps route path-ids onto this drawing. Ids inside nested maps belong
/// to sub-map instances that are not drawn and are skipped.
fn resolve(lg: &LayoutGraph, route: &Route) -> Result<Highlight, RenderError> {
    let nested: Vec<&str> = lg.nodes.iter().filter(|n| n.kind.is_nested()).map(|n| n.id.as_str()).collect();
    let inside_nested = |local: &str| nested.iter().any(|n| local.len() > n.len() && local.starts_with(n) && local.as_bytes()[n.len()] == b'.');
    let node = |path: &str| -> Result<Option<String>, RenderError> {
        let local = path.strip_prefix(ROOT_PREFIX).ok_or_else(|| RenderError::UnknownRouteNode(path.to_string()))?;
        if lg.node(local).is_some() {
            Ok(Some(local.to_string()))
        } else if inside_nested(local) {
            Ok(None)
        } else {
            Err(RenderError::UnknownRouteNode(path.to_string()))
        }
    };
    let mut h = Highlight {
        nodes: BTreeSet::new(),
        edges: BTreeSet::new(),
        pending: BTreeSet::new(),
        blocked: BTreeSet::new(),
    };
    for s in &route.completed {
        h.nodes.extend(node(&s.node)?);
    }
    for p in &route.pending {
        h.pending.extend(node(&p.decision)?);
    }
    for b in &route.blocked {
        h.blocked.extend(node(&b.node)?);
    }
    for e in &route.live_edges {
        let local = e.strip_prefix(ROOT_PREFIX).ok_or_else(|| RenderError::UnknownRouteEdge(e.clone()))?;
        if lg.edges.iter().any(|x| x.id == local) {
            h.edges.insert(local.to_string());
        } else if !inside_nested(local) {
            return Err(RenderError::UnknownRouteEdge(e.clone()));
        }
    }
    Ok(h)
}

fn shape(out: &mut String, n: &PlacedNode) {
    let (x, y, w, h) = (n.x, n.y, n.width, n.height);
    let (cx, cy) = n.center();
    let diamond = |inset: f64| {
        format!(
            "{},{} {},{} {},{} {},{}",
            num(cx),
            num(y + inset),
            num(x + w - inset * 2.0),
            num(cy),
            num(cx),
            num(y + h - inset),
            num(x + inset * 2.0),
            num(cy)
        )
    };
    match n.glyph {
        Glyph::Terminator => {
            let _ = writeln!(
                out,
                "<rect class=\"shape\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" rx=\"{}\"/>",
                num(x),
                num(y),
                num(w),
                num(h),
                num(h / 2.0)
            );
        }
        Glyph::Box | Glyph::BoxDouble => {
            let _ = writeln!(
                out,
                "<rect class=\"shape\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                num(x),
                num(y),
                num(w),
                num(h)
            );
            if n.glyph.is_double() {
                let _ = writeln!(
                    out,
                    "<rect class=\"shape\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                    num(x + 4.0),
                    num(y + 4.0),
                    num(w - 8.0),
                    num(h - 8.0)
                );
            }
        }
        Glyph::Diamond | Glyph::DiamondDouble => {
            let _ = writeln!(out, "<polygon class=\"shape\" points=\"{}\"/>", diamond(0.0));
            if n.glyph.is_double() {
                let _ = writeln!(out, "<polygon class=\"shape\" points=\"{}\"/>", diamond(5.0));
            }
        }
    }
}

/// Standalone SVG of a laid-out map, optionally highlighting a route.
///
/// Each node group's `id` is the node's path-id. Completed nodes and live
/// edges carry the `hl` class; pending decisions and blocked nodes carry
/// `pending` and `blocked`.
pub fn emit_svg(lg: &LayoutGraph, highlight: Option<&Route>) -> Result<String, RenderError> {
    let hl = highlight.map(|r| resolve(lg, r)).transpose()?;
    let mut body = String::new();
    let _ = writeln!(body, "<text class=\"title\" x=\"16.0\" y=\"22.0\">{}</text>", esc(&lg.title));
    body.push_str("<g class=\"lanes\">\n");
    for band in &lg.lanes {
        let _ = writeln!(
            body,
            "<rect class=\"lane\" x=\"{}\" y=\"32.0\" width=\"{}\" height=\"{}\"/>",
            num(band.x0),
            num(band.x1 - band.x0),
            num(lg.height - 40.0)
        );
        if !band.label.is_empty() {
            let _ = writeln!(
                body,
                "<text class=\"lane-label\" x=\"{}\" y=\"50.0\" text-anchor=\"middle\">{}</text>",
                num((band.x0 + band.x1) / 2.0),
                esc(&band.label)
            );
        }
    }
    body.push_str("</g>\n<g class=\"edges\">\n");

    let mut footnotes: Vec<&SourceRef> = Vec::new();
    // Refs are numbered in node order first so markers read top-down.
    let node_marks: Vec<String> = lg.nodes.iter().map(|n| cite(&mut footnotes, &n.refs)).collect();
    let edge_marks: Vec<String> = lg.edges.iter().map(|e| cite(&mut footnotes, &e.refs)).collect();
    for r in &lg.doc_refs {
        if !footnotes.contains(&r) {
            footnotes.push(r);
        }
    }

    for (e, marks) in lg.edges.iter().zip(&edge_marks) {
        let mut class = format!("edge {}", e.kind.as_str().to_ascii_lowercase());
        if hl.as_ref().is_some_and(|h| h.edges.contains(&e.id)) {
            class.push_str(" hl");
        }
        let d: Vec<String> = e
            .points
            .iter()
            .enumerate()
            .map(|(i, (x, y))| format!("{}{},{}", if i == 0 { "M" } else { "L" }, num(*x), num(*y)))
            .collect();
        let arrow = if e.style == EdgeStyle::Dashed { "arrow-open" } else { "arrow" };
        let _ = writeln!(
            body,
            "<g class=\"{class}\" id=\"{}\"><path d=\"{}\" marker-end=\"url(#{arrow})\"/>",
            esc(&format!("{ROOT_PREFIX}{}", e.id)),
            d.join(" ")
        );
        if let (Some(label), Some((lx, ly))) = (&e.label, e.label_at) {
            let _ = write!(
                body,
                "<text class=\"edge-label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}",
                num(lx),
                num(ly),
                esc(label)
            );
            if !marks.is_empty() {
                let _ = write!(body, "<tspan class=\"ref\" baseline-shift=\"super\">[{marks}]</tspan>");
            }
            body.push_str("</text>\n");
        }
        body.push_str("</g>\n");
    }
    body.push_str("</g>\n<g class=\"nodes\">\n");

    for (n, marks) in lg.nodes.iter().zip(&node_marks) {
        let mut class = format!("node {}", kind_class(n.kind));
        if let Some(h) = &hl {
            for (set, name) in [(&h.nodes, " hl"), (&h.pending, " pending"), (&h.blocked, " blocked")] {
                if set.contains(&n.id) {
                    class.push_str(name);
                }
            }
        }
        let _ = writeln!(
            body,
            "<g class=\"{class}\" id=\"{}\" data-glyph=\"{}\">",
            esc(&format!("{ROOT_PREFIX}{}", n.id)),
            n.glyph.as_str()
        );
        let _ = writeln!(body, "<title>{}</title>", esc(n.prompt.as_deref().unwrap_or(&n.label)));
        shape(&mut body, n);
        let (cols, rows) = match n.glyph {
            Glyph::Diamond | Glyph::DiamondDouble => (20, 3),
            Glyph::Terminator => (18, 2),
            _ => (24, 3),
        };
        let lines = wrap(&n.label, cols, rows);
        let (cx, cy) = n.center();
        let top = cy - (lines.len() as f64 - 1.0) * 7.0 + 4.0;
        let _ = write!(body, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">", num(cx), num(top));
        for (i, line) in lines.iter().enumerate() {
            let dy = if i == 0 { "0" } else { "14" };
            let _ = write!(body, "<tspan x=\"{}\" dy=\"{dy}\">{}</tspan>", num(cx), esc(line));
        }
        if !marks.is_empty() {
            let _ = write!(body, "<tspan class=\"ref\" baseline-shift=\"super\">[{marks}]</tspan>");
        }
        body.push_str("</text>\n</g>\n");
    }
    body.push_str("</g>\n");

    let foot_top = lg.height + 12.0;
    let height = foot_top + footnotes.len() as f64 * 16.0 + 8.0;
    if !footnotes.is_empty() {
        body.push_str("<g class=\"footnotes\">\n");
        for (i, r) in footnotes.iter().enumerate() {
            let _ = writeln!(
                body,
                "<text x=\"16.0\" y=\"{}\">[{}] {}</text>",
                num(foot_top + (i as f64 + 1.0) * 16.0),
                i + 1,
                esc(&r.citation_text())
            );
        }
        body.push_str("</g>\n");
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(lg.width),
        h = num(height)
    );
    let _ = writeln!(out, "<title>{}</title>", esc(&lg.title));
    let _ = writeln!(out, "<style>\n{STYLE}</style>");
    out.push_str(
        "<defs>\n\
         <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#667\"/></marker>\n\
         <marker id=\"arrow-open\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10\" fill=\"none\" stroke=\"#000\"/></marker>\n\
         </defs>\n",
    );
    out.push_str(&body);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::layout;

    #[test]
    fn wraps_long_labels() {
        assert_eq!(wrap("a b c", 3, 3), vec!["a b", "c"]);
        assert_eq!(wrap("aaa bbb ccc ddd", 3, 2), vec!["aaa", "bbb…"]);
    }

    #[test]
    fn escapes_text() {
        let d = crate::dsl::parse(r#"lawmap m "A & <B>" { entry s "x<y" exit e flow s -> e }"#, "t").doc.unwrap();
        let svg = emit_svg(&layout(&d), None).unwrap();
        assert!(svg.contains("A &amp; &lt;B&gt;"));
        assert!(svg.contains("x&lt;y"));
        assert!(svg.contains("id=\"root/s-&gt;e\""));
    }
}
