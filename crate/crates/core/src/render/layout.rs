use std::collections::{BTreeMap, HashMap};

use crate::model::{EdgeKind, LawmapDoc, NodeKind, SourceRef};

use super::Glyph;

const COL_W: f64 = 200.0;
const ROW_H: f64 = 130.0;
const BAND_PAD: f64 = 16.0;
const TOP: f64 = 56.0;
const SWEEPS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub prompt: Option<String>,
    pub lane: Option<String>,
    pub glyph: Glyph,
    pub layer: usize,
    /// Top-left corner.
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub refs: Vec<SourceRef>,
}

impl PlacedNode {
    pub fn center(&self) -> (f64, f64) {
        (self.x + self.width / 2.0, self.y + self.height / 2.0)
    }

    /// True when the two boxes share interior area.
    pub fn overlaps(&self, other: &PlacedNode) -> bool {
        self.x < other.x + other.width
            && other.x < self.x + self.width
            && self.y < other.y + other.height
            && other.y < self.y + self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeStyle {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutedEdge {
    pub id: String,
    pub kind: EdgeKind,
    pub from: String,
    pub to: String,
    pub points: Vec<(f64, f64)>,
    pub style: EdgeStyle,
    pub arrowhead: &'static str,
    pub label: Option<String>,
    pub label_at: Option<(f64, f64)>,
    pub refs: Vec<SourceRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneBand {
    /// `None` for the band holding unlaned nodes.
    pub lane: Option<String>,
    pub label: String,
    pub x0: f64,
    pub x1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutGraph {
    pub doc_id: String,
    pub title: String,
    pub width: f64,
    pub height: f64,
    pub nodes: Vec<PlacedNode>,
    pub edges: Vec<RoutedEdge>,
    pub lanes: Vec<LaneBand>,
    pub doc_refs: Vec<SourceRef>,
}

impl LayoutGraph {
    pub fn node(&self, id: &str) -> Option<&PlacedNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

/// Longest-path layers over flow edges, ignoring edges that close a cycle.
fn layers(doc: &LawmapDoc, index: &HashMap<&str, usize>) -> Vec<usize> {
    let n = doc.nodes.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in doc.flows() {
        if let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) {
            succ[a].push(b);
        }
    }
    // Drop back edges found by a depth-first search in declaration order.
    let mut state = vec![0u8; n];
    let mut dag: Vec<Vec<usize>> = vec![Vec::new(); n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (v, ref mut k)) = stack.last_mut() {
            if *k < succ[v].len() {
                let w = succ[v][*k];
                *k += 1;
                match state[w] {
                    0 => {
                        dag[v].push(w);
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    2 => dag[v].push(w),
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    let mut indeg = vec![0usize; n];
    for v in 0..n {
        for &w in &dag[v] {
            indeg[w] += 1;
        }
    }
    let mut layer = vec![0usize; n];
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut head = 0;
    while head < ready.len() {
        let v = ready[head];
        head += 1;
        for &w in &dag[v] {
            layer[w] = layer[w].max(layer[v] + 1);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    layer
}

/// Positions every node and routes every same-document edge.
pub fn layout(doc: &LawmapDoc) -> LayoutGraph {
    let index: HashMap<&str, usize> = doc.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let layer = layers(doc, &index);

    let mut bands: Vec<LaneBand> = doc
        .lanes
        .iter()
        .map(|l| LaneBand {
            lane: Some(l.id.clone()),
            label: l.label.clone(),
            x0: 0.0,
            x1: 0.0,
        })
        .collect();
    let band_of: Vec<usize> = doc
        .nodes
        .iter()
        .map(|n| {
            n.lane
                .as_deref()
                .and_then(|l| doc.lanes.iter().position(|x| x.id == l))
                .unwrap_or(doc.lanes.len())
        })
        .collect();
    if band_of.iter().any(|&b| b == doc.lanes.len()) || bands.is_empty() {
        bands.push(LaneBand {
            lane: None,
            label: String::new(),
            x0: 0.0,
            x1: 0.0,
        });
    }

    // Groups of nodes sharing a band and layer, in slot order.
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for i in 0..doc.nodes.len() {
        groups.entry((layer[i], band_of[i])).or_default().push(i);
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); doc.nodes.len()];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); doc.nodes.len()];
    for e in doc.flows() {
        if let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) {
            if a != b {
                succs[a].push(b);
                preds[b].push(a);
            }
        }
    }
    let max_layer = layer.iter().copied().max().unwrap_or(0);
    let proxy = |groups: &BTreeMap<(usize, usize), Vec<usize>>| {
        let mut pos = vec![0.0; doc.nodes.len()];
        for ((_, band), members) in groups {
            for (slot, &v) in members.iter().enumerate() {
                pos[v] = (*band as f64) * 10_000.0 + slot as f64;
            }
        }
        pos
    };
    for sweep in 0..SWEEPS {
        let down = sweep % 2 == 0;
        let order: Vec<usize> = if down { (1..=max_layer).collect() } else { (0..max_layer).rev().collect() };
        for l in order {
            let pos = proxy(&groups);
            for ((gl, _), members) in groups.iter_mut() {
                if *gl != l {
                    continue;
                }
                let mut keyed: Vec<(f64, &str, usize)> = members
                    .iter()
                    .map(|&v| {
                        let nbrs = if down { &preds[v] } else { &succs[v] };
                        let mut vals: Vec<f64> = nbrs.iter().map(|&u| pos[u]).collect();
                        vals.sort_by(f64::total_cmp);
                        let m = if vals.is_empty() { pos[v] } else { vals[(vals.len() - 1) / 2] };
                        (m, doc.nodes[v].id.as_str(), v)
                    })
                    .collect();
                keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
                *members = keyed.into_iter().map(|(_, _, v)| v).collect();
            }
        }
    }

    let mut band_cols = vec![1usize; bands.len()];
    for ((_, band), members) in &groups {
        band_cols[*band] = band_cols[*band].max(members.len());
    }
    let mut x = BAND_PAD;
    for (b, band) in bands.iter_mut().enumerate() {
        band.x0 = x;
        band.x1 = x + band_cols[b] as f64 * COL_W + 2.0 * BAND_PAD;
        x = band.x1 + BAND_PAD;
    }
    let width = x;
    let height = TOP + (max_layer + 1) as f64 * ROW_H + BAND_PAD;

    let mut slot = vec![0usize; doc.nodes.len()];
    for members in groups.values() {
        for (s, &v) in members.iter().enumerate() {
            slot[v] = s;
        }
    }
    let nodes: Vec<PlacedNode> = doc
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let glyph = Glyph::for_kind(n.kind);
            let (w, h) = glyph.size();
            let cx = bands[band_of[i]].x0 + BAND_PAD + slot[i] as f64 * COL_W + COL_W / 2.0;
            let cy = TOP + layer[i] as f64 * ROW_H + ROW_H / 2.0;
            PlacedNode {
                id: n.id.clone(),
                kind: n.kind,
                label: if n.label.is_empty() { n.id.clone() } else { n.label.clone() },
                prompt: n.prompt.clone(),
                lane: n.lane.clone(),
                glyph,
                layer: layer[i],
                x: cx - w / 2.0,
                y: cy - h / 2.0,
                width: w,
                height: h,
                refs: n.refs.clone(),
            }
        })
        .collect();

    let mut parallel: HashMap<(&str, &str), usize> = HashMap::new();
    let mut edges = Vec::new();
    for e in &doc.edges {
        if e.kind == EdgeKind::MultiLevel {
            continue;
        }
        let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) else {
            continue;
        };
        let k = parallel.entry((e.from.as_str(), e.to.as_str())).or_insert(0);
        let shift = *k as f64 * 14.0;
        *k += 1;
        let (s, t) = (&nodes[a], &nodes[b]);
        let (sx, sy) = s.center();
        let (tx, ty) = t.center();
        let points = if a == b {
            let r = s.x + s.width;
            vec![(r, sy - 8.0), (r + 24.0 + shift, sy - 8.0), (r + 24.0 + shift, sy + 8.0), (r, sy + 8.0)]
        } else if t.layer > s.layer {
            let mid = s.y + s.height + (ROW_H - s.height) / 2.0 + shift;
            vec![(sx + shift, s.y + s.height), (sx + shift, mid), (tx + shift, mid), (tx + shift, t.y)]
        } else if t.layer == s.layer {
            let (from_x, to_x) = if tx >= sx { (s.x + s.width, t.x) } else { (s.x, t.x + t.width) };
            vec![(from_x, sy + shift), (to_x, ty + shift)]
        } else {
            let r = s.x.max(t.x) + s.width.max(t.width) + 12.0 + shift;
            vec![(s.x + s.width, sy), (r, sy), (r, ty), (t.x + t.width, ty)]
        };
        let label_at = e.criterion.as_ref().map(|_| {
            let i = (points.len() - 1) / 2;
            let (p, q) = (points[i], points[i + 1]);
            let lx = ((p.0 + q.0) / 2.0).clamp(0.0, width);
            let ly = ((p.1 + q.1) / 2.0 - 4.0).clamp(0.0, height);
            (lx, ly)
        });
        edges.push(RoutedEdge {
            id: e.id.clone(),
            kind: e.kind,
            from: e.from.clone(),
            to: e.to.clone(),
            points,
            style: if e.kind == EdgeKind::Dependency { EdgeStyle::Dashed } else { EdgeStyle::Solid },
            arrowhead: if e.kind == EdgeKind::Dependency { "open" } else { "normal" },
            label: e.criterion.clone(),
            label_at,
            refs: e.refs.clone(),
        });
    }

    LayoutGraph {
        doc_id: doc.id.clone(),
        title: doc.title.clone(),
        width,
        height,
        nodes,
        edges,
        lanes: bands,
        doc_refs: doc.source_refs.clone(),
    }
}
