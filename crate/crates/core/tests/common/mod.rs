#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lawmap_core::model::{Edge, EdgeKind, Explanation, ExplanationKind, Lane, LawmapDoc, LawmapSet, Node, NodeKind, SourceRef};
use lawmap_core::traverse::{Assignment, Mode, Route};
use lawmap_core::validate::{check, resolve_set, ResolvedSet};
use lawmap_core::diagnostic::has_errors;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "tenant", "landlord", "notice", "rent", "lease", "court", "grant", "\"quoted\"", "back\\slash", "line\nbreak", "tab\there",
    "ünïcødé", "§24C", "→", "in", "flow", "{brace}", "[bracket]", "# hash", "",
];

pub fn text(rng: &mut StdRng, max_words: usize) -> String {
    let n = rng.gen_range(1..=max_words);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn nonempty_text(rng: &mut StdRng) -> String {
    let t = text(rng, 4);
    if t.trim().is_empty() {
        "x".to_string()
    } else {
        t
    }
}

fn source_ref(rng: &mut StdRng) -> SourceRef {
    let mut r = match rng.gen_range(0..4) {
        0 => {
            let segs: Vec<String> = (0..rng.gen_range(1..4)).map(|i| format!("({i})")).collect();
            SourceRef::statute(nonempty_text(rng), segs)
        }
        1 => SourceRef::case(nonempty_text(rng)),
        2 => SourceRef::rule(nonempty_text(rng)),
        _ => SourceRef::text(nonempty_text(rng)),
    };
    if rng.gen_bool(0.4) {
        r.year = Some(rng.gen_range(1900..2030));
    }
    if rng.gen_bool(0.4) {
        r.quote = Some(nonempty_text(rng));
    }
    if r.kind != lawmap_core::SourceRefKind::Text && rng.gen_bool(0.3) {
        r.note = Some(nonempty_text(rng));
    }
    r
}

fn explanation(rng: &mut StdRng) -> Explanation {
    let kinds = [
        ExplanationKind::Rationale,
        ExplanationKind::TaskDescription,
        ExplanationKind::ClientAdvice,
        ExplanationKind::RecordKeeping,
        ExplanationKind::Correspondence,
        ExplanationKind::Other,
    ];
    Explanation::new(*kinds.choose(rng).unwrap(), nonempty_text(rng))
}

fn annotate(rng: &mut StdRng, notes: &mut Vec<Explanation>, refs: &mut Vec<SourceRef>) {
    for _ in 0..rng.gen_range(0..3) {
        if rng.gen_bool(0.5) {
            notes.push(explanation(rng));
        }
    }
    for _ in 0..rng.gen_range(0..3) {
        if rng.gen_bool(0.5) {
            refs.push(source_ref(rng));
        }
    }
}

/// A syntactically well-formed document with arbitrary structure, used
/// for print/parse round trips. It need not pass validation.
pub fn random_doc(rng: &mut StdRng, max_nodes: usize) -> LawmapDoc {
    let mut d = LawmapDoc::new(format!("doc{}", rng.gen_range(0..1000)), text(rng, 5));
    for i in 0..rng.gen_range(0..4) {
        d.lanes.push(Lane::new(format!("lane{i}"), text(rng, 2)));
    }
    for _ in 0..rng.gen_range(0..3) {
        d.source_refs.push(source_ref(rng));
    }
    let n = rng.gen_range(0..=max_nodes);
    for i in 0..n {
        let kind = *NodeKind::ALL.choose(rng).unwrap();
        let id = if rng.gen_bool(0.1) { format!("g{i}.sub") } else { format!("n{i}") };
        let label = if kind.is_nested() || rng.gen_bool(0.8) { text(rng, 4) } else { String::new() };
        let mut node = Node::new(id, kind, label);
        if !d.lanes.is_empty() && rng.gen_bool(0.6) {
            node.lane = Some(d.lanes.choose(rng).unwrap().id.clone());
        }
        if rng.gen_bool(0.3) {
            node.prompt = Some(text(rng, 6));
        }
        if kind.is_nested() {
            node.nested_ref = Some(format!("sub{}", rng.gen_range(0..5)));
        }
        if kind == NodeKind::Exit && rng.gen_bool(0.3) {
            node.outcome_label = Some(text(rng, 2));
        }
        annotate(rng, &mut node.explanations, &mut node.refs);
        d.nodes.push(node);
    }
    if n > 0 {
        let mut ids = BTreeSet::new();
        for _ in 0..rng.gen_range(0..n * 2 + 1) {
            let from = d.nodes.choose(rng).unwrap().id.clone();
            let to = d.nodes.choose(rng).unwrap().id.clone();
            let mut e = match rng.gen_range(0..10) {
                0..=5 => Edge::flow(from, to),
                6..=7 => Edge::branch(from, to, text(rng, 2)),
                8 => Edge::dependency(from, to),
                _ => Edge::link(&d.id, &from, "other", "start"),
            };
            annotate(rng, &mut e.explanations, &mut e.refs);
            if ids.insert(e.id.clone()) {
                d.edges.push(e);
            }
        }
    }
    d
}

/// Shape parameters for generated executable maps.
#[derive(Debug, Clone, Copy)]
pub struct MapShape {
    pub max_nodes: usize,
    pub dependencies: bool,
    pub lanes: bool,
}

/// An error-free acyclic map: one entry first, exits last among their
/// successors, every node reachable, decisions with distinct labels.
/// Dependencies, when enabled, only point from earlier to later nodes.
pub fn random_map(rng: &mut StdRng, id: &str, shape: MapShape) -> LawmapDoc {
    let n = rng.gen_range(3..=shape.max_nodes.max(3));
    let mut d = LawmapDoc::new(id, format!("Generated {id}"));
    if shape.lanes {
        d.lanes.push(Lane::new("l0", "Lane 0"));
        d.lanes.push(Lane::new("l1", "Lane 1"));
    }
    let mut kinds = vec![NodeKind::Entry];
    for i in 1..n {
        let k = if i == n - 1 {
            NodeKind::Exit
        } else {
            match rng.gen_range(0..10) {
                0..=3 => NodeKind::Activity,
                4..=7 => NodeKind::Decision,
                _ => NodeKind::Exit,
            }
        };
        kinds.push(k);
    }
    for (i, k) in kinds.iter().enumerate() {
        let mut node = Node::new(format!("n{i}"), *k, format!("Node {i}"));
        if *k == NodeKind::Decision {
            node = node.with_prompt(format!("Question {i}?")).with_ref(SourceRef::text("generated"));
        }
        if shape.lanes {
            node.lane = Some(format!("l{}", rng.gen_range(0..2)));
        }
        d.nodes.push(node);
    }
    let mut labels: Vec<usize> = vec![0; n];
    let mut has_in = vec![false; n];
    let add = |d: &mut LawmapDoc, labels: &mut Vec<usize>, has_in: &mut Vec<bool>, i: usize, j: usize| {
        let from = format!("n{i}");
        let to = format!("n{j}");
        let e = if kinds[i] == NodeKind::Decision {
            labels[i] += 1;
            Edge::branch(from, to, format!("opt{}", labels[i]))
        } else {
            Edge::flow(from, to)
        };
        if d.edge(&e.id).is_none() {
            d.edges.push(e);
            has_in[j] = true;
        }
    };
    for i in 0..n {
        let want = match kinds[i] {
            NodeKind::Exit => 0,
            NodeKind::Decision => rng.gen_range(2..=3),
            _ => rng.gen_range(1..=2),
        };
        for _ in 0..want {
            let j = rng.gen_range(i + 1..n);
            add(&mut d, &mut labels, &mut has_in, i, j);
        }
    }
    for j in 1..n {
        if !has_in[j] {
            let sources: Vec<usize> = (0..j).filter(|&i| kinds[i] != NodeKind::Exit).collect();
            let i = *sources.choose(rng).unwrap();
            add(&mut d, &mut labels, &mut has_in, i, j);
        }
    }
    // Decisions may have ended with one branch if targets collided.
    for i in 0..n {
        if kinds[i] == NodeKind::Decision {
            while d.outgoing_flows(&format!("n{i}")).count() < 2 {
                let j = rng.gen_range(i + 1..n);
                add(&mut d, &mut labels, &mut has_in, i, j);
            }
        }
    }
    if shape.dependencies {
        for _ in 0..rng.gen_range(0..3) {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            let e = Edge::dependency(format!("n{i}"), format!("n{j}"));
            if d.edge(&e.id).is_none() {
                d.edges.push(e);
            }
        }
    }
    d
}

pub fn resolved(set: LawmapSet) -> ResolvedSet {
    let rs = resolve_set(set).expect("generated set resolves");
    let diags = check(&rs);
    assert!(!has_errors(&diags), "generated set has errors: {diags:#?}");
    rs
}

pub fn single(doc: LawmapDoc) -> ResolvedSet {
    resolved(LawmapSet::single(doc))
}

/// A set whose root nests generated sub-maps, up to `depth` levels.
/// Some activities become nested activities; some become nested
/// decisions branching on the outcomes `ok` / `fail`.
pub fn random_nested_set(rng: &mut StdRng, depth: usize) -> ResolvedSet {
    let mut docs = Vec::new();
    let mut counter = 0;
    let root = nested_doc(rng, depth, &mut docs, &mut counter, None);
    let mut set = LawmapSet::single(root);
    for d in docs {
        set.docs.insert(d.id.clone(), d);
    }
    resolved(set)
}

fn nested_doc(rng: &mut StdRng, depth: usize, docs: &mut Vec<LawmapDoc>, counter: &mut usize, outcomes: Option<&[&str]>) -> LawmapDoc {
    let id = format!("m{counter}");
    *counter += 1;
    let shape = MapShape {
        max_nodes: 9,
        dependencies: true,
        lanes: false,
    };
    let mut d = loop {
        let d = random_map(rng, &id, shape);
        let exits = d.nodes_of(NodeKind::Exit).count();
        if outcomes.map_or(true, |o| exits >= o.len()) {
            break d;
        }
    };
    if let Some(o) = outcomes {
        let mut k = 0;
        for n in d.nodes.iter_mut().filter(|n| n.kind == NodeKind::Exit) {
            n.outcome_label = Some(o[k % o.len()].to_string());
            k += 1;
        }
    }
    if depth == 0 {
        return d;
    }
    let candidates: Vec<usize> = (0..d.nodes.len()).filter(|&i| d.nodes[i].kind == NodeKind::Activity).collect();
    for i in candidates {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let node_id = d.nodes[i].id.clone();
        let outgoing: Vec<usize> = (0..d.edges.len())
            .filter(|&e| d.edges[e].kind == EdgeKind::Flow && d.edges[e].from == node_id)
            .collect();
        let as_decision = outgoing.len() == 2 && rng.gen_bool(0.5);
        let sub = if as_decision {
            nested_doc(rng, depth - 1, docs, counter, Some(&["ok", "fail"]))
        } else {
            nested_doc(rng, depth - 1, docs, counter, None)
        };
        let node = &mut d.nodes[i];
        node.nested_ref = Some(sub.id.clone());
        if as_decision {
            node.kind = NodeKind::NestedDecision;
            for (e, label) in outgoing.iter().zip(["ok", "fail"]) {
                let edge = &mut d.edges[*e];
                edge.criterion = Some(label.to_string());
                edge.id = Edge::derive_id(EdgeKind::Flow, &edge.from, &edge.to, Some(label));
            }
        } else {
            node.kind = NodeKind::NestedActivity;
        }
        docs.push(sub);
    }
    d
}

/// Exits reachable when each decision follows its answer and every other
/// node follows all of its flows.
pub fn oracle_exits(doc: &LawmapDoc, answers: &BTreeMap<String, String>) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<String> = doc.nodes_of(NodeKind::Entry).map(|n| n.id.clone()).collect();
    let mut exits = BTreeSet::new();
    while let Some(id) = stack.pop() {
        if !seen.insert(id.clone()) {
            continue;
        }
        let node = doc.node(&id).unwrap();
        if node.kind == NodeKind::Exit {
            exits.insert(format!("root/{id}"));
        }
        for e in doc.edges.iter().filter(|e| e.kind == EdgeKind::Flow && e.from == id) {
            let follow = match node.kind {
                NodeKind::Decision => answers.get(&format!("root/{id}")) == e.criterion.as_ref(),
                _ => true,
            };
            if follow {
                stack.push(e.to.clone());
            }
        }
    }
    exits
}

/// Every total assignment over the given decisions and their options.
pub fn total_assignments(options: &[(String, Vec<String>)]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for (d, opts) in options {
        out = out
            .into_iter()
            .flat_map(|a| opts.iter().map(move |o| a.clone().with(d.clone(), o.clone())))
            .collect();
    }
    out
}

/// Every total assignment when there are at most `limit`, otherwise
/// `limit` random ones.
pub fn sample_total(options: &[(String, Vec<String>)], rng: &mut StdRng, limit: usize) -> Vec<Assignment> {
    let count = options.iter().try_fold(1usize, |acc, (_, o)| acc.checked_mul(o.len()));
    if count.is_some_and(|c| c <= limit) {
        return total_assignments(options);
    }
    (0..limit)
        .map(|_| options.iter().map(|(d, o)| (d.clone(), o.choose(rng).unwrap().clone())).collect())
        .collect()
}

/// Decision path-ids and options for a map traversed in `mode`.
pub fn decision_options(rs: &ResolvedSet, mode: Mode) -> Vec<(String, Vec<String>)> {
    lawmap_core::traverse::decision_ids(rs, mode)
        .into_iter()
        .map(|path| {
            let local = path.trim_start_matches("root/");
            let (doc, id) = locate(rs, local);
            let opts = doc.outgoing_flows(id).filter_map(|e| e.criterion.clone()).collect();
            (path, opts)
        })
        .collect()
}

/// The document and local id a dotted instance path points at.
fn locate<'a>(rs: &'a ResolvedSet, local: &'a str) -> (&'a LawmapDoc, &'a str) {
    let mut doc = rs.root_doc();
    let mut rest = local;
    loop {
        if doc.node(rest).is_some() {
            return (doc, rest);
        }
        let (head, tail) = rest.split_once('.').expect("path resolves");
        let next = doc.node(head).and_then(|n| n.nested_ref.as_deref()).expect("nested node");
        doc = rs.doc(next).unwrap();
        rest = tail;
    }
}

/// A comparable summary of a route, ignoring nested container nodes,
/// completion order and the order pending decisions are listed in.
pub fn route_summary(r: &Route, containers: &BTreeSet<String>) -> (String, BTreeSet<String>, BTreeSet<String>, BTreeSet<String>, BTreeSet<String>) {
    (
        format!("{:?}", r.status),
        r.exit_ids().into_iter().map(String::from).collect(),
        r.pending_ids().into_iter().map(String::from).collect(),
        r.blocked.iter().map(|b| b.node.clone()).collect(),
        r.completed_ids().into_iter().filter(|c| !containers.contains(*c)).map(String::from).collect(),
    )
}

/// Path-ids of nested nodes at any depth of a descend-mode route.
pub fn container_paths(rs: &ResolvedSet) -> BTreeSet<String> {
    fn walk(rs: &ResolvedSet, doc: &LawmapDoc, prefix: &str, out: &mut BTreeSet<String>) {
        for n in &doc.nodes {
            if let Some(sub) = n.nested_ref.as_deref().and_then(|m| rs.doc(m)) {
                let path = format!("{prefix}{}", n.id);
                walk(rs, sub, &format!("{path}."), out);
                out.insert(path);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(rs, rs.root_doc(), "root/", &mut out);
    out
}

/// A random listing in the outline syntax with consistent enumerators.
pub fn random_outline(rng: &mut StdRng, max_items: usize) -> String {
    const VOCAB: &[&str] = &["the", "tenant", "landlord", "has", "given", "notice", "rent", "court", "applies", "occupied", "premises"];
    let mut budget = max_items;
    let mut top = 0;
    let mut out = String::new();
    let sentence = |rng: &mut StdRng| -> String {
        let mut words: Vec<String> = (0..rng.gen_range(2..7)).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect();
        if rng.gen_bool(0.15) {
            let i = rng.gen_range(0..words.len());
            words[i] = format!("_not {}_", words[i]);
        }
        let mut s = words.join(" ");
        s[..1].make_ascii_uppercase();
        s
    };
    fn enumerator(depth: usize, k: usize) -> String {
        const ROMAN: &[&str] = &["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"];
        match depth % 3 {
            0 => (k + 1).to_string(),
            1 => ((b'a' + k as u8) as char).to_string(),
            _ => ROMAN[k].to_string(),
        }
    }
    fn items(rng: &mut StdRng, out: &mut String, depth: usize, budget: &mut usize, top: &mut usize, leaf_only: bool, sentence: &dyn Fn(&mut StdRng) -> String) {
        let count = rng.gen_range(1..=3).min(*budget).max(1);
        for k in 0..count {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            let e = if depth == 0 {
                *top += 1;
                top.to_string()
            } else {
                enumerator(depth, k)
            };
            let junction = if k + 1 < count {
                match rng.gen_range(0..3) {
                    0 => "; or",
                    1 => "; and",
                    _ => "",
                }
            } else {
                ""
            };
            out.push_str(&"  ".repeat(depth + 1));
            out.push_str(&format!("{e}. {}{junction}\n", sentence(rng)));
            if !leaf_only && depth < 3 && *budget > 0 && rng.gen_bool(0.3) {
                items(rng, out, depth + 1, budget, top, false, sentence);
            }
        }
    }
    out.push_str("Where:\n");
    items(rng, &mut out, 0, &mut budget, &mut top, false, &sentence);
    if budget > 0 && rng.gen_bool(0.6) {
        out.push_str("Unless:\n");
        items(rng, &mut out, 0, &mut budget, &mut top, false, &sentence);
    }
    if budget > 0 && rng.gen_bool(0.6) {
        out.push_str("In which case:\n");
        items(rng, &mut out, 0, &mut budget, &mut top, true, &sentence);
    }
    if budget > 0 && rng.gen_bool(0.6) {
        out.push_str("Otherwise:\n");
        items(rng, &mut out, 0, &mut budget, &mut top, true, &sentence);
    }
    out
}
