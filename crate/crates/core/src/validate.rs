//! Cross-document resolution and the semantic rule set.
//!
//! [`resolve_set`] checks that every nested map and link target exists
//! and that documents do not reference each other in a cycle. [`check`]
//! then sweeps every document and reports coded diagnostics in a fixed
//! order: by document (root first, then by id), by element declaration
//! order (document, lanes, nodes, edges), then by code.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostic::{codes, has_errors, Diagnostic};
use crate::dsl::{self, is_valid_id};
use crate::model::{Edge, EdgeKind, Explanation, LawmapDoc, LawmapSet, NodeKind, Origin, SourceRef, SourceRefKind};

/// A set whose cross-document references resolve and are acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSet {
    pub set: LawmapSet,
    /// Documents ordered so that every referenced document precedes the
    /// documents referencing it.
    pub nesting_order: Vec<String>,
}

impl ResolvedSet {
    pub fn root_doc(&self) -> &LawmapDoc {
        self.set.root_doc()
    }

    pub fn doc(&self, id: &str) -> Option<&LawmapDoc> {
        self.set.doc(id)
    }
}

/// Resolves nested-map and link targets and orders documents by reference.
///
/// Reports E006 for targets that do not exist and E007 for reference
/// cycles.
pub fn resolve_set(set: LawmapSet) -> Result<ResolvedSet, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    if !set.docs.contains_key(&set.root) {
        diags.push(Diagnostic::error(
            codes::UNRESOLVED_REFERENCE,
            format!("root document '{}' is not in the set", set.root),
        ));
        return Err(diags);
    }
    let mut graph: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for doc in set.ordered_docs() {
        let targets = graph.entry(doc.id.as_str()).or_default();
        for n in &doc.nodes {
            if let Some(target) = n.nested_ref.as_deref() {
                if set.docs.contains_key(target) {
                    if !targets.contains(&target) {
                        targets.push(target);
                    }
                } else {
                    diags.push(
                        Diagnostic::error(
                            codes::UNRESOLVED_REFERENCE,
                            format!("node '{}' in '{}' nests unknown map '{target}'", n.id, doc.id),
                        )
                        .at(n.origin.span())
                        .on(&n.id),
                    );
                }
            }
        }
        for e in doc.edges.iter().filter(|e| e.kind == EdgeKind::MultiLevel) {
            let Some((target_doc, target_node)) = Edge::split_qualified(&e.to) else {
                continue;
            };
            match set.docs.get(target_doc) {
                Some(t) if t.node(target_node).is_some() => {
                    if !targets.contains(&target_doc) {
                        targets.push(target_doc);
                    }
                }
                Some(_) => diags.push(
                    Diagnostic::error(
                        codes::UNRESOLVED_REFERENCE,
                        format!("link '{}' targets unknown node '{target_node}' in '{target_doc}'", e.id),
                    )
                    .at(e.origin.span())
                    .on(&e.id),
                ),
                None => diags.push(
                    Diagnostic::error(
                        codes::UNRESOLVED_REFERENCE,
                        format!("link '{}' targets unknown map '{target_doc}'", e.id),
                    )
                    .at(e.origin.span())
                    .on(&e.id),
                ),
            }
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        doc: &'a str,
        graph: &BTreeMap<&'a str, Vec<&'a str>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
        order: &mut Vec<String>,
        cycles: &mut Vec<Vec<String>>,
    ) {
        marks.insert(doc, Mark::Open);
        stack.push(doc);
        for &next in graph.get(doc).into_iter().flatten() {
            match marks.get(next) {
                None => visit(next, graph, marks, stack, order, cycles),
                Some(Mark::Open) => {
                    let from = stack.iter().position(|d| *d == next).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[from..].iter().map(|s| s.to_string()).collect();
                    cycle.push(next.to_string());
                    cycles.push(cycle);
                }
                Some(Mark::Done) => {}
            }
        }
        stack.pop();
        marks.insert(doc, Mark::Done);
        order.push(doc.to_string());
    }

    let mut marks = BTreeMap::new();
    let mut order = Vec::new();
    let mut cycles = Vec::new();
    for doc in set.ordered_docs() {
        if !marks.contains_key(doc.id.as_str()) {
            visit(&doc.id, &graph, &mut marks, &mut Vec::new(), &mut order, &mut cycles);
        }
    }
    for cycle in cycles {
        let doc = set.doc(&cycle[0]);
        diags.push(
            Diagnostic::error(codes::CYCLIC_NESTING, format!("cyclic map references: {}", cycle.join(" -> ")))
                .at(doc.and_then(|d| d.origin.span()))
                .on(&cycle[0]),
        );
    }
    if diags.is_empty() {
        Ok(ResolvedSet {
            set,
            nesting_order: order,
        })
    } else {
        Err(diags)
    }
}

/// Runs the full rule sweep over a resolved set.
pub fn check(rs: &ResolvedSet) -> Vec<Diagnostic> {
    rs.set
        .ordered_docs()
        .flat_map(|doc| check_doc(doc, &rs.set))
        .collect()
}

/// Parses, resolves and checks a `.lawmap` set file in one go.
pub fn analyze_source(text: &str, file: &str) -> (Option<ResolvedSet>, Vec<Diagnostic>) {
    let parsed = dsl::parse_set(text, file);
    match parsed.set {
        Some(set) => analyze_set(set, parsed.diagnostics),
        None => (None, parsed.diagnostics),
    }
}

/// Resolves and checks an already parsed set.
pub fn analyze_set(set: LawmapSet, mut diags: Vec<Diagnostic>) -> (Option<ResolvedSet>, Vec<Diagnostic>) {
    match resolve_set(set) {
        Ok(rs) => {
            diags.extend(check(&rs));
            (Some(rs), diags)
        }
        Err(d) => {
            diags.extend(d);
            (None, diags)
        }
    }
}

/// True when the set resolves and has no error-severity diagnostics.
pub fn is_error_free(rs: &ResolvedSet) -> bool {
    !has_errors(&check(rs))
}

struct Sweep<'a> {
    doc: &'a LawmapDoc,
    out: Vec<(usize, Diagnostic)>,
}

impl<'a> Sweep<'a> {
    fn node_rank(&self, i: usize) -> usize {
        1 + self.doc.lanes.len() + i
    }

    fn edge_rank(&self, i: usize) -> usize {
        1 + self.doc.lanes.len() + self.doc.nodes.len() + i
    }

    fn push(&mut self, rank: usize, d: Diagnostic, origin: &Origin, id: &str) {
        self.out.push((rank, d.at(origin.span()).on(id)));
    }
}

fn check_notes(notes: &[Explanation], owner: &str) -> Option<String> {
    notes
        .iter()
        .any(|n| n.text.trim().is_empty())
        .then(|| format!("'{owner}' has an empty explanation"))
}

fn ref_problem(r: &SourceRef) -> Option<&'static str> {
    let blank = |s: &Option<String>| s.as_deref().map_or(true, |s| s.trim().is_empty());
    match r.kind {
        SourceRefKind::Statute => {
            if blank(&r.act) || r.section_path.is_empty() {
                Some("statute reference needs an act and a section path")
            } else if r.citation.is_some() {
                Some("statute reference cannot carry a case citation")
            } else {
                None
            }
        }
        SourceRefKind::CaseLaw | SourceRefKind::PracticeRule => {
            if blank(&r.citation) {
                Some("case law and practice rule references need a citation")
            } else if r.act.is_some() || !r.section_path.is_empty() {
                Some("only statute references carry an act or section path")
            } else {
                None
            }
        }
        SourceRefKind::Text => {
            if blank(&r.note) {
                Some("text reference needs a note describing its source")
            } else if r.act.is_some() || !r.section_path.is_empty() || r.citation.is_some() {
                Some("text references carry only a note, year and quote")
            } else {
                None
            }
        }
    }
}

fn check_refs(refs: &[SourceRef], owner: &str) -> Option<String> {
    refs.iter()
        .find_map(ref_problem)
        .map(|p| format!("'{owner}': {p}"))
}

fn check_doc(doc: &LawmapDoc, set: &LawmapSet) -> Vec<Diagnostic> {
    let mut sw = Sweep { doc, out: Vec::new() };

    if !is_valid_id(&doc.id) {
        sw.push(
            0,
            Diagnostic::error(codes::MALFORMED_ELEMENT, format!("'{}' is not a valid map id", doc.id)),
            &doc.origin,
            &doc.id,
        );
    }
    if let Some(msg) = check_refs(&doc.source_refs, &doc.id) {
        sw.push(0, Diagnostic::error(codes::MALFORMED_ELEMENT, msg), &doc.origin, &doc.id);
    }

    let mut seen = BTreeSet::new();
    for (i, lane) in doc.lanes.iter().enumerate() {
        if !seen.insert(lane.id.as_str()) {
            sw.push(
                1 + i,
                Diagnostic::error(codes::DUPLICATE_ID, format!("duplicate lane id '{}'", lane.id)),
                &lane.origin,
                &lane.id,
            );
        }
        if !is_valid_id(&lane.id) {
            sw.push(
                1 + i,
                Diagnostic::error(codes::MALFORMED_ELEMENT, format!("'{}' is not a valid lane id", lane.id)),
                &lane.origin,
                &lane.id,
            );
        }
    }

    let (entries, _) = doc.entry_exit_sets();
    let reachable = doc.reachable_set(&entries).unwrap_or_default();

    let mut seen = BTreeSet::new();
    for (i, n) in doc.nodes.iter().enumerate() {
        let rank = sw.node_rank(i);
        let id = n.id.as_str();
        let err = |code: &str, msg: String| Diagnostic::error(code, msg);
        if !seen.insert(id) {
            sw.push(rank, err(codes::DUPLICATE_ID, format!("duplicate node id '{id}'")), &n.origin, id);
        }
        let mut malformed = Vec::new();
        if !is_valid_id(id) {
            malformed.push(format!("'{id}' is not a valid node id"));
        }
        if let Some(lane) = &n.lane {
            if doc.lane(lane).is_none() {
                malformed.push(format!("node '{id}' is in unknown lane '{lane}'"));
            }
        }
        match (n.kind.is_nested(), &n.nested_ref) {
            (true, None) => malformed.push(format!("nested node '{id}' has no map")),
            (false, Some(m)) => malformed.push(format!("{} '{id}' cannot reference map '{m}'", n.kind)),
            _ => {}
        }
        if n.outcome_label.is_some() && n.kind != NodeKind::Exit {
            malformed.push(format!("outcome label on non-exit node '{id}'"));
        }
        malformed.extend(check_notes(&n.explanations, id));
        malformed.extend(check_refs(&n.refs, id));
        for m in malformed {
            sw.push(rank, err(codes::MALFORMED_ELEMENT, m), &n.origin, id);
        }

        let outs: Vec<&Edge> = doc.outgoing_flows(id).collect();
        let (incoming, outgoing) = doc.flow_degree(id);
        if n.kind.is_decision() {
            if outs.len() < 2 {
                sw.push(
                    rank,
                    err(
                        codes::DECISION_TOO_FEW_BRANCHES,
                        format!("decision '{id}' has {} outgoing flow(s); at least 2 are required", outs.len()),
                    ),
                    &n.origin,
                    id,
                );
            }
            let mut labels = BTreeSet::new();
            let mut reported = BTreeSet::new();
            for e in &outs {
                if let Some(c) = e.criterion.as_deref().filter(|c| !c.is_empty()) {
                    if !labels.insert(c) && reported.insert(c) {
                        sw.push(
                            rank,
                            err(codes::DUPLICATE_CRITERION, format!("decision '{id}' has duplicate criterion '{c}'")),
                            &n.origin,
                            id,
                        );
                    }
                }
            }
            if n.refs.is_empty() {
                sw.push(
                    rank,
                    Diagnostic::warning(codes::DECISION_UNCITED, format!("decision '{id}' cites no source")),
                    &n.origin,
                    id,
                );
            }
        }
        if n.kind == NodeKind::Entry && incoming > 0 {
            sw.push(rank, err(codes::TERMINAL_MISUSE, format!("entry '{id}' has incoming flow")), &n.origin, id);
        }
        if n.kind == NodeKind::Exit && outgoing > 0 {
            sw.push(rank, err(codes::TERMINAL_MISUSE, format!("exit '{id}' has outgoing flow")), &n.origin, id);
        }
        if n.kind == NodeKind::NestedDecision {
            if let Some(sub) = n.nested_ref.as_deref().and_then(|m| set.doc(m)) {
                let outcomes: BTreeSet<&str> = sub
                    .nodes_of(NodeKind::Exit)
                    .filter_map(|x| x.outcome_label.as_deref())
                    .collect();
                let criteria: BTreeSet<&str> = outs.iter().filter_map(|e| e.criterion.as_deref()).collect();
                if outcomes.len() < 2 || outcomes != criteria {
                    sw.push(
                        rank,
                        err(
                            codes::NESTED_OUTCOME_MISMATCH,
                            format!(
                                "nested decision '{id}' branches on {criteria:?} but map '{}' reports outcomes {outcomes:?}",
                                sub.id
                            ),
                        ),
                        &n.origin,
                        id,
                    );
                }
            }
        }
        if !reachable.contains(id) {
            sw.push(
                rank,
                Diagnostic::warning(codes::UNREACHABLE, format!("node '{id}' is unreachable from any entry")),
                &n.origin,
                id,
            );
        }
        if n.kind.is_activity() {
            let labelled = outs.iter().filter(|e| e.criterion.is_some()).count();
            if labelled >= 2 {
                sw.push(
                    rank,
                    Diagnostic::warning(
                        codes::LIKELY_DECISION,
                        format!("activity '{id}' has {labelled} criterion-labelled branches; this is most likely a decision point"),
                    ),
                    &n.origin,
                    id,
                );
            }
        }
        if n.kind != NodeKind::Exit && outgoing == 0 {
            sw.push(
                rank,
                Diagnostic::warning(codes::DEAD_END, format!("{} '{id}' has no outgoing flow and is not an exit", n.kind)),
                &n.origin,
                id,
            );
        }
    }

    for (rank, d) in flow_cycles(doc) {
        let rank = sw.node_rank(rank);
        let node = &doc.nodes[rank - 1 - doc.lanes.len()];
        sw.push(rank, d, &node.origin, &node.id);
    }

    let mut seen = BTreeSet::new();
    for (j, e) in doc.edges.iter().enumerate() {
        let rank = sw.edge_rank(j);
        let id = e.id.as_str();
        if !seen.insert(id) {
            sw.push(rank, Diagnostic::error(codes::DUPLICATE_ID, format!("duplicate edge id '{id}'")), &e.origin, id);
        }
        let mut malformed: Vec<String> = Vec::new();
        malformed.extend(check_notes(&e.explanations, id));
        malformed.extend(check_refs(&e.refs, id));
        match e.kind {
            EdgeKind::Flow | EdgeKind::Dependency => {
                for end in [&e.from, &e.to] {
                    if doc.node(end).is_none() {
                        sw.push(
                            rank,
                            Diagnostic::error(
                                codes::EDGE_ENDPOINT_UNKNOWN,
                                format!("edge '{id}' references unknown node '{end}'"),
                            ),
                            &e.origin,
                            id,
                        );
                    }
                }
            }
            EdgeKind::MultiLevel => {
                if e.criterion.is_some() {
                    malformed.push(format!("link '{id}' cannot carry a criterion"));
                }
                match Edge::split_qualified(&e.from) {
                    Some((d, node)) if d == doc.id => match doc.node(node) {
                        Some(n) if n.kind == NodeKind::Exit => {}
                        Some(_) => malformed.push(format!("link '{id}' must start at an exit")),
                        None => sw.push(
                            rank,
                            Diagnostic::error(
                                codes::EDGE_ENDPOINT_UNKNOWN,
                                format!("link '{id}' starts at unknown node '{node}'"),
                            ),
                            &e.origin,
                            id,
                        ),
                    },
                    _ => malformed.push(format!("link '{id}' must start at an exit of '{}'", doc.id)),
                }
                match Edge::split_qualified(&e.to) {
                    Some((d, node)) => {
                        let target = set.doc(d).and_then(|t| t.node(node));
                        if matches!(target, Some(t) if t.kind != NodeKind::Entry) {
                            malformed.push(format!("link '{id}' must end at an entry"));
                        }
                        if d == doc.id {
                            malformed.push(format!("link '{id}' must connect two different maps"));
                        }
                    }
                    None => malformed.push(format!("link '{id}' target must be written doc.node")),
                }
            }
        }
        match e.kind {
            EdgeKind::Dependency => {
                if e.criterion.is_some() {
                    malformed.push(format!("dependency '{id}' cannot carry a criterion"));
                }
                if let (Some(a), Some(b)) = (doc.node(&e.from), doc.node(&e.to)) {
                    if a.lane == b.lane {
                        sw.push(
                            rank,
                            Diagnostic::warning(
                                codes::SAME_LANE_DEPENDENCY,
                                format!("dependency '{id}' connects two nodes of the same lane"),
                            ),
                            &e.origin,
                            id,
                        );
                    }
                }
            }
            EdgeKind::Flow => {
                if let Some(src) = doc.node(&e.from) {
                    let labelled = e.criterion.as_deref().is_some_and(|c| !c.is_empty());
                    if src.kind.is_decision() && !labelled {
                        sw.push(
                            rank,
                            Diagnostic::error(
                                codes::MISSING_CRITERION,
                                format!("branch '{id}' of decision '{}' has no criterion", src.id),
                            ),
                            &e.origin,
                            id,
                        );
                    }
                    let likely_decision = src.kind.is_activity() && doc.outgoing_flows(&src.id).filter(|o| o.criterion.is_some()).count() >= 2;
                    if !src.kind.is_decision() && e.criterion.is_some() && !likely_decision {
                        sw.push(
                            rank,
                            Diagnostic::warning(
                                codes::CRITERION_ON_NON_DECISION,
                                format!("flow '{id}' carries a criterion but '{}' is not a decision", src.id),
                            ),
                            &e.origin,
                            id,
                        );
                    }
                }
            }
            EdgeKind::MultiLevel => {}
        }
        for m in malformed {
            sw.push(rank, Diagnostic::error(codes::MALFORMED_ELEMENT, m), &e.origin, id);
        }
    }

    let mut out = sw.out;
    out.sort_by(|(ra, a), (rb, b)| ra.cmp(rb).then_with(|| a.code.cmp(&b.code)));
    out.into_iter().map(|(_, d)| d).collect()
}

/// Flow cycles, one diagnostic per strongly connected component, keyed by
/// the index of the component's first declared node.
fn flow_cycles(doc: &LawmapDoc) -> Vec<(usize, Diagnostic)> {
    let index: BTreeMap<&str, usize> = doc
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.as_str(), i))
        .collect();
    let n = doc.nodes.len();
    let mut adj = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for e in doc.flows() {
        if let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) {
            adj[a].push(b);
            if a == b {
                self_loop[a] = true;
            }
        }
    }

    // Tarjan's algorithm, iterative.
    let mut idx = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut components = Vec::new();
    for root in 0..n {
        if idx[root] != usize::MAX {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        idx[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if idx[w] == usize::MAX {
                    idx[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(idx[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == idx[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if comp.len() > 1 || self_loop[v] {
                        comp.sort_unstable();
                        components.push(comp);
                    }
                }
            }
        }
    }
    components.sort();
    components
        .into_iter()
        .map(|comp| {
            let names: Vec<&str> = comp.iter().map(|&i| doc.nodes[i].id.as_str()).collect();
            (
                comp[0],
                Diagnostic::error(codes::FLOW_CYCLE, format!("flow cycle through {}", names.join(", "))),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_set;

    fn codes_of(src: &str) -> Vec<String> {
        let (_, diags) = analyze_source(src, "t");
        diags.into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn single_doc_order() {
        let set = parse_set(r#"lawmap m "T" { entry s exit e flow s -> e }"#, "t").set.unwrap();
        let rs = resolve_set(set).unwrap();
        assert_eq!(rs.nesting_order, vec!["m"]);
        assert!(check(&rs).is_empty());
    }

    #[test]
    fn nested_order_puts_sub_first() {
        let set = parse_set(
            r#"lawmap root "R" { entry s nested activity n "N" map sub exit e flow s -> n flow n -> e }
               lawmap sub "S" { entry s exit e flow s -> e }"#,
            "t",
        )
        .set
        .unwrap();
        assert_eq!(resolve_set(set).unwrap().nesting_order, vec!["sub", "root"]);
    }

    #[test]
    fn two_cycle_is_e007() {
        let set = parse_set(
            r#"lawmap a "A" { entry s nested activity n "N" map b exit e flow s -> n flow n -> e }
               lawmap b "B" { entry s nested activity n "N" map a exit e flow s -> n flow n -> e }"#,
            "t",
        )
        .set
        .unwrap();
        let err = resolve_set(set).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].code, "E007");
        assert!(err[0].message.contains("a -> b -> a"));
    }

    #[test]
    fn dangling_nested_is_e006() {
        let set = parse_set(r#"lawmap a "A" { entry s nested activity n "N" map zz exit e flow s -> n flow n -> e }"#, "t")
            .set
            .unwrap();
        assert_eq!(resolve_set(set).unwrap_err()[0].code, "E006");
    }

    #[test]
    fn duplicate_labels_are_e003() {
        let c = codes_of(
            r#"lawmap m "T" { entry s decision d "Q" { ref text "x" } exit a exit b
               flow s -> d flow d -> a [label "yes"] flow d -> b [label "yes"] }"#,
        );
        assert_eq!(c, vec!["E003"]);
    }

    #[test]
    fn labelled_activity_suggests_decision() {
        let c = codes_of(
            r#"lawmap m "T" { entry s activity a "Apply" exit g exit r
               flow s -> a flow a -> g [label "granted"] flow a -> r [label "refused"] }"#,
        );
        assert_eq!(c, vec!["W005"]);
    }

    #[test]
    fn flow_cycle_reported_once() {
        let c = codes_of(
            r#"lawmap m "T" { entry s activity a "A" activity b "B" exit e
               flow s -> a flow a -> b flow b -> a flow b -> e }"#,
        );
        assert_eq!(c, vec!["E008"]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let c = codes_of(r#"lawmap m "T" { entry s activity a "A" exit e flow s -> a flow a -> a flow a -> e }"#);
        assert_eq!(c, vec!["E008"]);
    }

    #[test]
    fn check_is_deterministic() {
        let src = r#"lawmap m "T" { entry s decision d "Q" activity x "X" flow s -> d flow d -> x flow x -> s }"#;
        let (rs, _) = analyze_source(src, "t");
        let rs = rs.unwrap();
        assert_eq!(check(&rs), check(&rs));
    }

    #[test]
    fn ref_shapes() {
        assert!(ref_problem(&SourceRef::statute("Act", ["1"])).is_none());
        assert!(ref_problem(&SourceRef::statute("Act", Vec::<String>::new())).is_some());
        assert!(ref_problem(&SourceRef::case("")).is_some());
        assert!(ref_problem(&SourceRef::text("n").with_quote("q")).is_none());
        let mut r = SourceRef::text("n");
        r.citation = Some("c".into());
        assert!(ref_problem(&r).is_some());
    }
}
