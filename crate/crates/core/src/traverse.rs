//! Execution semantics: routes through a lawmap given decision answers.
//!
//! Every node is Idle, Active, Done or Dead. Root entries start active. A
//! node activates once each incoming flow is known to be live or dead and
//! at least one is live; it dies when all are dead, so joins only wait on
//! branches that can still arrive. Active nodes complete when their
//! dependency prerequisites are done or dead. Decisions additionally need
//! an answer, which selects the one outgoing flow whose criterion matches.
//!
//! Nodes are addressed by path-id: `root/<id>` in the root map, with ids
//! inside a descended nested map appended after a dot
//! (`root/b_take.mortgage`).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostic::has_errors;
use crate::model::{Edge, EdgeKind, LawmapDoc, LawmapSet, NodeKind};
use crate::validate::{check, ResolvedSet};

pub const ROOT_PREFIX: &str = "root/";

/// Path-id of a node declared in the root map.
pub fn root_path(id: &str) -> String {
    format!("{ROOT_PREFIX}{id}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Nested nodes complete as single steps.
    #[default]
    Atomic,
    /// Nested nodes run their sub-map first.
    Descend,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "atomic" => Ok(Mode::Atomic),
            "descend" => Ok(Mode::Descend),
            other => Err(format!("unknown mode '{other}' (expected atomic or descend)")),
        }
    }
}

/// Chosen criterion label per decision path-id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    pub answers: BTreeMap<String, String>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, decision: impl Into<String>, label: impl Into<String>) -> Self {
        self.answers.insert(decision.into(), label.into());
        self
    }

    pub fn get(&self, decision: &str) -> Option<&str> {
        self.answers.get(decision).map(String::as_str)
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Assignment {
            answers: iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouteStatus {
    Complete,
    AwaitingDecision,
    Blocked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub node: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingDecision {
    pub decision: String,
    pub prompt: String,
    pub options: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockedNode {
    pub node: String,
    pub waiting_on: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReachedExit {
    pub exit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Route {
    pub status: RouteStatus,
    pub completed: Vec<Step>,
    pub pending: Vec<PendingDecision>,
    pub blocked: Vec<BlockedNode>,
    pub reached_exits: Vec<ReachedExit>,
    pub live_edges: BTreeSet<String>,
    pub answers: Assignment,
    pub mode: Mode,
    /// Id of the root document the route was computed over.
    pub set_id: String,
    /// Nodes held back from completing, as if awaiting outside work.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub withheld: BTreeSet<String>,
}

impl Route {
    pub fn completed_ids(&self) -> BTreeSet<&str> {
        self.completed.iter().map(|s| s.node.as_str()).collect()
    }

    pub fn exit_ids(&self) -> BTreeSet<&str> {
        self.reached_exits.iter().map(|x| x.exit.as_str()).collect()
    }

    pub fn pending_ids(&self) -> Vec<&str> {
        self.pending.iter().map(|p| p.decision.as_str()).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.status == RouteStatus::Complete
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraverseError {
    #[error("the map has {0} error diagnostic(s) and cannot be traversed")]
    InvalidMap(usize),
    #[error("unknown decision '{0}'")]
    UnknownDecision(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("'{label}' is not an option of '{decision}'; expected one of {}", options.join(", "))]
    InvalidLabel {
        decision: String,
        label: String,
        options: Vec<String>,
    },
    #[error("decision '{0}' is not pending")]
    NotPending(String),
    #[error("decision '{0}' has not been answered")]
    NotAnswered(String),
    #[error("routes come from different maps ('{0}' and '{1}')")]
    SetMismatch(String, String),
}

/// Differences between two routes over the same map.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RouteDelta {
    pub only_in_a: BTreeSet<String>,
    pub only_in_b: BTreeSet<String>,
    pub common: BTreeSet<String>,
    pub exits_only_in_a: BTreeSet<String>,
    pub exits_only_in_b: BTreeSet<String>,
}

impl RouteDelta {
    /// True when the routes completed the same nodes and reached the same exits.
    pub fn is_empty(&self) -> bool {
        self.only_in_a.is_empty()
            && self.only_in_b.is_empty()
            && self.exits_only_in_a.is_empty()
            && self.exits_only_in_b.is_empty()
    }

    pub fn exits_changed(&self) -> bool {
        !self.exits_only_in_a.is_empty() || !self.exits_only_in_b.is_empty()
    }

    pub fn mirrored(&self) -> RouteDelta {
        RouteDelta {
            only_in_a: self.only_in_b.clone(),
            only_in_b: self.only_in_a.clone(),
            common: self.common.clone(),
            exits_only_in_a: self.exits_only_in_b.clone(),
            exits_only_in_b: self.exits_only_in_a.clone(),
        }
    }
}

/// Computes the route for a full set of answers.
pub fn batch_route(rs: &ResolvedSet, a: &Assignment, mode: Mode) -> Result<Route, TraverseError> {
    batch_route_withheld(rs, a, mode, &BTreeSet::new())
}

/// As [`batch_route`], holding back the `withheld` nodes from completing.
pub fn batch_route_withheld(
    rs: &ResolvedSet,
    a: &Assignment,
    mode: Mode,
    withheld: &BTreeSet<String>,
) -> Result<Route, TraverseError> {
    let errors = check(rs).iter().filter(|d| d.is_error()).count();
    if errors > 0 {
        return Err(TraverseError::InvalidMap(errors));
    }
    let net = Net::build(&rs.set, mode);
    net.run(rs.set.root.clone(), a, mode, withheld)
}

/// The route before any decision is answered.
pub fn init_route(rs: &ResolvedSet, mode: Mode) -> Result<Route, TraverseError> {
    batch_route(rs, &Assignment::new(), mode)
}

/// Answers a pending decision.
///
/// Resubmitting the answer a decision already has returns the route
/// unchanged.
pub fn apply_answer(r: &Route, rs: &ResolvedSet, decision: &str, label: &str) -> Result<Route, TraverseError> {
    if r.answers.get(decision) == Some(label) {
        return Ok(r.clone());
    }
    let pending = r
        .pending
        .iter()
        .find(|p| p.decision == decision)
        .ok_or_else(|| TraverseError::NotPending(decision.to_string()))?;
    if !pending.options.iter().any(|o| o == label) {
        return Err(TraverseError::InvalidLabel {
            decision: decision.to_string(),
            label: label.to_string(),
            options: pending.options.clone(),
        });
    }
    let a = r.answers.clone().with(decision, label);
    batch_route_withheld(rs, &a, r.mode, &r.withheld)
}

/// Removes an answer and recomputes the route.
pub fn retract_answer(r: &Route, rs: &ResolvedSet, decision: &str) -> Result<Route, TraverseError> {
    let mut a = r.answers.clone();
    if a.answers.remove(decision).is_none() {
        return Err(TraverseError::NotAnswered(decision.to_string()));
    }
    batch_route_withheld(rs, &a, r.mode, &r.withheld)
}

/// Set differences over completed nodes and reached exits.
pub fn diff_routes(a: &Route, b: &Route) -> Result<RouteDelta, TraverseError> {
    if a.set_id != b.set_id {
        return Err(TraverseError::SetMismatch(a.set_id.clone(), b.set_id.clone()));
    }
    let (ca, cb) = (a.completed_ids(), b.completed_ids());
    let (xa, xb) = (a.exit_ids(), b.exit_ids());
    let owned = |s: std::collections::btree_set::Difference<'_, &str>| s.map(|x| x.to_string()).collect();
    Ok(RouteDelta {
        only_in_a: owned(ca.difference(&cb)),
        only_in_b: owned(cb.difference(&ca)),
        common: ca.intersection(&cb).map(|x| x.to_string()).collect(),
        exits_only_in_a: owned(xa.difference(&xb)),
        exits_only_in_b: owned(xb.difference(&xa)),
    })
}

/// Inlines nested activities and decisions up to `depth` levels.
///
/// A nested node is replaced by its sub-map. The sub-map's nodes take ids
/// `<nested id>.<id>` and the nested node's lane; its entries and exits
/// become activities wired to the nested node's incoming and outgoing
/// flows. A nested decision's branch with criterion `c` continues from the
/// sub-map exits whose outcome label is `c`. Dependencies on or of the
/// nested node attach to the sub-map's exits. Depth 0 returns the root
/// document unchanged.
pub fn flatten(rs: &ResolvedSet, depth: usize) -> LawmapDoc {
    flatten_doc(&rs.set, rs.root_doc(), depth)
}

struct Splice {
    entries: Vec<String>,
    exits: Vec<(String, Option<String>)>,
}

fn flatten_doc(set: &LawmapSet, doc: &LawmapDoc, depth: usize) -> LawmapDoc {
    if depth == 0 {
        return doc.clone();
    }
    let mut out = LawmapDoc {
        nodes: Vec::new(),
        edges: Vec::new(),
        ..doc.clone()
    };
    let mut spliced: BTreeMap<&str, Splice> = BTreeMap::new();
    let mut inner_edges = Vec::new();
    for n in &doc.nodes {
        let sub = n.nested_ref.as_deref().and_then(|m| set.doc(m));
        let Some(sub) = sub.filter(|_| n.kind.is_nested()) else {
            out.nodes.push(n.clone());
            continue;
        };
        let sub = flatten_doc(set, sub, depth - 1);
        let q = |id: &str| format!("{}.{id}", n.id);
        let mut splice = Splice {
            entries: Vec::new(),
            exits: Vec::new(),
        };
        for sn in &sub.nodes {
            let mut node = sn.clone();
            node.id = q(&sn.id);
            node.lane = n.lane.clone();
            match sn.kind {
                NodeKind::Entry => {
                    node.kind = NodeKind::Activity;
                    splice.entries.push(node.id.clone());
                }
                NodeKind::Exit => {
                    node.kind = NodeKind::Activity;
                    node.outcome_label = None;
                    splice.exits.push((node.id.clone(), sn.outcome_label.clone()));
                }
                _ => {}
            }
            out.nodes.push(node);
        }
        for e in sub.edges.iter().filter(|e| e.kind != EdgeKind::MultiLevel) {
            inner_edges.push(rewire(e, q(&e.from), q(&e.to), e.criterion.clone()));
        }
        spliced.insert(&n.id, splice);
    }
    for e in &doc.edges {
        match e.kind {
            EdgeKind::MultiLevel => out.edges.push(e.clone()),
            EdgeKind::Flow => {
                let src_kind = doc.node(&e.from).map(|n| n.kind);
                let sources: Vec<(String, Option<String>)> = match spliced.get(e.from.as_str()) {
                    Some(s) if src_kind == Some(NodeKind::NestedDecision) => s
                        .exits
                        .iter()
                        .filter(|(_, o)| o.is_some() && *o == e.criterion)
                        .map(|(x, _)| (x.clone(), None))
                        .collect(),
                    Some(s) => s.exits.iter().map(|(x, _)| (x.clone(), e.criterion.clone())).collect(),
                    None => vec![(e.from.clone(), e.criterion.clone())],
                };
                let targets = match spliced.get(e.to.as_str()) {
                    Some(s) => s.entries.clone(),
                    None => vec![e.to.clone()],
                };
                for (from, criterion) in &sources {
                    for to in &targets {
                        out.edges.push(rewire(e, from.clone(), to.clone(), criterion.clone()));
                    }
                }
            }
            EdgeKind::Dependency => {
                let ends = |id: &str| match spliced.get(id) {
                    Some(s) => s.exits.iter().map(|(x, _)| x.clone()).collect(),
                    None => vec![id.to_string()],
                };
                for from in ends(&e.from) {
                    for to in ends(&e.to) {
                        out.edges.push(rewire(e, from.clone(), to, None));
                    }
                }
            }
        }
    }
    out.edges.extend(inner_edges);
    out
}

fn rewire(e: &Edge, from: String, to: String, criterion: Option<String>) -> Edge {
    Edge {
        id: Edge::derive_id(e.kind, &from, &to, criterion.as_deref()),
        from,
        to,
        criterion,
        ..e.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Idle,
    Active,
    Done,
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Live {
    Live,
    Dead,
    Unknown,
}

struct Inst<'a> {
    path: String,
    node: &'a crate::model::Node,
    /// Nested node whose sub-map holds this instance.
    parent: Option<usize>,
    /// Whether a nested node runs its own sub-map instance.
    scoped: bool,
    /// Exits of that sub-map instance.
    child_exits: Vec<usize>,
    incoming: Vec<usize>,
    outgoing: Vec<usize>,
    prereqs: Vec<usize>,
}

struct Flow {
    id: String,
    from: usize,
    criterion: Option<String>,
}

struct Net<'a> {
    insts: Vec<Inst<'a>>,
    flows: Vec<Flow>,
}

impl<'a> Net<'a> {
    fn build(set: &'a LawmapSet, mode: Mode) -> Self {
        let mut net = Net {
            insts: Vec::new(),
            flows: Vec::new(),
        };
        net.add_scope(set, set.root_doc(), ROOT_PREFIX.to_string(), None, mode);
        net
    }

    fn add_scope(&mut self, set: &'a LawmapSet, doc: &'a LawmapDoc, prefix: String, parent: Option<usize>, mode: Mode) {
        let base = self.insts.len();
        for n in &doc.nodes {
            self.insts.push(Inst {
                path: format!("{prefix}{}", n.id),
                node: n,
                parent,
                scoped: false,
                child_exits: Vec::new(),
                incoming: Vec::new(),
                outgoing: Vec::new(),
                prereqs: Vec::new(),
            });
        }
        let index: BTreeMap<&str, usize> = doc.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), base + i)).collect();
        for e in &doc.edges {
            let (Some(&from), Some(&to)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) else {
                continue;
            };
            match e.kind {
                EdgeKind::Flow => {
                    let f = self.flows.len();
                    self.flows.push(Flow {
                        id: format!("{prefix}{}", e.id),
                        from,
                        criterion: e.criterion.clone(),
                    });
                    self.insts[from].outgoing.push(f);
                    self.insts[to].incoming.push(f);
                }
                EdgeKind::Dependency => self.insts[to].prereqs.push(from),
                EdgeKind::MultiLevel => {}
            }
        }
        if let Some(p) = parent {
            let inherited = self.insts[p].prereqs.clone();
            for i in base..base + doc.nodes.len() {
                if self.insts[i].node.kind == NodeKind::Exit {
                    self.insts[i].prereqs.extend(inherited.iter().copied());
                    self.insts[p].child_exits.push(i);
                }
            }
        }
        if mode == Mode::Descend {
            for i in base..base + doc.nodes.len() {
                let n = self.insts[i].node;
                if let Some(sub) = n.nested_ref.as_deref().and_then(|m| set.doc(m)).filter(|_| n.kind.is_nested()) {
                    let prefix = format!("{}.", self.insts[i].path);
                    self.insts[i].scoped = true;
                    self.add_scope(set, sub, prefix, Some(i), mode);
                }
            }
        }
    }

    fn answerable(&self, i: usize, mode: Mode) -> bool {
        match self.insts[i].node.kind {
            NodeKind::Decision => true,
            NodeKind::NestedDecision => !self.descends(i, mode),
            _ => false,
        }
    }

    fn descends(&self, i: usize, mode: Mode) -> bool {
        mode == Mode::Descend && self.insts[i].scoped
    }

    fn options(&self, i: usize) -> Vec<String> {
        self.insts[i]
            .outgoing
            .iter()
            .filter_map(|&f| self.flows[f].criterion.clone())
            .collect()
    }

    fn run(&self, set_id: String, a: &Assignment, mode: Mode, withheld: &BTreeSet<String>) -> Result<Route, TraverseError> {
        let by_path: BTreeMap<&str, usize> = self.insts.iter().enumerate().map(|(i, n)| (n.path.as_str(), i)).collect();
        for w in withheld {
            if !by_path.contains_key(w.as_str()) {
                return Err(TraverseError::UnknownNode(w.clone()));
            }
        }
        let mut chosen: Vec<Option<BTreeSet<String>>> = vec![None; self.insts.len()];
        for (d, label) in &a.answers {
            let i = *by_path
                .get(d.as_str())
                .filter(|&&i| self.answerable(i, mode))
                .ok_or_else(|| TraverseError::UnknownDecision(d.clone()))?;
            let options = self.options(i);
            if !options.contains(label) {
                return Err(TraverseError::InvalidLabel {
                    decision: d.clone(),
                    label: label.clone(),
                    options,
                });
            }
            chosen[i] = Some(BTreeSet::from([label.clone()]));
        }
        let held: Vec<bool> = self.insts.iter().map(|n| withheld.contains(&n.path)).collect();

        let n = self.insts.len();
        let mut state = vec![State::Idle; n];
        let mut outcome: Vec<Option<BTreeSet<String>>> = vec![None; n];
        let mut completed = Vec::new();

        let settled = |s: State| matches!(s, State::Done | State::Dead);
        let edge = |state: &[State], outcome: &[Option<BTreeSet<String>>], f: &Flow| -> Live {
            let src = &self.insts[f.from];
            // A descended nested decision's branch waits on the sub-map exits
            // carrying its label, as the flattened map would.
            if self.descends(f.from, mode) && src.node.kind == NodeKind::NestedDecision && state[f.from] != State::Dead {
                let exits: Vec<State> = src
                    .child_exits
                    .iter()
                    .filter(|&&x| f.criterion.is_some() && self.insts[x].node.outcome_label == f.criterion)
                    .map(|&x| state[x])
                    .collect();
                return if !exits.iter().all(|&s| settled(s)) {
                    Live::Unknown
                } else if exits.contains(&State::Done) {
                    Live::Live
                } else {
                    Live::Dead
                };
            }
            match state[f.from] {
                State::Dead => Live::Dead,
                State::Done => match &outcome[f.from] {
                    Some(labels) => {
                        if f.criterion.as_ref().is_some_and(|c| labels.contains(c)) {
                            Live::Live
                        } else {
                            Live::Dead
                        }
                    }
                    None => Live::Live,
                },
                _ => Live::Unknown,
            }
        };

        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                let inst = &self.insts[i];
                match state[i] {
                    State::Idle => {
                        let next = if inst.node.kind == NodeKind::Entry {
                            match inst.parent.map(|p| state[p]) {
                                None | Some(State::Active) | Some(State::Done) => State::Active,
                                Some(State::Dead) => State::Dead,
                                Some(State::Idle) => State::Idle,
                            }
                        } else {
                            let statuses: Vec<Live> = inst.incoming.iter().map(|&f| edge(&state, &outcome, &self.flows[f])).collect();
                            if statuses.contains(&Live::Unknown) {
                                State::Idle
                            } else if statuses.contains(&Live::Live) {
                                State::Active
                            } else {
                                State::Dead
                            }
                        };
                        if next != State::Idle {
                            state[i] = next;
                            changed = true;
                        }
                    }
                    State::Active => {
                        if held[i] {
                            continue;
                        }
                        if self.descends(i, mode) {
                            let exits = &inst.child_exits;
                            if exits.iter().all(|&x| settled(state[x])) {
                                let done: Vec<usize> = exits.iter().copied().filter(|&x| state[x] == State::Done).collect();
                                if done.is_empty() {
                                    state[i] = State::Dead;
                                } else {
                                    if inst.node.kind == NodeKind::NestedDecision {
                                        outcome[i] = Some(
                                            done.iter()
                                                .filter_map(|&x| self.insts[x].node.outcome_label.clone())
                                                .collect(),
                                        );
                                    }
                                    state[i] = State::Done;
                                    completed.push(i);
                                }
                                changed = true;
                            }
                            continue;
                        }
                        if !inst.prereqs.iter().all(|&p| settled(state[p])) {
                            continue;
                        }
                        if self.answerable(i, mode) {
                            match &chosen[i] {
                                Some(c) => outcome[i] = Some(c.clone()),
                                None => continue,
                            }
                        }
                        state[i] = State::Done;
                        completed.push(i);
                        changed = true;
                    }
                    State::Done | State::Dead => {}
                }
            }
        }

        let mut pending = Vec::new();
        let mut blocked = Vec::new();
        let mut dead_end = false;
        for i in 0..n {
            let inst = &self.insts[i];
            match state[i] {
                State::Active => {
                    if self.answerable(i, mode) && chosen[i].is_none() {
                        pending.push(PendingDecision {
                            decision: inst.path.clone(),
                            prompt: inst.node.question().to_string(),
                            options: self.options(i),
                        });
                    }
                    let waiting: Vec<String> = if self.descends(i, mode) {
                        Vec::new()
                    } else {
                        inst.prereqs
                            .iter()
                            .filter(|&&p| !settled(state[p]))
                            .map(|&p| self.insts[p].path.clone())
                            .collect()
                    };
                    if held[i] || !waiting.is_empty() {
                        blocked.push(BlockedNode {
                            node: inst.path.clone(),
                            waiting_on: waiting,
                        });
                    }
                }
                State::Done => {
                    if inst.node.kind != NodeKind::Exit && inst.outgoing.is_empty() {
                        dead_end = true;
                    }
                }
                State::Idle | State::Dead => {}
            }
        }
        let status = if !pending.is_empty() {
            RouteStatus::AwaitingDecision
        } else if !blocked.is_empty() || dead_end {
            RouteStatus::Blocked
        } else {
            RouteStatus::Complete
        };
        let live_edges = self
            .flows
            .iter()
            .filter(|f| edge(&state, &outcome, f) == Live::Live)
            .map(|f| f.id.clone())
            .collect();
        let reached_exits = completed
            .iter()
            .filter(|&&i| self.insts[i].parent.is_none() && self.insts[i].node.kind == NodeKind::Exit)
            .map(|&i| ReachedExit {
                exit: self.insts[i].path.clone(),
                outcome_label: self.insts[i].node.outcome_label.clone(),
            })
            .collect();
        Ok(Route {
            status,
            completed: completed
                .iter()
                .enumerate()
                .map(|(index, &i)| Step {
                    node: self.insts[i].path.clone(),
                    index,
                })
                .collect(),
            pending,
            blocked,
            reached_exits,
            live_edges,
            answers: a.clone(),
            mode,
            set_id,
            withheld: withheld.clone(),
        })
    }
}

/// Path-ids of every decision a route over this set could ask, for `mode`.
pub fn decision_ids(rs: &ResolvedSet, mode: Mode) -> Vec<String> {
    let net = Net::build(&rs.set, mode);
    (0..net.insts.len())
        .filter(|&i| net.answerable(i, mode))
        .map(|i| net.insts[i].path.clone())
        .collect()
}

/// Whether traversal is allowed at all: the set has no error diagnostics.
pub fn traversable(rs: &ResolvedSet) -> bool {
    !has_errors(&check(rs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::analyze_source;

    fn load(src: &str) -> ResolvedSet {
        let (rs, diags) = analyze_source(src, "t");
        assert!(!has_errors(&diags), "{diags:?}");
        rs.unwrap()
    }

    const DECIDE: &str = r#"lawmap m "T" {
  entry s
  decision d "Q" { ref text "t" }
  exit a
  exit b
  flow s -> d
  flow d -> a [label "yes"]
  flow d -> b [label "no"]
}"#;

    #[test]
    fn minimal_map_completes() {
        let rs = load(r#"lawmap m "T" { entry s exit e flow s -> e }"#);
        let r = init_route(&rs, Mode::Atomic).unwrap();
        assert_eq!(r.status, RouteStatus::Complete);
        assert_eq!(r.exit_ids(), BTreeSet::from(["root/e"]));
        assert_eq!(r.live_edges, BTreeSet::from(["root/s->e".to_string()]));
    }

    #[test]
    fn decision_pending_then_answered() {
        let rs = load(DECIDE);
        let r = init_route(&rs, Mode::Atomic).unwrap();
        assert_eq!(r.status, RouteStatus::AwaitingDecision);
        assert_eq!(r.pending[0].options, vec!["yes", "no"]);
        let r2 = apply_answer(&r, &rs, "root/d", "no").unwrap();
        assert_eq!(r2.exit_ids(), BTreeSet::from(["root/b"]));
        assert_eq!(apply_answer(&r2, &rs, "root/d", "no").unwrap(), r2);
        assert_eq!(retract_answer(&r2, &rs, "root/d").unwrap(), r);
        assert!(matches!(
            apply_answer(&r, &rs, "root/d", "maybe"),
            Err(TraverseError::InvalidLabel { .. })
        ));
        assert!(matches!(apply_answer(&r2, &rs, "root/d", "yes"), Err(TraverseError::NotPending(_))));
        assert!(matches!(retract_answer(&r, &rs, "root/d"), Err(TraverseError::NotAnswered(_))));
    }

    #[test]
    fn join_ignores_pruned_branch() {
        let rs = load(
            r#"lawmap m "T" { entry s decision d "Q" { ref text "t" } activity a "A" activity b "B" activity j "J" exit e
               flow s -> d flow d -> a [label "yes"] flow d -> b [label "no"] flow a -> j flow b -> j flow j -> e }"#,
        );
        let r = batch_route(&rs, &Assignment::new().with("root/d", "yes"), Mode::Atomic).unwrap();
        assert!(r.is_complete());
        assert!(r.completed_ids().contains("root/j"));
        assert!(!r.completed_ids().contains("root/b"));
    }

    #[test]
    fn parallel_split_waits_for_both() {
        let rs = load(
            r#"lawmap m "T" { lane x "X" lane y "Y" entry s activity a "A" in x activity b "B" in y activity j "J" exit e
               flow s -> a flow s -> b flow a -> j flow b -> j flow j -> e depends a -> b }"#,
        );
        let r = init_route(&rs, Mode::Atomic).unwrap();
        assert!(r.is_complete());
        let order: Vec<&str> = r.completed.iter().map(|s| s.node.as_str()).collect();
        assert_eq!(order, vec!["root/s", "root/a", "root/b", "root/j", "root/e"]);
    }

    #[test]
    fn withheld_prerequisite_blocks() {
        let rs = load(
            r#"lawmap m "T" { lane x "X" lane y "Y" entry s activity a "A" in x activity b "B" in y exit e
               flow s -> a flow s -> b flow a -> e flow b -> e depends a -> b }"#,
        );
        let held = BTreeSet::from(["root/a".to_string()]);
        let r = batch_route_withheld(&rs, &Assignment::new(), Mode::Atomic, &held).unwrap();
        assert_eq!(r.status, RouteStatus::Blocked);
        assert_eq!(
            r.blocked,
            vec![
                BlockedNode { node: "root/a".into(), waiting_on: vec![] },
                BlockedNode { node: "root/b".into(), waiting_on: vec!["root/a".into()] },
            ]
        );
    }

    #[test]
    fn unknown_decision_rejected() {
        let rs = load(DECIDE);
        let err = batch_route(&rs, &Assignment::new().with("root/zz", "yes"), Mode::Atomic).unwrap_err();
        assert_eq!(err, TraverseError::UnknownDecision("root/zz".into()));
    }

    #[test]
    fn error_maps_refuse_traversal() {
        let (rs, _) = analyze_source(r#"lawmap m "T" { entry s decision d "Q" exit e flow s -> d flow d -> e [label "y"] }"#, "t");
        assert!(matches!(init_route(&rs.unwrap(), Mode::Atomic), Err(TraverseError::InvalidMap(_))));
    }

    const NESTED: &str = r#"lawmap root "R" {
  entry s
  nested decision n "N" map sub
  exit a
  exit b
  flow s -> n
  flow n -> a [label "ok"]
  flow n -> b [label "fail"]
}
lawmap sub "S" {
  entry s
  decision d "Q" { ref text "t" }
  exit good outcome "ok"
  exit bad outcome "fail"
  flow s -> d
  flow d -> good [label "yes"]
  flow d -> bad [label "no"]
}"#;

    #[test]
    fn nested_decision_descends() {
        let rs = load(NESTED);
        let r = init_route(&rs, Mode::Descend).unwrap();
        assert_eq!(r.pending_ids(), vec!["root/n.d"]);
        let r = apply_answer(&r, &rs, "root/n.d", "no").unwrap();
        assert_eq!(r.exit_ids(), BTreeSet::from(["root/b"]));
        assert!(r.is_complete());

        let atomic = init_route(&rs, Mode::Atomic).unwrap();
        assert_eq!(atomic.pending_ids(), vec!["root/n"]);
        assert_eq!(atomic.pending[0].options, vec!["ok", "fail"]);
    }

    #[test]
    fn flatten_splices_nested_decision() {
        let rs = load(NESTED);
        assert_eq!(flatten(&rs, 0), *rs.root_doc());
        let flat = flatten(&rs, 1);
        assert_eq!(flat.nodes.len(), 4 - 1 + 4);
        assert!(flat.edge("n.bad->b").is_some());
        assert!(flat.edge("s->n.s").is_some());
        let mut set = rs.set.clone();
        set.docs.insert(flat.id.clone(), flat);
        let frs = crate::validate::resolve_set(set).unwrap();
        let r = batch_route(&frs, &Assignment::new().with("root/n.d", "yes"), Mode::Atomic).unwrap();
        assert_eq!(r.exit_ids(), BTreeSet::from(["root/a"]));
    }

    #[test]
    fn diff_identity_and_mismatch() {
        let rs = load(DECIDE);
        let r = init_route(&rs, Mode::Atomic).unwrap();
        assert!(diff_routes(&r, &r).unwrap().is_empty());
        let mut other = r.clone();
        other.set_id = "x".into();
        assert!(matches!(diff_routes(&r, &other), Err(TraverseError::SetMismatch(..))));
    }

    #[test]
    fn route_json_shape() {
        let rs = load(DECIDE);
        let r = init_route(&rs, Mode::Atomic).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "AwaitingDecision");
        assert_eq!(v["pending"][0]["decision"], "root/d");
        assert!(v["reachedExits"].as_array().unwrap().is_empty());
        let back: Route = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
