mod common;

use std::collections::BTreeSet;

use lawmap_core::fixtures;
use lawmap_core::traverse::{apply_answer, batch_route, batch_route_withheld, diff_routes, flatten, init_route, retract_answer, TraverseError};
use lawmap_core::validate::ResolvedSet;
use lawmap_core::{Assignment, Mode, Route, RouteStatus};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use common::MapShape;

fn exits(r: &Route) -> Vec<&str> {
    r.exit_ids().into_iter().collect()
}

#[test]
fn s24c_outcome_table() {
    let rs = fixtures::s24c();
    let table = [
        ("no", "no", "root/s24c_2"),
        ("yes", "no", "root/s24c_5"),
        ("no", "yes", "root/s24c_6"),
        ("yes", "yes", "root/s24c_6"),
    ];
    for (a3, b3, exit) in table {
        let a = Assignment::new()
            .with("root/opposed", "no")
            .with("root/differs_3a", a3)
            .with("root/differs_3b", b3);
        let r = batch_route(&rs, &a, Mode::Atomic).unwrap();
        assert_eq!(r.status, RouteStatus::Complete, "3a={a3} 3b={b3}");
        assert_eq!(exits(&r), vec![exit], "3a={a3} 3b={b3}");
    }
    let r = batch_route(&rs, &Assignment::new().with("root/opposed", "yes"), Mode::Atomic).unwrap();
    assert_eq!(exits(&r), vec!["root/s24c_6"]);
}

#[test]
fn s24c_incremental_walk() {
    let rs = fixtures::s24c();
    let r = init_route(&rs, Mode::Atomic).unwrap();
    assert_eq!(r.pending_ids(), vec!["root/opposed"]);
    let r = apply_answer(&r, &rs, "root/opposed", "no").unwrap();
    assert_eq!(r.pending_ids(), vec!["root/differs_3b"]);
    let r = apply_answer(&r, &rs, "root/differs_3b", "no").unwrap();
    assert_eq!(r.pending_ids(), vec!["root/differs_3a"]);
    let r = apply_answer(&r, &rs, "root/differs_3a", "yes").unwrap();
    assert!(r.is_complete());
    assert_eq!(exits(&r), vec!["root/s24c_5"]);
    assert_eq!(r.reached_exits[0].outcome_label, None);

    let flipped = apply_answer(&retract_answer(&r, &rs, "root/differs_3a").unwrap(), &rs, "root/differs_3a", "no").unwrap();
    let delta = diff_routes(&r, &flipped).unwrap();
    assert_eq!(delta.exits_only_in_a, BTreeSet::from(["root/s24c_5".to_string()]));
    assert_eq!(delta.exits_only_in_b, BTreeSet::from(["root/s24c_2".to_string()]));

    assert!(matches!(apply_answer(&r, &rs, "root/opposed", "yes"), Err(TraverseError::NotPending(_))));
    let first = init_route(&rs, Mode::Atomic).unwrap();
    assert!(matches!(
        apply_answer(&first, &rs, "root/opposed", "maybe"),
        Err(TraverseError::InvalidLabel { .. })
    ));
    assert!(matches!(retract_answer(&first, &rs, "root/opposed"), Err(TraverseError::NotAnswered(_))));
}

#[test]
fn conveyancing_dependency_blocks_buyer() {
    let rs = fixtures::conveyancing();
    let a = Assignment::new().with("root/s_registered", "registered");
    let withheld = BTreeSet::from(["root/s_deduce".to_string()]);
    let r = batch_route_withheld(&rs, &a, Mode::Atomic, &withheld).unwrap();
    assert_eq!(r.status, RouteStatus::Blocked);
    let investigate = r.blocked.iter().find(|b| b.node == "root/b_investigate").expect("b_investigate blocked");
    assert_eq!(investigate.waiting_on, vec!["root/s_deduce".to_string()]);
    assert!(!r.completed_ids().contains("root/b_investigate"));

    let free = batch_route(&rs, &a, Mode::Atomic).unwrap();
    assert!(free.is_complete());
    assert_eq!(exits(&free), vec!["root/b_done", "root/s_done"]);
}

#[test]
fn conveyancing_descends_into_instructions() {
    let rs = fixtures::conveyancing();
    let r = init_route(&rs, Mode::Descend).unwrap();
    let mut pending = r.pending_ids();
    pending.sort();
    assert_eq!(pending, vec!["root/b_take.mortgage", "root/s_registered"]);
    let a = Assignment::new()
        .with("root/s_registered", "unregistered")
        .with("root/b_take.mortgage", "yes");
    let r = batch_route(&rs, &a, Mode::Descend).unwrap();
    assert!(r.is_complete());
    let done = r.completed_ids();
    assert!(done.contains("root/b_take.t_offer"));
    assert!(done.contains("root/b_take"));
    assert!(r.live_edges.contains("root/b_take.mortgage->t_offer[yes]"));
}

fn assignments_for(rs: &ResolvedSet, mode: Mode) -> Vec<Assignment> {
    common::total_assignments(&common::decision_options(rs, mode))
}

#[test]
fn reached_exits_match_path_enumeration() {
    let mut rng = common::rng(7);
    let mut checked = 0;
    for i in 0..200 {
        let shape = MapShape {
            max_nodes: 12,
            dependencies: i % 2 == 1,
            lanes: false,
        };
        let doc = common::random_map(&mut rng, "g", shape);
        let rs = common::single(doc.clone());
        for a in assignments_for(&rs, Mode::Atomic) {
            let r = batch_route(&rs, &a, Mode::Atomic).unwrap();
            let got: BTreeSet<String> = r.exit_ids().into_iter().map(String::from).collect();
            assert_eq!(got, common::oracle_exits(&doc, &a.answers), "map {i} answers {a:?}");
            assert_eq!(r.status, RouteStatus::Complete, "map {i} answers {a:?}");
            checked += 1;
        }
    }
    assert!(checked >= 200);
}

/// Answers pending decisions one at a time in random order, using the
/// label `pick` gives each decision, and returns every intermediate route.
fn walk(rs: &ResolvedSet, mode: Mode, rng: &mut StdRng, pick: &dyn Fn(&str, &[String]) -> String) -> Vec<Route> {
    let mut r = init_route(rs, mode).unwrap();
    let mut trail = vec![r.clone()];
    while let Some(p) = r.pending.choose(rng).cloned() {
        let label = pick(&p.decision, &p.options);
        r = apply_answer(&r, rs, &p.decision, &label).unwrap();
        trail.push(r.clone());
    }
    trail
}

fn labeller(seed: u64) -> impl Fn(&str, &[String]) -> String {
    move |d: &str, opts: &[String]| {
        let h = d.bytes().fold(seed, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
        opts[(h % opts.len() as u64) as usize].clone()
    }
}

#[test]
fn answering_is_monotone_and_order_independent() {
    let mut rng = common::rng(8);
    let mut maps = Vec::new();
    for i in 0..50 {
        let shape = MapShape {
            max_nodes: 12,
            dependencies: i % 2 == 0,
            lanes: false,
        };
        maps.push(common::single(common::random_map(&mut rng, "g", shape)));
    }
    for seq in 0..1000 {
        let rs = &maps[seq % maps.len()];
        let pick = labeller(seq as u64 / maps.len() as u64);
        let trail = walk(rs, Mode::Atomic, &mut rng, &pick);
        for pair in trail.windows(2) {
            let (before, after) = (&pair[0], &pair[1]);
            assert!(before.completed_ids().is_subset(&after.completed_ids()), "sequence {seq}");
            assert!(before.exit_ids().is_subset(&after.exit_ids()), "sequence {seq}");
            assert!(before.live_edges.is_subset(&after.live_edges), "sequence {seq}");
        }
        let last = trail.last().unwrap();
        let other = walk(rs, Mode::Atomic, &mut rng, &pick);
        let other = other.last().unwrap();
        assert_eq!(last.answers, other.answers, "sequence {seq}");
        assert_eq!(last.completed_ids(), other.completed_ids(), "sequence {seq}");
        assert_eq!(last.reached_exits, other.reached_exits, "sequence {seq}");
        assert_eq!(last.live_edges, other.live_edges, "sequence {seq}");
        let batch = batch_route(rs, &last.answers, Mode::Atomic).unwrap();
        assert_eq!(&batch, last, "sequence {seq}");
    }
}

fn flattened(rs: &ResolvedSet) -> ResolvedSet {
    let mut set = rs.set.clone();
    set.docs.insert(set.root.clone(), flatten(rs, usize::MAX));
    common::resolved(set)
}

fn assert_flatten_equivalent(rs: &ResolvedSet, assignments: &[Assignment], withheld: &BTreeSet<String>, what: &str) {
    let flat = flattened(rs);
    let containers = common::container_paths(rs);
    let mut nested_ids = lawmap_core::traverse::decision_ids(rs, Mode::Descend);
    let mut flat_ids = lawmap_core::traverse::decision_ids(&flat, Mode::Atomic);
    nested_ids.sort();
    flat_ids.sort();
    assert_eq!(nested_ids, flat_ids, "{what}: decision ids");
    for a in assignments {
        let nested = batch_route_withheld(rs, a, Mode::Descend, withheld).unwrap();
        let atomic = batch_route_withheld(&flat, a, Mode::Atomic, withheld).unwrap();
        assert_eq!(
            common::route_summary(&nested, &containers),
            common::route_summary(&atomic, &containers),
            "{what}: answers {a:?}"
        );
    }
}

/// Every total assignment, plus random partial ones, capped at `limit`.
fn sample_assignments(rs: &ResolvedSet, rng: &mut StdRng, limit: usize) -> Vec<Assignment> {
    let options = common::decision_options(rs, Mode::Descend);
    let mut out = common::sample_total(&options, rng, limit);
    for _ in 0..12 {
        let mut a = Assignment::new();
        for (d, o) in &options {
            if rng.gen_bool(0.5) {
                a = a.with(d.clone(), o.choose(rng).unwrap().clone());
            }
        }
        out.push(a);
    }
    out.push(Assignment::new());
    out
}

#[test]
fn flatten_matches_descend_on_conveyancing() {
    let rs = fixtures::conveyancing();
    let mut rng = common::rng(9);
    let all = sample_assignments(&rs, &mut rng, usize::MAX);
    assert_flatten_equivalent(&rs, &all, &BTreeSet::new(), "conveyancing");
    for w in ["root/s_deduce", "root/b_searches", "root/b_take.t_identity"] {
        assert_flatten_equivalent(&rs, &all, &BTreeSet::from([w.to_string()]), w);
    }
}

#[test]
fn flatten_matches_descend_on_generated_sets() {
    let mut rng = common::rng(10);
    let mut nested = 0;
    for i in 0..50 {
        let rs = common::random_nested_set(&mut rng, 1 + i % 2);
        nested += rs.set.docs.len() - 1;
        let sample = sample_assignments(&rs, &mut rng, 48);
        assert_flatten_equivalent(&rs, &sample, &BTreeSet::new(), &format!("set {i}"));
    }
    assert!(nested >= 25, "only {nested} sub-maps generated");
}

#[test]
fn flatten_depth_zero_is_identity() {
    let rs = fixtures::conveyancing();
    assert_eq!(&flatten(&rs, 0), rs.root_doc());
    let once = flatten(&rs, 1);
    assert!(once.node("b_take").is_none());
    assert!(once.node("b_take.mortgage").is_some());
}
