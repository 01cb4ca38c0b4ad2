mod common;

use std::collections::BTreeSet;

use nec_reduction::corpus::{bottleneck, butterfly, relay};
use nec_reduction::*;

fn names(set: &BTreeSet<String>) -> Vec<&str> {
    set.iter().map(String::as_str).collect()
}

#[test]
fn butterfly_is_valid() {
    let b = butterfly();
    assert!(validate_instance(&b).is_valid());
    assert_eq!(b.graph.node_count(), 6);
    assert_eq!(b.graph.edge_count(), 7);
    assert_eq!(b.k(), 2);
}

#[test]
fn two_cycle_is_rejected() {
    let g = NetworkGraph::from_unit_edges(&["u", "v"], &[("e", "u", "v"), ("f", "v", "u")]);
    let inst = UnicastInstance::new(g, vec![("u".into(), "v".into())]);
    let report = validate_instance(&inst);
    assert!(report.violations.iter().any(|v| v.contains("cycle detected")), "{report:?}");
}

#[test]
fn unknown_adversary_edge_is_rejected() {
    let g = NetworkGraph::from_unit_edges(&["s", "t"], &[("e", "s", "t")]);
    let inst = NecInstance::new(g, "s", "t", AdversaryClass::new(vec![vec!["nope".to_string()]]));
    let report = validate_instance(&inst);
    assert!(report.violations.iter().any(|v| v.contains("unknown edge in adversary")));
}

#[test]
fn structural_violations_are_listed() {
    let g = NetworkGraph::new(
        vec!["a".into(), "a".into(), "b".into()],
        vec![Edge::new("e", "a", "b", 0), Edge::new("e", "a", "zz", 1)],
    );
    let v = g.validate();
    assert!(v.iter().any(|m| m.contains("duplicate node")));
    assert!(v.iter().any(|m| m.contains("duplicate edge")));
    assert!(v.iter().any(|m| m.contains("unknown node")));
    assert!(v.iter().any(|m| m.contains("capacity")));
}

#[test]
fn pairing_must_be_one_to_one() {
    let g = NetworkGraph::from_unit_edges(&["s", "t", "r"], &[("e", "s", "t"), ("f", "s", "r")]);
    let inst = UnicastInstance::new(g, vec![("s".into(), "t".into()), ("s".into(), "r".into())]);
    assert!(!validate_instance(&inst).is_valid());
    let empty = UnicastInstance::new(relay().graph, vec![]);
    assert!(!validate_instance(&empty).is_valid());
}

#[test]
fn reduced_butterfly_cut_is_the_b_edges() {
    let r = reduce(&butterfly()).unwrap();
    let cut = min_cut(&r.instance.graph, "s", "t").unwrap();
    assert_eq!(cut.value, 2);
    assert_eq!(names(&cut.cut_edges), vec!["b_1", "b_2"]);
}

#[test]
fn small_cuts() {
    let rel = relay();
    assert_eq!(min_cut(&rel.graph, "s1", "t1").unwrap().value, 1);
    let b = bottleneck();
    assert_eq!(min_cut(&b.graph, "s1", "t1").unwrap().value, 1);
}

#[test]
fn per_pair_cuts() {
    // matches a brute-force search over all node subsets
    for inst in [butterfly(), bottleneck()] {
        let cuts = unicast_cut_check(&inst).unwrap();
        let brute: Vec<u64> = inst
            .pairs
            .iter()
            .map(|(s, t)| common::brute_min_cut(&inst.graph, s, t))
            .collect();
        assert_eq!(cuts, brute);
    }
    assert_eq!(unicast_cut_check(&butterfly()).unwrap(), vec![1, 1]);
    assert_eq!(unicast_cut_check(&bottleneck()).unwrap(), vec![1, 1]);
}

#[test]
fn unreachable_terminal_has_zero_cut() {
    let g = NetworkGraph::from_unit_edges(&["s1", "t1", "s2", "t2"], &[("e", "s1", "t1"), ("f", "t2", "s2")]);
    let inst = UnicastInstance::new(g, vec![("s1".into(), "t1".into()), ("s2".into(), "t2".into())]);
    assert!(unicast_cut_check(&inst).unwrap().contains(&0));
}

#[test]
fn reduce_counts() {
    let r = reduce(&butterfly()).unwrap();
    assert_eq!(r.instance.graph.node_count(), 12);
    assert_eq!(r.instance.graph.edge_count(), 19);
    assert_eq!(r.instance.adversary.len(), 15);
    assert!(r.instance.adversary.is_singleton_only());
    assert!(validate_instance(&r.instance).is_valid());

    let r1 = reduce(&relay()).unwrap();
    assert_eq!(r1.instance.graph.node_count(), 6);
    assert_eq!(r1.instance.graph.edge_count(), 7);
    assert_eq!(r1.instance.adversary.len(), 5);
    assert_eq!(min_cut(&r1.instance.graph, "s", "t").unwrap().value, 1);
}

#[test]
fn reduce_keeps_original_edges_first_and_avoids_name_clashes() {
    let g = NetworkGraph::from_unit_edges(&["s", "t"], &[("x_1", "s", "t")]);
    let inst = UnicastInstance::new(g, vec![("s".into(), "t".into())]);
    let r = reduce(&inst).unwrap();
    let g = &r.instance.graph;
    assert_eq!(g.edges()[0].id, "x_1");
    assert_eq!(r.instance.source, "_s");
    assert_eq!(r.instance.terminal, "_t");
    assert_eq!(r.wiring.branches[0].x, "_x_1");
    assert!(validate_instance(&r.instance).is_valid());
    let back = reduction::Reduced::from_instance(&r.instance).unwrap();
    assert_eq!(back.original, inst);
}

#[test]
fn roles_must_follow_the_gadget() {
    let mut r = reduce(&relay()).unwrap().instance;
    let roles = r.roles.as_mut().unwrap();
    // swap the roles of x_1 and z_1
    let x = roles["x_1"];
    let z = roles["z_1"];
    roles.insert("x_1".into(), z);
    roles.insert("z_1".into(), x);
    let report = validate_instance(&r);
    assert!(report.violations.iter().any(|v| v.contains("gadget wiring")), "{report:?}");
}

#[test]
fn pattern_counts() {
    let r = reduce(&butterfly()).unwrap();
    assert_eq!(pattern_count(&r.instance, 1).unwrap(), 16u32.into());
    assert_eq!(pattern_count(&r.instance, 2).unwrap(), 46u32.into());
    assert_eq!(enumerate_patterns(&r.instance, 1).unwrap().len(), 16);
    for n in 1..=2 {
        let listed: BTreeSet<_> = enumerate_patterns(&r.instance, n)
            .unwrap()
            .into_iter()
            .map(|p| p.values)
            .collect();
        assert_eq!(listed, common::naive_patterns(&r.instance, n));
    }

    let mut empty = r.instance.clone();
    empty.adversary = AdversaryClass::empty();
    assert_eq!(enumerate_patterns(&empty, 1).unwrap(), vec![ErrorPattern::zero()]);
    assert_eq!(pattern_count(&empty, 3).unwrap(), 1u32.into());
}

#[test]
fn capacity_two_edge_pattern_values() {
    let g = NetworkGraph::new(vec!["s".into(), "t".into()], vec![Edge::new("e", "s", "t", 2)]);
    let inst = NecInstance::new(g, "s", "t", AdversaryClass::singletons(["e".to_string()]));
    let pats = enumerate_patterns(&inst, 1).unwrap();
    let values: Vec<u64> = pats.iter().map(|p| p.values.get("e").copied().unwrap_or(0)).collect();
    assert_eq!(values, vec![0, 1, 2, 3]);
}

#[test]
fn zero_pattern_comes_first_and_order_is_canonical() {
    let r = reduce(&butterfly()).unwrap();
    let pats = enumerate_patterns(&r.instance, 1).unwrap();
    assert!(pats[0].values.is_empty());
    // singleton supports follow edge declaration order
    let first: Vec<&str> = pats[1..]
        .iter()
        .map(|p| p.values.keys().next().unwrap().as_str())
        .collect();
    let expected: Vec<&str> = r
        .instance
        .graph
        .edges()
        .iter()
        .map(|e| e.id.as_str())
        .filter(|id| r.instance.adversary.jammable().contains(id))
        .collect();
    assert_eq!(first, expected);
}
