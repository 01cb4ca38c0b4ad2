mod common;

use std::collections::BTreeMap;

use nec_reduction::audit::{audit_counting_bounds, classify_messages, compute_signal_sets};
use nec_reduction::corpus::{random_code, random_unicast};
use nec_reduction::info::{triangle_bound_check, JointDistribution};
use nec_reduction::io::{code_to_string, instance_to_string, parse_code, parse_instance, Instance};
use nec_reduction::oracle::{search_unicast, SearchBudget};
use nec_reduction::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance() -> impl Strategy<Value = UnicastInstance> {
    (any::<u64>(), 1usize..=2, 0usize..=2, 2usize..=7).prop_map(|(seed, k, extra, edges)| random_unicast(seed, k, extra, edges))
}

/// Random DAG on `nodes` nodes, edges only from lower to higher index.
fn dag(nodes: usize, picks: &[(usize, usize, u32)]) -> NetworkGraph {
    let names: Vec<String> = (0..nodes).map(|i| format!("v{i}")).collect();
    let edges = picks
        .iter()
        .enumerate()
        .filter_map(|(i, &(a, b, c))| {
            let (a, b) = (a % nodes, b % nodes);
            (a < b).then(|| Edge::new(format!("e{i}"), names[a].clone(), names[b].clone(), c))
        })
        .collect();
    NetworkGraph::new(names, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_cut_equals_pair_count(inst in instance()) {
        let r = reduce(&inst).unwrap();
        let cut = min_cut(&r.instance.graph, &r.instance.source, &r.instance.terminal).unwrap();
        prop_assert_eq!(cut.value, inst.k() as u64);
        prop_assert!(validate_instance(&r.instance).is_valid());
    }

    #[test]
    fn min_cut_matches_brute_force(nodes in 2usize..=6, picks in prop::collection::vec((0usize..6, 0usize..6, 1u32..=3), 0..12)) {
        let g = dag(nodes, &picks);
        let last = format!("v{}", nodes - 1);
        let cut = min_cut(&g, "v0", &last).unwrap();
        prop_assert_eq!(cut.value, common::brute_min_cut(&g, "v0", &last));
        let across: u64 = g
            .edges()
            .iter()
            .filter(|e| cut.cut_edges.contains(&e.id))
            .map(|e| e.capacity as u64)
            .sum();
        prop_assert_eq!(across, cut.value);
    }

    #[test]
    fn min_cut_ignores_relabeling(nodes in 2usize..=6, picks in prop::collection::vec((0usize..6, 0usize..6, 1u32..=3), 0..12)) {
        let g = dag(nodes, &picks);
        let last = format!("v{}", nodes - 1);
        let rename = |s: &str| format!("n_{}", s.chars().rev().collect::<String>());
        let mut nodes_r: Vec<String> = g.nodes().iter().map(|v| rename(v)).collect();
        nodes_r.reverse();
        let mut edges_r: Vec<Edge> = g
            .edges()
            .iter()
            .map(|e| Edge::new(format!("x{}", e.id), rename(&e.tail), rename(&e.head), e.capacity))
            .collect();
        edges_r.reverse();
        let h = NetworkGraph::new(nodes_r, edges_r);
        prop_assert_eq!(
            min_cut(&g, "v0", &last).unwrap().value,
            min_cut(&h, &rename("v0"), &rename(&last)).unwrap().value
        );
    }

    #[test]
    fn evaluate_matches_naive(inst in instance(), seed in any::<u64>(), n in 1u32..=2) {
        let r = reduce(&inst).unwrap();
        let k = inst.k() as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&r.instance, n, k * n, &mut rng).unwrap();
        let sim = common::Naive::nec(&r.instance, &code);
        let pats = enumerate_patterns(&r.instance, n).unwrap();
        for (i, p) in pats.iter().enumerate().step_by(3) {
            let m = (seed.rotate_left(i as u32)) % (1 << (k * n));
            let t = evaluate(&code, &r.instance, m, p).unwrap();
            prop_assert_eq!(&t.received, &sim.all_received(m, &p.values));
            prop_assert_eq!(t.decoded[&r.instance.terminal], sim.decode(&r.instance.terminal, m, &p.values));
        }
    }

    #[test]
    fn zero_error_check_matches_naive(inst in instance(), seed in any::<u64>()) {
        let r = reduce(&inst).unwrap();
        let k = inst.k() as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&r.instance, 1, k, &mut rng).unwrap();
        prop_assert_eq!(check_zero_error(&code, &r.instance).unwrap().is_ok(), common::naive_zero_error(&r.instance, &code));
    }

    #[test]
    fn counting_bounds_hold_on_random_codes(inst in instance(), seed in any::<u64>(), n in 1u32..=2, l in 1u64..=4) {
        let r = reduce(&inst).unwrap();
        let k = inst.k() as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&r.instance, n, k * n, &mut rng).unwrap();
        let cls = classify_messages(&code, &r.instance).unwrap();
        prop_assert!(cls.inconsistency().is_none());
        let sets = compute_signal_sets(&code, &r.instance, &cls, l).unwrap();
        let report = audit_counting_bounds(&cls, &sets, l);
        prop_assert!(report.all_hold(), "{:?}", report);
    }

    #[test]
    fn counting_bounds_hold_on_corrupted_lifts(inst in instance(), seed in any::<u64>(), edge_pick in any::<usize>()) {
        let report = search_unicast(&inst, 1, SearchBudget::default()).unwrap();
        if let Some(w) = report.verdict.witness() {
            let r = reduce(&inst).unwrap();
            let mut c = lift_code(w, &r).unwrap();
            // overwrite one table entry of one edge
            let ids: Vec<String> = c.edge_functions.keys().cloned().collect();
            let id = &ids[edge_pick % ids.len()];
            let f = c.edge_functions.get_mut(id).unwrap();
            let at = (seed as usize) % f.table.len();
            f.table[at] ^= 1;
            let cls = classify_messages(&c, &r.instance).unwrap();
            let sets = compute_signal_sets(&c, &r.instance, &cls, 2).unwrap();
            prop_assert!(audit_counting_bounds(&cls, &sets, 2).all_hold());
        }
    }

    #[test]
    fn triangle_inequality(weights in prop::collection::vec(0u32..10, 1..=64), dims in (1u64..=4, 1u64..=4, 1u64..=4)) {
        let (a, b, c) = dims;
        let mut pmf = BTreeMap::new();
        for (i, w) in weights.iter().enumerate().take((a * b * c) as usize) {
            let i = i as u64;
            pmf.insert(vec![i % a, (i / a) % b, i / (a * b)], *w as f64 + 1e-3);
        }
        let d = JointDistribution::from_weights(vec!["x".into(), "y".into(), "z".into()], pmf).unwrap();
        let t = triangle_bound_check(&d, &["x"], &["y"], &["z"]).unwrap();
        prop_assert!(t.holds, "{:?}", t);
        let mi = d.mutual_information(&["x"], &["z"]).unwrap();
        prop_assert!(mi >= -1e-9);
        prop_assert!(mi <= d.entropy(&["x"]).unwrap().min(d.entropy(&["z"]).unwrap()) + 1e-9);
    }

    #[test]
    fn io_round_trip(inst in instance(), seed in any::<u64>()) {
        let r = reduce(&inst).unwrap();
        for i in [Instance::Unicast(inst.clone()), Instance::Nec(r.instance.clone())] {
            let text = instance_to_string(&i).unwrap();
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back, &i);
            prop_assert_eq!(instance_to_string(&back).unwrap(), text);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&r.instance, 1, inst.k() as u32, &mut rng).unwrap();
        let text = code_to_string(&code).unwrap();
        prop_assert_eq!(parse_code(&text).unwrap(), code);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lift_then_extract_recovers_a_unicast_code(inst in instance()) {
        let report = search_unicast(&inst, 1, SearchBudget::default()).unwrap();
        let settled = report.verdict.is_feasible() || report.verdict.is_infeasible();
        prop_assert!(settled);
        if let Some(w) = report.verdict.witness() {
            let r = reduce(&inst).unwrap();
            let lifted = lift_code(w, &r).unwrap();
            prop_assert!(check_zero_error(&lifted, &r.instance).unwrap().is_ok());
            let ex = extract_code(&lifted, &r.instance).unwrap();
            prop_assert!(ex.chain.is_identity());
            prop_assert!(check_unicast_zero_error(&ex.code, &inst).unwrap().is_ok());
        }
    }

    #[test]
    fn oracle_matches_naive_on_tiny_instances(seed in any::<u64>(), k in 1usize..=2) {
        let inst = random_unicast(seed, k, 0, 2 + k);
        prop_assume!(oracle::count_code_space(&inst, 1, k as u32).unwrap() <= 100_000u32.into());
        let report = search_unicast(&inst, 1, SearchBudget::default()).unwrap();
        prop_assert_eq!(report.verdict.is_feasible(), common::naive_unicast_feasible(&inst, 1));
    }
}
