//! Small reference instances and codes: the butterfly, a shared-bottleneck
//! network, a one-edge relay, and seeded random DAGs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{FunctionTable, Input, NetworkCode};
use crate::engine::{Compiled, ProblemRef};
use crate::error::Result;
use crate::graph::{NetworkGraph, UnicastInstance};
use crate::reduction::{lift_code, reduce};

fn pairs(p: &[(&str, &str)]) -> Vec<(String, String)> {
    p.iter().map(|(s, t)| (s.to_string(), t.to_string())).collect()
}

/// Two-unicast butterfly: both messages share the bottleneck `e3`, and each
/// terminal gets the other source's message on a side edge.
pub fn butterfly() -> UnicastInstance {
    let g = NetworkGraph::from_unit_edges(
        &["s1", "s2", "m", "w", "t1", "t2"],
        &[
            ("e1", "s1", "m"),
            ("e2", "s2", "m"),
            ("e3", "m", "w"),
            ("e4", "w", "t1"),
            ("e5", "w", "t2"),
            ("e6", "s1", "t2"),
            ("e7", "s2", "t1"),
        ],
    );
    UnicastInstance::new(g, pairs(&[("s1", "t1"), ("s2", "t2")]))
}

/// Two pairs forced through one shared unit edge `u -> v`.
pub fn bottleneck() -> UnicastInstance {
    let g = NetworkGraph::from_unit_edges(
        &["s1", "s2", "u", "v", "t1", "t2"],
        &[
            ("f1", "s1", "u"),
            ("f2", "s2", "u"),
            ("f3", "u", "v"),
            ("f4", "v", "t1"),
            ("f5", "v", "t2"),
        ],
    );
    UnicastInstance::new(g, pairs(&[("s1", "t1"), ("s2", "t2")]))
}

/// One pair joined by a single unit edge.
pub fn relay() -> UnicastInstance {
    let g = NetworkGraph::from_unit_edges(&["s1", "t1"], &[("e", "s1", "t1")]);
    UnicastInstance::new(g, pairs(&[("s1", "t1")]))
}

const XOR: [u64; 4] = [0, 1, 1, 0];

/// The network-coding solution of the butterfly at `n = 1`: `e3` carries
/// `M1 xor M2`.
pub fn butterfly_xor_code() -> NetworkCode {
    NetworkCode::new(1, 2)
        .with_edge("e1", &["msg:0"], vec![0, 1])
        .with_edge("e2", &["msg:1"], vec![0, 1])
        .with_edge("e6", &["msg:0"], vec![0, 1])
        .with_edge("e7", &["msg:1"], vec![0, 1])
        .with_edge("e3", &["e1", "e2"], XOR.to_vec())
        .with_edge("e4", &["e3"], vec![0, 1])
        .with_edge("e5", &["e3"], vec![0, 1])
        .with_decoder("t1", &["e4", "e7"], XOR.to_vec())
        .with_decoder("t2", &["e5", "e6"], XOR.to_vec())
}

/// Routing only: `e3` forwards `M1`, so `t2` never sees `M2`.
pub fn butterfly_routing_code() -> NetworkCode {
    NetworkCode::new(1, 2)
        .with_edge("e1", &["msg:0"], vec![0, 1])
        .with_edge("e2", &["msg:1"], vec![0, 1])
        .with_edge("e6", &["msg:0"], vec![0, 1])
        .with_edge("e7", &["msg:1"], vec![0, 1])
        .with_edge("e3", &["e1", "e2"], vec![0, 0, 1, 1])
        .with_edge("e4", &["e3"], vec![0, 1])
        .with_edge("e5", &["e3"], vec![0, 1])
        .with_decoder("t1", &["e4", "e7"], vec![0, 0, 1, 1])
        .with_decoder("t2", &["e5", "e6"], vec![0, 1, 0, 1])
}

pub fn relay_identity_code(n: u32) -> NetworkCode {
    let mut c = NetworkCode::new(n, n);
    c.edge_functions
        .insert("e".into(), FunctionTable::identity(Input::Message(0), n));
    c.decoders
        .insert("t1".into(), FunctionTable::identity(Input::edge("e"), n));
    c
}

/// The lifted butterfly code with `B_1` replaced by a copy of `x_1`.
pub fn lifted_butterfly_copying_x1() -> Result<NetworkCode> {
    let r = reduce(&butterfly())?;
    let mut c = lift_code(&butterfly_xor_code(), &r)?;
    let b1 = &r.wiring.branches[0];
    // inputs (x, y, z'): output x
    c.edge_functions.get_mut(&b1.b).expect("lifted").table = (0..8).map(|i| i >> 2).collect();
    Ok(c)
}

/// The lifted butterfly code with a constant `x_1`.
pub fn lifted_butterfly_constant_x1() -> Result<NetworkCode> {
    let r = reduce(&butterfly())?;
    let mut c = lift_code(&butterfly_xor_code(), &r)?;
    let b1 = &r.wiring.branches[0];
    c.edge_functions.get_mut(&b1.x).expect("lifted").table = vec![0, 0];
    Ok(c)
}

/// Random unicast instance on a DAG with `k` pairs, `extra` relay nodes and
/// exactly `edges` unit edges, drawn from a seeded ChaCha stream.
pub fn random_unicast(seed: u64, k: usize, extra: usize, edges: usize) -> UnicastInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<String> = (1..=k)
        .flat_map(|i| [format!("s{i}"), format!("t{i}")])
        .chain((1..=extra).map(|j| format!("v{j}")))
        .collect();
    nodes.shuffle(&mut rng);
    // the shuffled order is a topological order
    let mut list = Vec::with_capacity(edges);
    while list.len() < edges {
        let i = rng.gen_range(0..nodes.len() - 1);
        let j = rng.gen_range(i + 1..nodes.len());
        let id = format!("e{}", list.len() + 1);
        list.push((id, nodes[i].clone(), nodes[j].clone()));
    }
    let g = NetworkGraph::new(
        nodes.clone(),
        list.into_iter()
            .map(|(id, u, v)| crate::graph::Edge::new(id, u, v, 1))
            .collect(),
    );
    let pairs = (1..=k).map(|i| (format!("s{i}"), format!("t{i}"))).collect();
    UnicastInstance::new(g, pairs)
}

/// Code with uniformly random tables. Every encoder reads all in-edges of
/// its tail (and the tail's message slots first); every decoder reads all
/// in-edges of its terminal.
pub fn random_code<'a>(problem: impl Into<ProblemRef<'a>>, n: u32, message_bits: u32, rng: &mut impl Rng) -> Result<NetworkCode> {
    let problem = problem.into();
    let g = problem.graph();
    let layout = problem.layout(n, message_bits)?;
    let mut code = NetworkCode::new(n, message_bits);
    let alphabet = |e: usize| 1u64 << (g.edge(e).capacity * n);
    for (e, edge) in g.edges().iter().enumerate() {
        let v = g.tail(e);
        let mut inputs: Vec<Input> = Vec::new();
        let mut size = 1u64;
        for (s, slot) in layout.slots.iter().enumerate() {
            if slot.owner == v {
                inputs.push(Input::Message(s));
                size *= 1 << slot.bits;
            }
        }
        for f in g.in_edges(v) {
            inputs.push(Input::edge(&g.edge(f).id));
            size *= alphabet(f);
        }
        let q = alphabet(e);
        let table = (0..size).map(|_| rng.gen_range(0..q)).collect();
        code.edge_functions.insert(edge.id.clone(), FunctionTable::new(inputs, table));
    }
    for d in &layout.demands {
        let ins = g.in_edges(d.terminal);
        let size: u64 = ins.iter().map(|&f| alphabet(f)).product();
        let q = 1u64 << layout.slots[d.slot].bits;
        let table = (0..size).map(|_| rng.gen_range(0..q)).collect();
        code.decoders.insert(
            g.nodes()[d.terminal].clone(),
            FunctionTable::new(ins.iter().map(|&f| Input::edge(&g.edge(f).id)).collect(), table),
        );
    }
    Compiled::new(&code, problem)?;
    Ok(code)
}

/// Member `seed` of the seeded family used by the test corpus: one pair
/// when `seed` is a multiple of 4 (two otherwise), `4 + seed % 5` edges and
/// `seed % 3` relay nodes.
pub fn random_family(seed: u64) -> UnicastInstance {
    let k = if seed.is_multiple_of(4) { 1 } else { 2 };
    random_unicast(seed, k, (seed % 3) as usize, 4 + (seed % 5) as usize)
}

/// Seeds of [`random_family`] in the reference corpus: fourteen feasible
/// members and six infeasible ones, all small enough for exhaustive search
/// on both sides of the reduction.
pub const CORPUS_SEEDS: [u64; 20] = [0, 4, 13, 22, 23, 36, 46, 51, 56, 66, 101, 126, 149, 178, 186, 201, 222, 239, 241, 285];

/// The named instances followed by the seeded family members.
pub fn reference_corpus() -> Vec<(String, UnicastInstance)> {
    let mut out = vec![
        ("butterfly".to_string(), butterfly()),
        ("bottleneck".to_string(), bottleneck()),
        ("relay".to_string(), relay()),
    ];
    out.extend(CORPUS_SEEDS.iter().map(|&s| (format!("random_{s:03}"), random_family(s))));
    out
}
