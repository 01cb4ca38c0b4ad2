//! Independent reference implementations used to cross-check the library:
//! a recursive evaluator working directly on edge ids, a pattern lister,
//! a brute-force cut search and a naive code-space enumerator.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nec_reduction::{FunctionTable, Input, NecInstance, NetworkCode, NetworkGraph, UnicastInstance};

pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

/// Message slot values: unicast slot `i` is bits `[n·i, n·(i+1))`; the NEC
/// source owns the whole message as slot 0.
fn slot_value(message: u64, slot: usize, bits: u32) -> u64 {
    (message >> (bits as u64 * slot as u64)) & ((1u64 << bits) - 1)
}

pub struct Naive<'a> {
    pub graph: &'a NetworkGraph,
    pub code: &'a NetworkCode,
    /// (owner node, bits) per slot
    pub slots: Vec<(String, u32)>,
}

impl<'a> Naive<'a> {
    pub fn unicast(inst: &'a UnicastInstance, code: &'a NetworkCode) -> Self {
        Naive {
            graph: &inst.graph,
            code,
            slots: inst.pairs.iter().map(|(s, _)| (s.clone(), code.n)).collect(),
        }
    }

    pub fn nec(inst: &'a NecInstance, code: &'a NetworkCode) -> Self {
        Naive {
            graph: &inst.graph,
            code,
            slots: vec![(inst.source.clone(), code.message_bits)],
        }
    }

    fn width(&self, edge: &str) -> u32 {
        self.graph.edges().iter().find(|e| e.id == edge).unwrap().capacity * self.code.n
    }

    fn input_value(&self, input: &Input, message: u64, rx: &mut BTreeMap<String, u64>, errors: &BTreeMap<String, u64>) -> (u64, u64) {
        match input {
            Input::Edge(e) => (self.received(e, message, rx, errors), 1 << self.width(e)),
            Input::Message(s) => {
                let bits = if self.slots.len() == 1 { self.code.message_bits } else { self.slots[*s].1 };
                let v = if self.slots.len() == 1 {
                    message
                } else {
                    slot_value(message, *s, bits)
                };
                (v, 1 << bits)
            }
        }
    }

    fn apply(&self, f: &FunctionTable, message: u64, rx: &mut BTreeMap<String, u64>, errors: &BTreeMap<String, u64>) -> u64 {
        let mut idx = 0u64;
        for input in &f.inputs {
            let (v, r) = self.input_value(input, message, rx, errors);
            idx = idx * r + v;
        }
        f.table[idx as usize]
    }

    /// Received value on `edge`, computed recursively.
    pub fn received(&self, edge: &str, message: u64, rx: &mut BTreeMap<String, u64>, errors: &BTreeMap<String, u64>) -> u64 {
        if let Some(&v) = rx.get(edge) {
            return v;
        }
        let f = &self.code.edge_functions[edge];
        let sent = self.apply(f, message, rx, errors);
        let v = sent ^ errors.get(edge).copied().unwrap_or(0);
        rx.insert(edge.to_string(), v);
        v
    }

    pub fn decode(&self, terminal: &str, message: u64, errors: &BTreeMap<String, u64>) -> u64 {
        let mut rx = BTreeMap::new();
        self.apply(&self.code.decoders[terminal], message, &mut rx, errors)
    }

    pub fn all_received(&self, message: u64, errors: &BTreeMap<String, u64>) -> BTreeMap<String, u64> {
        let mut rx = BTreeMap::new();
        for e in self.graph.edges() {
            self.received(&e.id, message, &mut rx, errors);
        }
        rx
    }
}

/// Every admissible pattern as an edge → nonzero value map.
pub fn naive_patterns(inst: &NecInstance, n: u32) -> BTreeSet<BTreeMap<String, u64>> {
    let mut out = BTreeSet::new();
    out.insert(BTreeMap::new());
    for set in inst.adversary.sets() {
        let edges: Vec<&String> = set.iter().collect();
        let q: Vec<u64> = edges
            .iter()
            .map(|e| 1u64 << (inst.graph.edges().iter().find(|x| &&x.id == e).unwrap().capacity * n))
            .collect();
        let total: u64 = q.iter().product();
        for mut idx in 0..total {
            let mut p = BTreeMap::new();
            for (e, &r) in edges.iter().zip(&q) {
                let v = idx % r;
                idx /= r;
                if v != 0 {
                    p.insert((*e).clone(), v);
                }
            }
            out.insert(p);
        }
    }
    out
}

pub fn naive_zero_error(inst: &NecInstance, code: &NetworkCode) -> bool {
    let sim = Naive::nec(inst, code);
    let pats = naive_patterns(inst, code.n);
    (0..1u64 << code.message_bits).all(|m| pats.iter().all(|p| sim.decode(&inst.terminal, m, p) == m))
}

pub fn naive_unicast_ok(inst: &UnicastInstance, code: &NetworkCode) -> bool {
    let sim = Naive::unicast(inst, code);
    let none = BTreeMap::new();
    (0..1u64 << code.message_bits).all(|m| {
        inst.pairs
            .iter()
            .enumerate()
            .all(|(i, (_, t))| sim.decode(t, m, &none) == slot_value(m, i, code.n))
    })
}

/// Minimum over all node subsets containing `src` but not `dst` of the
/// capacity leaving the subset.
pub fn brute_min_cut(g: &NetworkGraph, src: &str, dst: &str) -> u64 {
    let nodes = g.nodes();
    let si = nodes.iter().position(|v| v == src).unwrap();
    let di = nodes.iter().position(|v| v == dst).unwrap();
    let mut best = u64::MAX;
    for mask in 0u64..1 << nodes.len() {
        if mask >> si & 1 == 0 || mask >> di & 1 == 1 {
            continue;
        }
        let inside = |v: &str| mask >> nodes.iter().position(|x| x == v).unwrap() & 1 == 1;
        let c = g
            .edges()
            .iter()
            .filter(|e| inside(&e.tail) && !inside(&e.head))
            .map(|e| e.capacity as u64)
            .sum();
        best = best.min(c);
    }
    best
}

/// Inputs an edge reads under the search convention: the tail's message
/// slots, then the tail's in-edges in declaration order.
fn edge_inputs(g: &NetworkGraph, slots: &[(String, u32)], edge: &nec_reduction::Edge, n: u32) -> (Vec<Input>, u64) {
    let mut inputs = Vec::new();
    let mut size = 1u64;
    for (s, (owner, bits)) in slots.iter().enumerate() {
        if owner == &edge.tail {
            inputs.push(Input::Message(s));
            size <<= bits;
        }
    }
    for e in g.edges() {
        if e.head == edge.tail {
            inputs.push(Input::edge(&e.id));
            size <<= e.capacity * n;
        }
    }
    (inputs, size)
}

/// A terminal and the value it must decode for each message.
pub type Demand = (String, Box<dyn Fn(u64) -> u64>);

/// Decide zero-error feasibility by listing every encoder assignment and
/// deriving decoders from observation classes. Only for tiny spaces.
pub fn naive_feasible(
    g: &NetworkGraph,
    slots: &[(String, u32)],
    n: u32,
    message_bits: u32,
    demands: &[Demand],
    patterns: &[BTreeMap<String, u64>],
) -> bool {
    let shapes: Vec<(String, Vec<Input>, u64, u64)> = g
        .edges()
        .iter()
        .map(|e| {
            let (inputs, size) = edge_inputs(g, slots, e, n);
            (e.id.clone(), inputs, size, 1u64 << (e.capacity * n))
        })
        .collect();
    let per_edge: Vec<u64> = shapes.iter().map(|(_, _, size, q)| q.pow(*size as u32)).collect();
    let total: u64 = per_edge.iter().product();
    let in_edges = |t: &str| -> Vec<String> { g.edges().iter().filter(|e| e.head == t).map(|e| e.id.clone()).collect() };
    for mut idx in 0..total {
        let mut code = NetworkCode::new(n, message_bits);
        for ((id, inputs, size, q), count) in shapes.iter().zip(&per_edge) {
            let mut t = idx % count;
            idx /= count;
            let mut table = vec![0; *size as usize];
            for cell in table.iter_mut() {
                *cell = t % q;
                t /= q;
            }
            code.edge_functions.insert(id.clone(), FunctionTable::new(inputs.clone(), table));
        }
        // dummy decoders so the evaluator can run; observations are read directly
        let sim = Naive {
            graph: g,
            code: &code,
            slots: slots.to_vec(),
        };
        let ok = demands.iter().all(|(t, want)| {
            let mut seen: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            for m in 0..1u64 << message_bits {
                for p in patterns {
                    let mut rx = BTreeMap::new();
                    let obs: Vec<u64> = in_edges(t).iter().map(|e| sim.received(e, m, &mut rx, p)).collect();
                    let d = want(m);
                    if *seen.entry(obs).or_insert(d) != d {
                        return false;
                    }
                }
            }
            true
        });
        if ok {
            return true;
        }
    }
    false
}

pub fn naive_unicast_feasible(inst: &UnicastInstance, n: u32) -> bool {
    let slots: Vec<(String, u32)> = inst.pairs.iter().map(|(s, _)| (s.clone(), n)).collect();
    let demands: Vec<Demand> = inst
        .pairs
        .iter()
        .enumerate()
        .map(|(i, (_, t))| (t.clone(), Box::new(move |m| slot_value(m, i, n)) as Box<dyn Fn(u64) -> u64>))
        .collect();
    naive_feasible(&inst.graph, &slots, n, inst.pairs.len() as u32 * n, &demands, &[BTreeMap::new()])
}

pub fn naive_nec_feasible(inst: &NecInstance, rate_bits: u32, n: u32) -> bool {
    let bits = rate_bits * n;
    let slots = vec![(inst.source.clone(), bits)];
    let demands: Vec<Demand> = vec![(inst.terminal.clone(), Box::new(|m| m))];
    let pats: Vec<_> = naive_patterns(inst, n).into_iter().collect();
    naive_feasible(&inst.graph, &slots, n, bits, &demands, &pats)
}

/// Every golden artifact as (file name, canonical text): each corpus
/// instance, its reduction, the unicast witness found by the search (when
/// feasible) and that witness lifted to the reduction.
pub fn golden_artifacts() -> Vec<(String, String)> {
    use nec_reduction::io::{code_to_string, instance_to_string, Instance};
    use nec_reduction::oracle::{search_unicast, SearchBudget};
    let mut out = Vec::new();
    for (name, inst) in nec_reduction::corpus::reference_corpus() {
        let r = nec_reduction::reduce(&inst).unwrap();
        out.push((format!("{name}.unicast.json"), instance_to_string(&Instance::Unicast(inst.clone())).unwrap()));
        out.push((format!("{name}.reduced.json"), instance_to_string(&Instance::Nec(r.instance.clone())).unwrap()));
        let report = search_unicast(&inst, 1, SearchBudget::default()).unwrap();
        if let Some(w) = report.verdict.witness() {
            out.push((format!("{name}.code.json"), code_to_string(w).unwrap()));
            let lifted = nec_reduction::lift_code(w, &r).unwrap();
            out.push((format!("{name}.lifted.json"), code_to_string(&lifted).unwrap()));
        }
    }
    out.push((
        "butterfly_xor.code.json".into(),
        code_to_string(&nec_reduction::corpus::butterfly_xor_code()).unwrap(),
    ));
    out
}

/// Compare artifacts with the files under `tests/data`, rewriting them
/// instead when `NECRED_BLESS` is set. Returns the mismatching names.
pub fn check_golden(artifacts: &[(String, String)]) -> Vec<String> {
    let dir = data_dir();
    let bless = std::env::var_os("NECRED_BLESS").is_some();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    let mut bad = Vec::new();
    for (name, text) in artifacts {
        let path = dir.join(name);
        if bless {
            std::fs::write(&path, text).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(on_disk) if &on_disk == text => {}
            _ => bad.push(name.clone()),
        }
    }
    bad
}
