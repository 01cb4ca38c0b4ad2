//! The gadget reduction from a k-unicast instance to a single-source,
//! single-sink error-correction instance, and the two code transformations
//! that move zero-error codes between them.
//!
//! Per pair `i` the gadget adds a fan-out node `u_i` and a combiner `B_i`:
//!
//! ```text
//!   s --a_i--> u_i --x_i--> B_i --b_i--> t
//!              u_i --y_i--> B_i
//!              u_i --z_i--> s_i  ...N...  t_i --z'_i--> B_i
//! ```
//!
//! All gadget edges have unit capacity and the adversary may corrupt any
//! single edge except the `a_i` and `b_i`.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::adversary::AdversaryClass;
use crate::code::{majority_table, mixed_radix_digits, mixed_radix_index, FunctionTable, Input, NetworkCode};
use crate::engine::{check_unicast_zero_error, check_zero_error, Compiled, UnicastVerdict, ZeroErrorVerdict};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeRole, NecInstance, NetworkGraph, RoleKind, UnicastInstance};
use crate::par;

/// Names of the gadget nodes and edges of one branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub u: String,
    pub combiner: String,
    pub a: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub z_prime: String,
    pub b: String,
    pub pair_source: String,
    pub pair_terminal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchWiring {
    pub source: String,
    pub terminal: String,
    pub branches: Vec<Branch>,
}

impl BranchWiring {
    /// Read the wiring back from the role labels of a reduced instance.
    pub fn from_instance(inst: &NecInstance) -> Result<Self> {
        inst.validate().into_result()?;
        let roles = inst.roles.as_ref().ok_or(Error::NotReduced)?;
        let g = &inst.graph;
        let mut by_branch: BTreeMap<usize, BTreeMap<RoleKind, String>> = BTreeMap::new();
        for (id, role) in roles {
            if let Some(i) = role.branch {
                by_branch.entry(i).or_default().insert(role.kind, id.clone());
            }
        }
        if by_branch.is_empty() {
            return Err(Error::NotReduced);
        }
        let branches = by_branch
            .into_values()
            .map(|r| {
                let name = |k: RoleKind| r[&k].clone();
                let edge = |k: RoleKind| g.edge(g.edge_index(&r[&k]).expect("validated"));
                Branch {
                    u: edge(RoleKind::A).head.clone(),
                    combiner: edge(RoleKind::B).tail.clone(),
                    pair_source: edge(RoleKind::Z).head.clone(),
                    pair_terminal: edge(RoleKind::ZPrime).tail.clone(),
                    a: name(RoleKind::A),
                    x: name(RoleKind::X),
                    y: name(RoleKind::Y),
                    z: name(RoleKind::Z),
                    z_prime: name(RoleKind::ZPrime),
                    b: name(RoleKind::B),
                }
            })
            .collect();
        Ok(BranchWiring {
            source: inst.source.clone(),
            terminal: inst.terminal.clone(),
            branches,
        })
    }

    pub fn k(&self) -> usize {
        self.branches.len()
    }

    fn gadget_nodes(&self) -> HashSet<&str> {
        let mut out: HashSet<&str> = [self.source.as_str(), self.terminal.as_str()].into();
        for b in &self.branches {
            out.insert(&b.u);
            out.insert(&b.combiner);
        }
        out
    }
}

/// A reduced instance together with its wiring and the instance it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced {
    pub instance: NecInstance,
    pub wiring: BranchWiring,
    pub original: UnicastInstance,
}

impl Reduced {
    /// Recover wiring and the embedded unicast instance from role labels.
    pub fn from_instance(inst: &NecInstance) -> Result<Self> {
        let wiring = BranchWiring::from_instance(inst)?;
        let g = &inst.graph;
        let gadget = wiring.gadget_nodes();
        let nodes = g.nodes().iter().filter(|v| !gadget.contains(v.as_str())).cloned().collect();
        let roles = inst.roles.as_ref().expect("checked by wiring");
        let edges = g
            .edges()
            .iter()
            .filter(|e| roles.get(&e.id).is_none_or(|r| r.kind == RoleKind::Internal))
            .cloned()
            .collect();
        let pairs = wiring
            .branches
            .iter()
            .map(|b| (b.pair_source.clone(), b.pair_terminal.clone()))
            .collect();
        let original = UnicastInstance::new(NetworkGraph::new(nodes, edges), pairs);
        original.validate().into_result()?;
        Ok(Reduced {
            instance: inst.clone(),
            wiring,
            original,
        })
    }
}

fn fresh(base: String, taken: &mut HashSet<String>) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.insert(0, '_');
    }
    taken.insert(name.clone());
    name
}

/// Build the gadget instance for a k-unicast instance.
pub fn reduce(inst: &UnicastInstance) -> Result<Reduced> {
    inst.validate().into_result()?;
    let g = &inst.graph;
    let mut taken: HashSet<String> = g.nodes().iter().cloned().chain(g.edges().iter().map(|e| e.id.clone())).collect();
    let source = fresh("s".into(), &mut taken);
    let terminal = fresh("t".into(), &mut taken);

    let mut nodes = g.nodes().to_vec();
    nodes.push(source.clone());
    nodes.push(terminal.clone());
    let mut edges = g.edges().to_vec();
    let mut roles: BTreeMap<String, EdgeRole> = g.edges().iter().map(|e| (e.id.clone(), EdgeRole::internal())).collect();
    let mut jammable: Vec<String> = g.edges().iter().map(|e| e.id.clone()).collect();

    let mut branches = Vec::with_capacity(inst.k());
    for (i, (si, ti)) in inst.pairs.iter().enumerate() {
        let j = i + 1;
        let u = fresh(format!("u_{j}"), &mut taken);
        let combiner = fresh(format!("B_{j}"), &mut taken);
        nodes.push(u.clone());
        nodes.push(combiner.clone());
        let branch = Branch {
            a: fresh(format!("a_{j}"), &mut taken),
            x: fresh(format!("x_{j}"), &mut taken),
            y: fresh(format!("y_{j}"), &mut taken),
            z: fresh(format!("z_{j}"), &mut taken),
            z_prime: fresh(format!("zp_{j}"), &mut taken),
            b: fresh(format!("b_{j}"), &mut taken),
            u,
            combiner,
            pair_source: si.clone(),
            pair_terminal: ti.clone(),
        };
        let wires = [
            (&branch.a, &source, &branch.u, RoleKind::A),
            (&branch.x, &branch.u, &branch.combiner, RoleKind::X),
            (&branch.y, &branch.u, &branch.combiner, RoleKind::Y),
            (&branch.z, &branch.u, si, RoleKind::Z),
            (&branch.z_prime, ti, &branch.combiner, RoleKind::ZPrime),
            (&branch.b, &branch.combiner, &terminal, RoleKind::B),
        ];
        for (id, tail, head, kind) in wires {
            edges.push(Edge::new(id.clone(), tail.clone(), head.clone(), 1));
            roles.insert(id.clone(), EdgeRole::branch(kind, i));
            if !matches!(kind, RoleKind::A | RoleKind::B) {
                jammable.push(id.clone());
            }
        }
        branches.push(branch);
    }

    let mut instance = NecInstance::new(
        NetworkGraph::new(nodes, edges),
        source.clone(),
        terminal.clone(),
        AdversaryClass::singletons(jammable),
    );
    instance.roles = Some(roles);
    Ok(Reduced {
        instance,
        wiring: BranchWiring {
            source,
            terminal,
            branches,
        },
        original: inst.clone(),
    })
}

/// Lift a zero-error unit-rate unicast code to the reduced instance: every
/// branch repeats `M_i` on `a_i, x_i, y_i, z_i`, the network runs the
/// unicast code with `z_i` standing in for source `i`'s message, `t_i`
/// forwards its decoder output on `z'_i`, and `B_i` takes the bitwise
/// majority of `x_i, y_i, z'_i`.
pub fn lift_code(ucode: &NetworkCode, reduced: &Reduced) -> Result<NetworkCode> {
    match check_unicast_zero_error(ucode, &reduced.original)? {
        UnicastVerdict::Ok => lift_code_unchecked(ucode, reduced),
        UnicastVerdict::Counterexample { messages, failing } => Err(Error::PremiseViolated(format!(
            "unicast code not zero-error: messages {messages:?} fail at {}",
            failing.join(", ")
        ))),
    }
}

/// [`lift_code`] without the zero-error premise check. Shapes are still checked.
pub fn lift_code_unchecked(ucode: &NetworkCode, reduced: &Reduced) -> Result<NetworkCode> {
    Compiled::new(ucode, (&reduced.original).into())?;
    let n = ucode.n;
    let k = reduced.wiring.k();
    let bits = k as u32 * n;
    let q = 1u64 << n;
    let mut code = NetworkCode::new(n, bits);
    let slot_of_source: BTreeMap<&str, usize> = reduced
        .wiring
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| (b.pair_source.as_str(), i))
        .collect();

    for e in reduced.original.graph.edges() {
        let f = &ucode.edge_functions[&e.id];
        let inputs = f
            .inputs
            .iter()
            .map(|input| match input {
                Input::Message(s) if slot_of_source.get(e.tail.as_str()) == Some(s) => {
                    Input::Edge(reduced.wiring.branches[*s].z.clone())
                }
                other => other.clone(),
            })
            .collect();
        code.edge_functions.insert(e.id.clone(), FunctionTable::new(inputs, f.table.clone()));
    }

    for (i, br) in reduced.wiring.branches.iter().enumerate() {
        let slot_table = (0..1u64 << bits).map(|m| (m >> (n as usize * i)) & (q - 1)).collect();
        code.edge_functions
            .insert(br.a.clone(), FunctionTable::new(vec![Input::Message(0)], slot_table));
        for id in [&br.x, &br.y, &br.z] {
            code.edge_functions
                .insert(id.clone(), FunctionTable::identity(Input::edge(&br.a), n));
        }
        let dec = ucode
            .decoders
            .get(&br.pair_terminal)
            .ok_or_else(|| Error::Mismatch(format!("no decoder for terminal `{}`", br.pair_terminal)))?;
        code.edge_functions.insert(br.z_prime.clone(), dec.clone());
        code.edge_functions.insert(
            br.b.clone(),
            FunctionTable::new(
                vec![Input::edge(&br.x), Input::edge(&br.y), Input::edge(&br.z_prime)],
                majority_table(n),
            ),
        );
    }

    // terminal: (b_1, ..., b_k) -> M with M_i = b_i
    let radices = vec![q; k];
    let table = (0..1u64 << bits)
        .map(|idx| {
            mixed_radix_digits(idx, &radices)
                .iter()
                .enumerate()
                .fold(0, |m, (i, &b)| m | b << (n as usize * i))
        })
        .collect();
    let inputs = reduced.wiring.branches.iter().map(|b| Input::edge(&b.b)).collect();
    code.decoders
        .insert(reduced.wiring.terminal.clone(), FunctionTable::new(inputs, table));
    Ok(code)
}

/// Per-branch value maps, each a permutation of `[0, 2^n)` stored as a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchChain {
    pub a_to_x: Vec<u64>,
    pub x_to_b: Vec<u64>,
    pub b_to_z_prime: Vec<u64>,
    pub a_to_z: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionChain {
    pub branches: Vec<BranchChain>,
}

impl BijectionChain {
    pub fn is_identity(&self) -> bool {
        let id = |t: &[u64]| t.iter().enumerate().all(|(i, &v)| i as u64 == v);
        self.branches
            .iter()
            .all(|b| id(&b.a_to_x) && id(&b.x_to_b) && id(&b.b_to_z_prime) && id(&b.a_to_z))
    }
}

pub(crate) fn invert(perm: &[u64]) -> Vec<u64> {
    let mut inv = vec![0; perm.len()];
    for (i, &v) in perm.iter().enumerate() {
        inv[v as usize] = i as u64;
    }
    inv
}

/// Zero-pattern signal values of every message on one branch.
#[derive(Debug, Clone)]
pub(crate) struct BranchSignals {
    pub a: Vec<u64>,
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub z: Vec<u64>,
    pub z_prime: Vec<u64>,
    pub b: Vec<u64>,
}

/// Simulate every message under the zero pattern and collect branch signals.
pub(crate) fn branch_signals(code: &NetworkCode, inst: &NecInstance, wiring: &BranchWiring) -> Result<Vec<BranchSignals>> {
    let c = Compiled::new(code, inst.into())?;
    crate::engine::guard_size(c.message_count(), 1)?;
    let g = &inst.graph;
    let rx = par::map_collect(0..c.message_count(), |m| c.received(m, &[]));
    let column = |id: &str| {
        let e = g.edge_index(id).expect("wiring edge");
        rx.iter().map(|r| r[e]).collect::<Vec<u64>>()
    };
    Ok(wiring
        .branches
        .iter()
        .map(|b| BranchSignals {
            a: column(&b.a),
            x: column(&b.x),
            y: column(&b.y),
            z: column(&b.z),
            z_prime: column(&b.z_prime),
            b: column(&b.b),
        })
        .collect())
}

/// Check that `to` is a permutation of `from` across all messages; return
/// the permutation table or the first violated relation.
fn relation(from: &[u64], to: &[u64], q: u64, branch: usize, from_name: &str, to_name: &str) -> Result<Vec<u64>> {
    let j = branch + 1;
    let mut fwd: Vec<Option<(u64, u64)>> = vec![None; q as usize];
    let mut back: Vec<Option<(u64, u64)>> = vec![None; q as usize];
    for (m, (&u, &v)) in from.iter().zip(to).enumerate() {
        let m = m as u64;
        match fwd[u as usize] {
            Some((w, m0)) if w != v => {
                return Err(Error::ChainViolated {
                    branch: j,
                    relation: format!("{to_name}_{j} not a function of {from_name}_{j}"),
                    m1: m0,
                    m2: m,
                })
            }
            Some(_) => {}
            None => fwd[u as usize] = Some((v, m)),
        }
        match back[v as usize] {
            Some((w, m0)) if w != u => {
                return Err(Error::ChainViolated {
                    branch: j,
                    relation: format!("{to_name}_{j} not injective in {from_name}_{j}"),
                    m1: m0,
                    m2: m,
                })
            }
            Some(_) => {}
            None => back[v as usize] = Some((u, m)),
        }
    }
    fwd.iter()
        .enumerate()
        .map(|(u, slot)| {
            slot.map(|(v, _)| v).ok_or_else(|| Error::ChainViolated {
                branch: j,
                relation: format!("{from_name}_{j} never takes value {u}"),
                m1: 0,
                m2: 0,
            })
        })
        .collect()
}

/// Verify the per-branch chain `z ↔ a ↔ x ↔ b ↔ z'` under the zero pattern.
pub fn bijection_chain(code: &NetworkCode, inst: &NecInstance) -> Result<BijectionChain> {
    let wiring = BranchWiring::from_instance(inst)?;
    let sig = branch_signals(code, inst, &wiring)?;
    let q = 1u64 << code.n;

    // the a-tuple must separate messages
    let mut seen: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for m in 0..1u64 << code.message_bits {
        let tuple: Vec<u64> = sig.iter().map(|s| s.a[m as usize]).collect();
        if let Some(&m0) = seen.get(&tuple) {
            return Err(Error::ChainViolated {
                branch: 0,
                relation: "a-tuple not injective in the message".into(),
                m1: m0,
                m2: m,
            });
        }
        seen.insert(tuple, m);
    }

    let mut branches = Vec::with_capacity(sig.len());
    for (i, s) in sig.iter().enumerate() {
        let a_to_x = relation(&s.a, &s.x, q, i, "a", "x")?;
        relation(&s.a, &s.y, q, i, "a", "y")?;
        let a_to_z = relation(&s.a, &s.z, q, i, "a", "z")?;
        let x_to_b = relation(&s.x, &s.b, q, i, "x", "b")?;
        let b_to_z_prime = relation(&s.b, &s.z_prime, q, i, "b", "z'")?;
        branches.push(BranchChain {
            a_to_x,
            x_to_b,
            b_to_z_prime,
            a_to_z,
        });
    }
    Ok(BijectionChain { branches })
}

/// Rewrite `z_i := a_i` on every branch, folding the old `z_i` map into the
/// encoders at `s_i`. The terminal sees the same zero-pattern signals, and
/// the set of values an error on `z_i` can produce at `s_i` only shrinks.
pub fn normalize_z(code: &NetworkCode, inst: &NecInstance) -> Result<NetworkCode> {
    let wiring = BranchWiring::from_instance(inst)?;
    Compiled::new(code, inst.into())?;
    let g = &inst.graph;
    let n = code.n;
    let q = 1u64 << n;
    let mut out = code.clone();
    for br in &wiring.branches {
        let old = &code.edge_functions[&br.z];
        // inputs of z_i can only be a_i (the sole in-edge of u_i)
        let sigma: Vec<u64> = (0..q)
            .map(|a| {
                let digits = vec![a; old.inputs.len()];
                let idx = mixed_radix_index(&digits, &vec![q; old.inputs.len()]);
                old.table[idx as usize]
            })
            .collect();
        out.edge_functions
            .insert(br.z.clone(), FunctionTable::identity(Input::edge(&br.a), n));
        let s_i = g.node_index(&br.pair_source).expect("wiring");
        for e in g.out_edges(s_i) {
            let id = &g.edge(e).id;
            let f = &code.edge_functions[id];
            let radices: Vec<u64> = f
                .inputs
                .iter()
                .map(|input| match input {
                    Input::Edge(x) => 1u64 << (g.edge(g.edge_index(x).expect("compiled")).capacity * n),
                    Input::Message(_) => unreachable!("reduced instances have one message slot at the source"),
                })
                .collect();
            let table = (0..f.table.len() as u64)
                .map(|idx| {
                    let mut digits = mixed_radix_digits(idx, &radices);
                    for (d, input) in digits.iter_mut().zip(&f.inputs) {
                        if *input == Input::Edge(br.z.clone()) {
                            *d = sigma[*d as usize];
                        }
                    }
                    f.table[mixed_radix_index(&digits, &radices) as usize]
                })
                .collect();
            out.edge_functions
                .insert(id.clone(), FunctionTable::new(f.inputs.clone(), table));
        }
    }
    Ok(out)
}

/// Unicast instance, code and chain recovered from a zero-error rate-k code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub instance: UnicastInstance,
    pub code: NetworkCode,
    pub chain: BijectionChain,
}

/// Turn a zero-error rate-k code on a reduced instance into a zero-error
/// unit-rate code on the embedded unicast instance.
pub fn extract_code(ncode: &NetworkCode, inst: &NecInstance) -> Result<Extraction> {
    let reduced = Reduced::from_instance(inst)?;
    let k = reduced.wiring.k() as u32;
    let n = ncode.n;
    if ncode.message_bits != k * n {
        return Err(Error::PremiseViolated(format!(
            "code rate is {} bits per block, need k·n = {}",
            ncode.message_bits,
            k * n
        )));
    }
    if let ZeroErrorVerdict::Counterexample { message, pattern, decoded } = check_zero_error(ncode, inst)? {
        return Err(Error::PremiseViolated(format!(
            "code is not zero-error: message {message} decodes to {decoded} under {:?}",
            pattern.values
        )));
    }

    let mut code = ncode.clone();
    let chain = match bijection_chain(&code, inst) {
        Err(Error::ChainViolated { relation, .. }) if relation.starts_with('z') && relation.contains("injective") => {
            code = normalize_z(&code, inst)?;
            if !check_zero_error(&code, inst)?.is_ok() {
                return Err(Error::PremiseViolated("normalized code lost zero-error decodability".into()));
            }
            bijection_chain(&code, inst)?
        }
        other => other?,
    };

    let g = &inst.graph;
    let mut ucode = NetworkCode::new(n, k * n);
    let z_slot: BTreeMap<&str, usize> = reduced
        .wiring
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| (b.z.as_str(), i))
        .collect();
    for e in reduced.original.graph.edges() {
        let f = &code.edge_functions[&e.id];
        let radices: Vec<u64> = f
            .inputs
            .iter()
            .map(|input| match input {
                Input::Edge(x) => 1u64 << (g.edge(g.edge_index(x).expect("compiled")).capacity * n),
                Input::Message(_) => unreachable!("only the source reads the message"),
            })
            .collect();
        let inputs: Vec<Input> = f
            .inputs
            .iter()
            .map(|input| match input {
                Input::Edge(x) => match z_slot.get(x.as_str()) {
                    Some(&i) => Input::Message(i),
                    None => input.clone(),
                },
                other => other.clone(),
            })
            .collect();
        // message m_i stands for a_i = m_i, so the source sends a_to_z[m_i]
        let table = (0..f.table.len() as u64)
            .map(|idx| {
                let mut digits = mixed_radix_digits(idx, &radices);
                for (d, input) in digits.iter_mut().zip(&inputs) {
                    if let Input::Message(i) = input {
                        *d = chain.branches[*i].a_to_z[*d as usize];
                    }
                }
                f.table[mixed_radix_index(&digits, &radices) as usize]
            })
            .collect();
        ucode.edge_functions.insert(e.id.clone(), FunctionTable::new(inputs, table));
    }
    for (br, ch) in reduced.wiring.branches.iter().zip(&chain.branches) {
        let zf = &code.edge_functions[&br.z_prime];
        let z_to_b = invert(&ch.b_to_z_prime);
        let b_to_x = invert(&ch.x_to_b);
        let x_to_a = invert(&ch.a_to_x);
        let table = zf
            .table
            .iter()
            .map(|&zp| x_to_a[b_to_x[z_to_b[zp as usize] as usize] as usize])
            .collect();
        ucode
            .decoders
            .insert(br.pair_terminal.clone(), FunctionTable::new(zf.inputs.clone(), table));
    }
    Ok(Extraction {
        instance: reduced.original,
        code: ucode,
        chain,
    })
}
