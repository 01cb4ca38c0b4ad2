//! Evaluation of network codes with adversarial error injection, and the
//! exhaustive zero-error checks built on it.
//!
//! Received values are `transmitted XOR r_e`. Encoders read received values
//! of their input edges, so an error propagates through honest downstream
//! encoders.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::adversary::{ErrorPattern, PatternSpace};
use crate::code::{Input, NetworkCode};
use crate::error::{Error, Result};
use crate::graph::{NecInstance, NetworkGraph, UnicastInstance};
use crate::par;

/// Upper bound on (message × pattern) evaluations for any exhaustive pass.
pub const MAX_EVALUATIONS: u128 = 1 << 40;
/// Edge alphabets are capped at this many bits.
pub const MAX_EDGE_BITS: u32 = 32;
/// Message spaces are capped at this many bits.
pub const MAX_MESSAGE_BITS: u32 = 40;
/// Table length cap.
pub const MAX_TABLE_LEN: u64 = 1 << 26;

#[derive(Debug, Clone, Copy)]
pub enum ProblemRef<'a> {
    Unicast(&'a UnicastInstance),
    Nec(&'a NecInstance),
}

impl<'a> From<&'a UnicastInstance> for ProblemRef<'a> {
    fn from(i: &'a UnicastInstance) -> Self {
        ProblemRef::Unicast(i)
    }
}

impl<'a> From<&'a NecInstance> for ProblemRef<'a> {
    fn from(i: &'a NecInstance) -> Self {
        ProblemRef::Nec(i)
    }
}

impl<'a> ProblemRef<'a> {
    pub fn graph(&self) -> &'a NetworkGraph {
        match self {
            ProblemRef::Unicast(i) => &i.graph,
            ProblemRef::Nec(i) => &i.graph,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            ProblemRef::Unicast(i) => i.validate().into_result(),
            ProblemRef::Nec(i) => i.validate().into_result(),
        }
    }

    /// Message slots and decoding demands for a code with the given shape.
    pub(crate) fn layout(&self, n: u32, message_bits: u32) -> Result<Layout> {
        let g = self.graph();
        let node = |v: &str| g.node_index(v).expect("validated");
        match self {
            ProblemRef::Unicast(inst) => {
                let k = inst.k() as u32;
                if message_bits != k * n {
                    return Err(Error::Mismatch(format!(
                        "unicast code must carry {} message bits (k·n), found {message_bits}",
                        k * n
                    )));
                }
                let slots = inst
                    .pairs
                    .iter()
                    .enumerate()
                    .map(|(i, (s, _))| Slot {
                        owner: node(s),
                        offset: i as u32 * n,
                        bits: n,
                    })
                    .collect();
                let demands = inst
                    .pairs
                    .iter()
                    .enumerate()
                    .map(|(i, (_, t))| Demand { terminal: node(t), slot: i })
                    .collect();
                Ok(Layout { slots, demands })
            }
            ProblemRef::Nec(inst) => Ok(Layout {
                slots: vec![Slot {
                    owner: node(&inst.source),
                    offset: 0,
                    bits: message_bits,
                }],
                demands: vec![Demand {
                    terminal: node(&inst.terminal),
                    slot: 0,
                }],
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Slot {
    pub owner: usize,
    pub offset: u32,
    pub bits: u32,
}

impl Slot {
    pub fn value(&self, message: u64) -> u64 {
        (message >> self.offset) & mask(self.bits)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Demand {
    pub terminal: usize,
    pub slot: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub slots: Vec<Slot>,
    pub demands: Vec<Demand>,
}

pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Src {
    Edge(usize),
    Slot(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledFn {
    pub inputs: Vec<Src>,
    pub radices: Vec<u64>,
    pub table: Vec<u64>,
}

impl CompiledFn {
    #[inline]
    fn eval(&self, rx: &[u64], message: u64, slots: &[Slot]) -> u64 {
        let mut idx = 0u64;
        for (src, &r) in self.inputs.iter().zip(&self.radices) {
            let v = match *src {
                Src::Edge(e) => rx[e],
                Src::Slot(s) => slots[s].value(message),
            };
            idx = idx * r + v;
        }
        self.table[idx as usize]
    }
}

/// A code checked against an instance and resolved to indices.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub message_bits: u32,
    pub order: Vec<usize>,
    pub widths: Vec<u32>,
    pub fns: Vec<CompiledFn>,
    pub layout: Layout,
    pub decoders: Vec<CompiledFn>,
}

impl Compiled {
    pub fn new(code: &NetworkCode, problem: ProblemRef<'_>) -> Result<Self> {
        problem.validate()?;
        let g = problem.graph();
        let n = code.n;
        if n == 0 {
            return Err(Error::Mismatch("block length must be positive".into()));
        }
        if code.message_bits == 0 || code.message_bits > MAX_MESSAGE_BITS {
            return Err(Error::Mismatch(format!(
                "message_bits must be in 1..={MAX_MESSAGE_BITS}, found {}",
                code.message_bits
            )));
        }
        let layout = problem.layout(n, code.message_bits)?;
        let widths: Vec<u32> = g
            .edges()
            .iter()
            .map(|e| {
                e.capacity
                    .checked_mul(n)
                    .filter(|&w| w <= MAX_EDGE_BITS)
                    .ok_or_else(|| Error::Mismatch(format!("edge `{}` alphabet exceeds 2^{MAX_EDGE_BITS}", e.id)))
            })
            .collect::<Result<_>>()?;

        for id in code.edge_functions.keys() {
            if g.edge_index(id).is_none() {
                return Err(Error::Mismatch(format!("function for unknown edge `{id}`")));
            }
        }
        let resolve = |node: usize, inputs: &[Input], what: &str| -> Result<(Vec<Src>, Vec<u64>)> {
            let in_edges = g.in_edges(node);
            let mut srcs = Vec::with_capacity(inputs.len());
            let mut radices = Vec::with_capacity(inputs.len());
            for input in inputs {
                match input {
                    Input::Edge(id) => {
                        let e = g
                            .edge_index(id)
                            .filter(|e| in_edges.contains(e))
                            .ok_or_else(|| {
                                Error::Mismatch(format!("{what} reads `{id}`, which is not an incoming edge of `{}`", g.nodes()[node]))
                            })?;
                        srcs.push(Src::Edge(e));
                        radices.push(1u64 << widths[e]);
                    }
                    Input::Message(s) => {
                        let slot = layout
                            .slots
                            .get(*s)
                            .filter(|slot| slot.owner == node)
                            .ok_or_else(|| Error::Mismatch(format!("{what} reads msg:{s}, which `{}` does not own", g.nodes()[node])))?;
                        srcs.push(Src::Slot(*s));
                        radices.push(1u64 << slot.bits);
                    }
                }
            }
            Ok((srcs, radices))
        };
        let check_table = |radices: &[u64], table: &[u64], codomain_bits: u32, what: &str| -> Result<()> {
            let want = radices
                .iter()
                .try_fold(1u64, |acc, &r| acc.checked_mul(r).filter(|&p| p <= MAX_TABLE_LEN))
                .ok_or_else(|| Error::Mismatch(format!("{what}: table too large")))?;
            if table.len() as u64 != want {
                return Err(Error::Mismatch(format!(
                    "{what}: table length mismatch (expected {want}, found {})",
                    table.len()
                )));
            }
            let cap = mask(codomain_bits);
            if let Some(v) = table.iter().find(|&&v| v > cap) {
                return Err(Error::Mismatch(format!("{what}: output {v} outside codomain")));
            }
            Ok(())
        };

        let mut fns = Vec::with_capacity(g.edge_count());
        for (e, edge) in g.edges().iter().enumerate() {
            let f = code
                .edge_functions
                .get(&edge.id)
                .ok_or_else(|| Error::Mismatch(format!("no function for edge `{}`", edge.id)))?;
            let what = format!("edge `{}`", edge.id);
            let (inputs, radices) = resolve(g.tail(e), &f.inputs, &what)?;
            check_table(&radices, &f.table, widths[e], &what)?;
            fns.push(CompiledFn {
                inputs,
                radices,
                table: f.table.clone(),
            });
        }

        let mut decoders = Vec::with_capacity(layout.demands.len());
        for d in &layout.demands {
            let name = &g.nodes()[d.terminal];
            let f = code
                .decoders
                .get(name)
                .ok_or_else(|| Error::Mismatch(format!("no decoder for terminal `{name}`")))?;
            if f.inputs.iter().any(|i| matches!(i, Input::Message(_))) {
                return Err(Error::Mismatch(format!("decoder `{name}` reads a message slot")));
            }
            let what = format!("decoder `{name}`");
            let (inputs, radices) = resolve(d.terminal, &f.inputs, &what)?;
            check_table(&radices, &f.table, layout.slots[d.slot].bits, &what)?;
            decoders.push(CompiledFn {
                inputs,
                radices,
                table: f.table.clone(),
            });
        }
        for name in code.decoders.keys() {
            let known = layout.demands.iter().any(|d| &g.nodes()[d.terminal] == name);
            if !known {
                return Err(Error::Mismatch(format!("decoder at `{name}`, which is not a terminal")));
            }
        }

        Ok(Compiled {
            message_bits: code.message_bits,
            order: g.topo_edge_order().expect("validated"),
            widths,
            fns,
            layout,
            decoders,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.fns.len()
    }

    pub fn message_count(&self) -> u64 {
        1u64 << self.message_bits
    }

    /// Evaluate every edge. `pattern` holds sorted `(edge, error)` pairs and
    /// `overrides` replaces the transmitted value on the listed edges.
    pub fn run(&self, message: u64, pattern: &[(usize, u64)], overrides: &[(usize, u64)], tx: &mut [u64], rx: &mut [u64]) {
        for &e in &self.order {
            let sent = match overrides.iter().find(|(o, _)| *o == e) {
                Some(&(_, v)) => v,
                None => self.fns[e].eval(rx, message, &self.layout.slots),
            };
            tx[e] = sent;
            let err = pattern.iter().find(|(p, _)| *p == e).map_or(0, |&(_, r)| r);
            rx[e] = sent ^ err;
        }
    }

    pub fn decode(&self, rx: &[u64]) -> Vec<u64> {
        self.decoders
            .iter()
            .map(|d| d.eval(rx, 0, &self.layout.slots))
            .collect()
    }

    /// Received values for `message` under `pattern`.
    pub fn received(&self, message: u64, pattern: &[(usize, u64)]) -> Vec<u64> {
        let mut tx = vec![0; self.edge_count()];
        let mut rx = vec![0; self.edge_count()];
        self.run(message, pattern, &[], &mut tx, &mut rx);
        rx
    }

    /// Decoded value of the single NEC terminal.
    pub fn decode_nec(&self, message: u64, pattern: &[(usize, u64)], tx: &mut [u64], rx: &mut [u64]) -> u64 {
        self.run(message, pattern, &[], tx, rx);
        self.decoders[0].eval(rx, 0, &self.layout.slots)
    }

    /// First pattern (in canonical order) that breaks `message`, with the
    /// wrong decoded value.
    pub fn first_failure(&self, message: u64, space: &PatternSpace) -> Option<(u64, u64)> {
        let mut tx = vec![0; self.edge_count()];
        let mut rx = vec![0; self.edge_count()];
        (0..space.len()).find_map(|i| {
            let p = space.get(i);
            let got = self.decode_nec(message, &p, &mut tx, &mut rx);
            (got != message).then_some((i, got))
        })
    }
}

pub(crate) fn guard_size(messages: u64, patterns: u64) -> Result<()> {
    let size = messages as u128 * patterns as u128;
    if size > MAX_EVALUATIONS {
        return Err(Error::TooLarge {
            size: size.to_string(),
            limit: MAX_EVALUATIONS.to_string(),
        });
    }
    Ok(())
}

/// Transmitted and received signals plus decoder outputs for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalTrace {
    pub transmitted: BTreeMap<String, u64>,
    pub received: BTreeMap<String, u64>,
    pub decoded: BTreeMap<String, u64>,
}

/// Evaluate `code` on one message under one error pattern. For unicast
/// instances `message` packs the per-pair messages, pair 0 in the low bits.
pub fn evaluate<'a>(code: &NetworkCode, problem: impl Into<ProblemRef<'a>>, message: u64, err: &ErrorPattern) -> Result<EvalTrace> {
    let problem = problem.into();
    let c = Compiled::new(code, problem)?;
    let g = problem.graph();
    if message >= c.message_count() {
        return Err(Error::Mismatch(format!("message {message} out of range")));
    }
    let pattern = err.to_indexed(g, code.n)?;
    let mut tx = vec![0; c.edge_count()];
    let mut rx = vec![0; c.edge_count()];
    c.run(message, &pattern, &[], &mut tx, &mut rx);
    let named = |vals: &[u64]| {
        g.edges()
            .iter()
            .zip(vals)
            .map(|(e, &v)| (e.id.clone(), v))
            .collect()
    };
    let decoded = c
        .layout
        .demands
        .iter()
        .zip(c.decode(&rx))
        .map(|(d, v)| (g.nodes()[d.terminal].clone(), v))
        .collect();
    Ok(EvalTrace {
        transmitted: named(&tx),
        received: named(&rx),
        decoded,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroErrorVerdict {
    Ok,
    Counterexample {
        message: u64,
        pattern: ErrorPattern,
        decoded: u64,
    },
}

impl ZeroErrorVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, ZeroErrorVerdict::Ok)
    }
}

/// Exhaustive check that every message decodes correctly under every
/// admissible error pattern. The counterexample, if any, is the first in
/// (message ascending, pattern canonical) order.
pub fn check_zero_error(code: &NetworkCode, inst: &NecInstance) -> Result<ZeroErrorVerdict> {
    let c = Compiled::new(code, inst.into())?;
    let space = PatternSpace::new(inst, code.n)?;
    guard_size(c.message_count(), space.len())?;
    let found = par::find_map_first(0..c.message_count(), |m| {
        c.first_failure(m, &space).map(|(i, got)| (m, i, got))
    });
    Ok(match found {
        None => ZeroErrorVerdict::Ok,
        Some((message, i, decoded)) => ZeroErrorVerdict::Counterexample {
            message,
            pattern: ErrorPattern::from_indexed(&inst.graph, &space.get(i)),
            decoded,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnicastVerdict {
    Ok,
    /// `messages[i]` is pair `i`'s message; `failing` lists unsatisfied terminals.
    Counterexample { messages: Vec<u64>, failing: Vec<String> },
}

impl UnicastVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, UnicastVerdict::Ok)
    }
}

/// Exhaustive error-free check that every terminal recovers its paired
/// source's message for every message tuple.
pub fn check_unicast_zero_error(code: &NetworkCode, inst: &UnicastInstance) -> Result<UnicastVerdict> {
    let c = Compiled::new(code, inst.into())?;
    guard_size(c.message_count(), 1)?;
    let found = par::find_map_first(0..c.message_count(), |m| {
        let rx = c.received(m, &[]);
        let failing: Vec<String> = c
            .layout
            .demands
            .iter()
            .zip(c.decode(&rx))
            .filter(|(d, got)| *got != c.layout.slots[d.slot].value(m))
            .map(|(d, _)| inst.graph.nodes()[d.terminal].clone())
            .collect();
        (!failing.is_empty()).then_some((m, failing))
    });
    Ok(match found {
        None => UnicastVerdict::Ok,
        Some((m, failing)) => UnicastVerdict::Counterexample {
            messages: c.layout.slots.iter().map(|s| s.value(m)).collect(),
            failing,
        },
    })
}

/// Exact fraction of messages that some admissible pattern breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ErrorRate {
    pub bad: u64,
    pub total: u64,
}

impl ErrorRate {
    pub fn value(&self) -> f64 {
        self.bad as f64 / self.total as f64
    }

    pub fn is_zero(&self) -> bool {
        self.bad == 0
    }
}

/// Per-message worst-case decodability: entry `m` is true iff every
/// admissible pattern decodes `m` correctly.
pub fn good_messages(code: &NetworkCode, inst: &NecInstance) -> Result<Vec<bool>> {
    let c = Compiled::new(code, inst.into())?;
    let space = PatternSpace::new(inst, code.n)?;
    guard_size(c.message_count(), space.len())?;
    Ok(par::map_collect(0..c.message_count(), |m| c.first_failure(m, &space).is_none()))
}

pub fn empirical_error_prob(code: &NetworkCode, inst: &NecInstance) -> Result<ErrorRate> {
    let good = good_messages(code, inst)?;
    Ok(ErrorRate {
        bad: good.iter().filter(|&&g| !g).count() as u64,
        total: good.len() as u64,
    })
}
