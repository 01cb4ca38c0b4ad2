//! Brute-force zero-error feasibility search over the full code space of a
//! small instance.
//!
//! Codes are ordered by their encoder tables: nodes in a fixed topological
//! order (among ready nodes, smallest total table size first), each node's out-edges in declaration order, each table entry by entry
//! with entry 0 most significant. The search walks that order depth-first,
//! assigning one table entry at a time, and discards a prefix as soon as two
//! scenarios (message, admissible error pattern) that demand different
//! outputs at some terminal become indistinguishable at that terminal's
//! frontier: the received values on the edges crossing from the assigned
//! part into the terminal's ancestors, plus any message slots still owned by
//! unassigned ancestors. Only scenarios whose errors sit on assigned edges
//! take part, so the pruning never removes a completable prefix.
//!
//! Decoders are not enumerated. A complete encoder assignment survives the
//! final check exactly when every terminal observation determines its
//! demand, and the decoder is read off from the observations.
//!
//! Two reductions keep the walk small without changing verdicts:
//! table entries at input tuples no scenario can produce are fixed to 0,
//! and so are the tables of edges that cannot reach a terminal. With
//! `symmetry` enabled (the default) each edge table must also list its
//! values in first-occurrence order over the producible entries; every
//! zero-error code becomes such a code after relabeling edge alphabets in
//! topological order, since an error pattern can set a jammed edge to any
//! value under either labeling.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::adversary::PatternSpace;
use crate::code::{FunctionTable, Input, NetworkCode};
use crate::engine::{check_unicast_zero_error, check_zero_error, guard_size, Layout, ProblemRef};
use crate::error::{Error, Result};
use crate::graph::{NecInstance, NetworkGraph, UnicastInstance};
use crate::par;

pub const DEFAULT_MAX_CODES: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    /// Cap on table-entry assignments tried.
    pub max_codes: u64,
    /// Wall-clock cap.
    pub max_seconds: f64,
    /// Restrict to first-occurrence-ordered edge tables.
    pub symmetry: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_codes: DEFAULT_MAX_CODES,
            max_seconds: 600.0,
            symmetry: true,
        }
    }
}

impl SearchBudget {
    pub fn with_max_codes(mut self, max_codes: u64) -> Self {
        self.max_codes = max_codes;
        self
    }

    pub fn with_symmetry(mut self, symmetry: bool) -> Self {
        self.symmetry = symmetry;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Feasible { witness: NetworkCode },
    /// No zero-error code exists at this block length.
    Infeasible { n: u32 },
    /// The budget ran out before the space was settled.
    Exhausted {
        #[serde(serialize_with = "ser_big")]
        space: BigUint,
    },
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Verdict::Infeasible { .. })
    }

    pub fn witness(&self) -> Option<&NetworkCode> {
        match self {
            Verdict::Feasible { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Verdict::Feasible { .. } => "feasible".into(),
            Verdict::Infeasible { n } => format!("infeasible at n={n}"),
            Verdict::Exhausted { space } => format!("budget exhausted (code space {space})"),
        }
    }
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_big")]
    pub code_space: BigUint,
    /// Table-entry assignments tried.
    pub candidates: u64,
    pub seconds: f64,
    /// True when a supplied witness was verified instead of searching.
    pub from_hint: bool,
}

/// Number of encoder assignments: the product over edges of
/// `alphabet^(input-space size)`, where an edge reads its tail's message
/// slots and all in-edges of its tail.
pub fn count_code_space<'a>(problem: impl Into<ProblemRef<'a>>, n: u32, message_bits: u32) -> Result<BigUint> {
    let problem = problem.into();
    problem.validate()?;
    let layout = problem.layout(n, message_bits)?;
    let g = problem.graph();
    let mut total = BigUint::one();
    for e in 0..g.edge_count() {
        let v = g.tail(e);
        let mut input_bits: u64 = layout
            .slots
            .iter()
            .filter(|s| s.owner == v)
            .map(|s| s.bits as u64)
            .sum();
        input_bits += g.in_edges(v).iter().map(|&f| (g.edge(f).capacity * n) as u64).sum::<u64>();
        let out_bits = g.edge(e).capacity as u64 * n as u64;
        // alphabet^(2^input_bits) = 2^(out_bits · 2^input_bits)
        let exp = BigUint::from(out_bits) << input_bits;
        let exp: u64 = exp
            .try_into()
            .map_err(|_| Error::TooLarge {
                size: format!("2^(2^{input_bits}·{out_bits})"),
                limit: "2^(2^64)".into(),
            })?;
        if exp > 1 << 32 {
            return Err(Error::TooLarge {
                size: format!("2^{exp} codes for edge `{}`", g.edge(e).id),
                limit: "2^(2^32)".into(),
            });
        }
        total <<= exp;
    }
    Ok(total)
}

/// Exhaustive zero-error search for a multiple-unicast instance at block
/// length `n` (each source carries `n` bits).
pub fn search_unicast(inst: &UnicastInstance, n: u32, budget: SearchBudget) -> Result<SearchReport> {
    let problem = ProblemRef::Unicast(inst);
    let message_bits = inst.k() as u32 * n;
    let space = count_code_space(problem, n, message_bits)?;
    let searcher = Searcher::new(problem, n, message_bits, &[], budget)?;
    let start = Instant::now();
    let (verdict, candidates) = searcher.run(start);
    let verdict = match verdict {
        Some(Ok(code)) => {
            let ok = check_unicast_zero_error(&code, inst)?.is_ok();
            assert!(ok, "search produced a code that fails the unicast check");
            Verdict::Feasible { witness: code }
        }
        Some(Err(())) => Verdict::Exhausted { space: space.clone() },
        None => Verdict::Infeasible { n },
    };
    Ok(SearchReport {
        verdict,
        code_space: space,
        candidates,
        seconds: start.elapsed().as_secs_f64(),
        from_hint: false,
    })
}

/// Exhaustive zero-error search for an NEC instance carrying
/// `rate_bits · n` message bits at block length `n`. A `hint` that passes
/// the zero-error check is returned as the witness without searching.
pub fn search_nec(
    inst: &NecInstance,
    rate_bits: u32,
    n: u32,
    budget: SearchBudget,
    hint: Option<&NetworkCode>,
) -> Result<SearchReport> {
    let problem = ProblemRef::Nec(inst);
    let message_bits = rate_bits * n;
    let space = count_code_space(problem, n, message_bits)?;
    let start = Instant::now();
    if let Some(code) = hint {
        if code.n == n && code.message_bits == message_bits && check_zero_error(code, inst)?.is_ok() {
            return Ok(SearchReport {
                verdict: Verdict::Feasible { witness: code.clone() },
                code_space: space,
                candidates: 0,
                seconds: start.elapsed().as_secs_f64(),
                from_hint: true,
            });
        }
    }
    let pspace = PatternSpace::new(inst, n)?;
    guard_size(1 << message_bits.min(63), pspace.len())?;
    let patterns: Vec<Vec<(usize, u64)>> = pspace.iter().collect();
    let searcher = Searcher::new(problem, n, message_bits, &patterns, budget)?;
    let (verdict, candidates) = searcher.run(start);
    let verdict = match verdict {
        Some(Ok(code)) => {
            let ok = check_zero_error(&code, inst)?.is_ok();
            assert!(ok, "search produced a code that fails the zero-error check");
            Verdict::Feasible { witness: code }
        }
        Some(Err(())) => Verdict::Exhausted { space: space.clone() },
        None => Verdict::Infeasible { n },
    };
    Ok(SearchReport {
        verdict,
        code_space: space,
        candidates,
        seconds: start.elapsed().as_secs_f64(),
        from_hint: false,
    })
}

const UNSET: u64 = u64::MAX;
/// Scenario cap for one search.
const MAX_SCENARIOS: usize = 1 << 16;
/// Frontier size to aim for before handing prefixes to workers.
const SPLIT_TARGET: usize = 64;
/// Cap on prefixes collected while splitting.
const MAX_FRONTIER: usize = 4096;

#[derive(Debug, Clone, Copy)]
enum Src {
    Edge(usize),
    Slot(usize),
}

struct Scenario {
    message: u64,
    /// Sorted `(edge, error)` pairs.
    pattern: Vec<(usize, u64)>,
}

/// What a terminal can see once nodes `order[..=p]` are assigned.
struct KeySpec {
    edges: Vec<usize>,
    slots: Vec<usize>,
}

struct Searcher<'a> {
    g: &'a NetworkGraph,
    n: u32,
    message_bits: u32,
    layout: Layout,
    widths: Vec<u32>,
    order: Vec<usize>,
    inputs: Vec<Vec<Src>>,
    radices: Vec<Vec<u64>>,
    table_len: Vec<usize>,
    dead: Vec<bool>,
    scenarios: Vec<Scenario>,
    /// `visible[p + 1]`: scenarios whose errors all sit on edges out of
    /// `order[..=p]`; scenarios are sorted so these form a prefix.
    visible: Vec<usize>,
    /// `keys[p + 1][d]` for demand `d`.
    keys: Vec<Vec<KeySpec>>,
    symmetry: bool,
    max_codes: u64,
    deadline: Duration,
}

#[derive(Clone)]
struct State {
    tables: Vec<Vec<u64>>,
    /// Received value per scenario and edge.
    rx: Vec<Vec<u64>>,
    /// Table index per scenario and edge.
    idx: Vec<Vec<usize>>,
    /// Next node position to assign.
    pos: usize,
}

enum Flow {
    Continue,
    Found(State),
    Abort,
}

struct Ctx<'c> {
    counter: &'c AtomicU64,
    stop: &'c AtomicBool,
    start: Instant,
    local: u64,
    /// Stop at this node position and collect the state instead.
    split_at: Option<usize>,
    collected: Vec<State>,
    overflow: bool,
}

impl Ctx<'_> {
    fn tick(&mut self, s: &Searcher) -> bool {
        self.local += 1;
        if self.local >= 1024 {
            let total = self.counter.fetch_add(self.local, Ordering::Relaxed) + self.local;
            self.local = 0;
            if total > s.max_codes || self.start.elapsed() > s.deadline {
                self.stop.store(true, Ordering::Relaxed);
            }
        }
        !self.stop.load(Ordering::Relaxed)
    }

    fn flush(&mut self) {
        self.counter.fetch_add(self.local, Ordering::Relaxed);
        self.local = 0;
    }
}

/// Topological order that takes, among ready nodes, the one whose
/// out-edge tables hold the fewest bits (ties by declaration index), so that
/// cheap, constraining nodes are decided first.
fn search_order(g: &NetworkGraph, table_len: &[usize], widths: &[u32]) -> Vec<usize> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let weight = |v: usize| -> u64 {
        g.out_edges(v)
            .iter()
            .map(|&e| table_len[e] as u64 * widths[e] as u64)
            .sum()
    };
    let mut indeg: Vec<usize> = (0..g.node_count()).map(|v| g.in_edges(v).len()).collect();
    let mut ready: BinaryHeap<Reverse<(u64, usize)>> = (0..g.node_count())
        .filter(|&v| indeg[v] == 0)
        .map(|v| Reverse((weight(v), v)))
        .collect();
    let mut order = Vec::with_capacity(g.node_count());
    while let Some(Reverse((_, v))) = ready.pop() {
        order.push(v);
        for e in g.out_edges(v) {
            let h = g.head(e);
            indeg[h] -= 1;
            if indeg[h] == 0 {
                ready.push(Reverse((weight(h), h)));
            }
        }
    }
    order
}

impl<'a> Searcher<'a> {
    fn new(problem: ProblemRef<'a>, n: u32, message_bits: u32, patterns: &[Vec<(usize, u64)>], budget: SearchBudget) -> Result<Self> {
        problem.validate()?;
        if n == 0 || message_bits == 0 || message_bits > 20 {
            return Err(Error::TooLarge {
                size: format!("{message_bits} message bits"),
                limit: "1..=20 message bits and n >= 1".into(),
            });
        }
        let g = problem.graph();
        let layout = problem.layout(n, message_bits)?;
        let widths: Vec<u32> = g.edges().iter().map(|e| e.capacity * n).collect();
        if let Some(w) = widths.iter().find(|&&w| w > 16) {
            return Err(Error::TooLarge {
                size: format!("{w}-bit edge alphabet"),
                limit: "16 bits".into(),
            });
        }
        let mut inputs = Vec::with_capacity(g.edge_count());
        let mut radices = Vec::with_capacity(g.edge_count());
        let mut table_len = Vec::with_capacity(g.edge_count());
        for e in 0..g.edge_count() {
            let v = g.tail(e);
            let mut ins = Vec::new();
            let mut rs = Vec::new();
            for (s, slot) in layout.slots.iter().enumerate() {
                if slot.owner == v {
                    ins.push(Src::Slot(s));
                    rs.push(1u64 << slot.bits);
                }
            }
            for f in g.in_edges(v) {
                ins.push(Src::Edge(f));
                rs.push(1u64 << widths[f]);
            }
            let len = rs
                .iter()
                .try_fold(1u64, |a, &r| a.checked_mul(r).filter(|&x| x <= 1 << 20))
                .ok_or_else(|| Error::TooLarge {
                    size: format!("table of edge `{}`", g.edge(e).id),
                    limit: "2^20 entries".into(),
                })?;
            inputs.push(ins);
            radices.push(rs);
            table_len.push(len as usize);
        }

        let order = search_order(g, &table_len, &widths);
        let mut node_pos = vec![0; g.node_count()];
        for (p, &v) in order.iter().enumerate() {
            node_pos[v] = p;
        }

        // ancestors-or-self of each terminal
        let terminals: Vec<usize> = layout.demands.iter().map(|d| d.terminal).collect();
        let reach: Vec<Vec<bool>> = terminals
            .iter()
            .map(|&t| {
                let anc = g.ancestors(t);
                (0..g.node_count()).map(|v| v == t || anc.contains(&v)).collect()
            })
            .collect();
        let dead: Vec<bool> = (0..g.edge_count())
            .map(|e| !reach.iter().any(|r| r[g.head(e)]))
            .collect();

        let messages = 1u64 << message_bits;
        let pats: Vec<Vec<(usize, u64)>> = if patterns.is_empty() { vec![Vec::new()] } else { patterns.to_vec() };
        if messages as usize * pats.len() > MAX_SCENARIOS {
            return Err(Error::TooLarge {
                size: format!("{} scenarios", messages as usize * pats.len()),
                limit: MAX_SCENARIOS.to_string(),
            });
        }
        let level = |p: &Vec<(usize, u64)>| p.iter().map(|&(e, _)| node_pos[g.tail(e)] + 1).max().unwrap_or(0);
        let mut scenarios: Vec<(usize, Scenario)> = Vec::new();
        for pat in &pats {
            for m in 0..messages {
                scenarios.push((
                    level(pat),
                    Scenario {
                        message: m,
                        pattern: pat.clone(),
                    },
                ));
            }
        }
        scenarios.sort_by_key(|(l, _)| *l);
        let visible = (0..=order.len())
            .map(|q| scenarios.partition_point(|(l, _)| *l <= q))
            .collect();
        let scenarios = scenarios.into_iter().map(|(_, s)| s).collect();

        let keys = (0..=order.len())
            .map(|q| {
                // nodes order[..q] are assigned
                let assigned = |v: usize| node_pos[v] < q;
                terminals
                    .iter()
                    .zip(&reach)
                    .map(|(&t, r)| {
                        if assigned(t) {
                            KeySpec {
                                edges: g.in_edges(t),
                                slots: Vec::new(),
                            }
                        } else {
                            KeySpec {
                                edges: (0..g.edge_count())
                                    .filter(|&e| assigned(g.tail(e)) && !assigned(g.head(e)) && r[g.head(e)])
                                    .collect(),
                                slots: (0..layout.slots.len())
                                    .filter(|&s| !assigned(layout.slots[s].owner) && r[layout.slots[s].owner])
                                    .collect(),
                            }
                        }
                    })
                    .collect()
            })
            .collect();

        Ok(Searcher {
            g,
            n,
            message_bits,
            layout,
            widths,
            order,
            inputs,
            radices,
            table_len,
            dead,
            scenarios,
            visible,
            keys,
            symmetry: budget.symmetry,
            max_codes: budget.max_codes,
            deadline: Duration::from_secs_f64(budget.max_seconds.max(0.0)),
        })
    }

    fn demand(&self, d: usize, message: u64) -> u64 {
        self.layout.slots[self.layout.demands[d].slot].value(message)
    }

    fn error(&self, s: usize, e: usize) -> u64 {
        let pat = &self.scenarios[s].pattern;
        pat.iter().find(|&&(f, _)| f == e).map_or(0, |&(_, r)| r)
    }

    /// Value some terminal-facing key sees on `e` in scenario `s`; `None`
    /// when the table entry is not assigned yet.
    fn seen(&self, st: &State, s: usize, e: usize, current: usize) -> Option<u64> {
        if self.g.tail(e) == current {
            let v = st.tables[e][st.idx[s][e]];
            (v != UNSET).then(|| v ^ self.error(s, e))
        } else {
            Some(st.rx[s][e])
        }
    }

    /// No two visible scenarios that demand different values collide at
    /// any terminal's frontier. `q` nodes are assigned (the last possibly
    /// partially).
    fn consistent(&self, st: &State, q: usize, buf: &mut Vec<(u128, u64)>) -> bool {
        let current = if q == 0 { usize::MAX } else { self.order[q - 1] };
        let vis = self.visible[q];
        for (d, spec) in self.keys[q].iter().enumerate() {
            let key_bits: u32 = spec.edges.iter().map(|&e| self.widths[e]).sum::<u32>()
                + spec.slots.iter().map(|&s| self.layout.slots[s].bits).sum::<u32>();
            if key_bits > 128 {
                // too wide to pack; only the final verification decides
                continue;
            }
            buf.clear();
            'scen: for s in 0..vis {
                let m = self.scenarios[s].message;
                let mut key: u128 = 0;
                for &e in &spec.edges {
                    match self.seen(st, s, e, current) {
                        Some(v) => key = (key << self.widths[e]) | v as u128,
                        None => continue 'scen,
                    }
                }
                for &sl in &spec.slots {
                    let slot = &self.layout.slots[sl];
                    key = (key << slot.bits) | slot.value(m) as u128;
                }
                buf.push((key, self.demand(d, m)));
            }
            buf.sort_unstable();
            if buf.windows(2).any(|w| w[0].0 == w[1].0 && w[0].1 != w[1].1) {
                return false;
            }
        }
        true
    }

    fn fresh_state(&self) -> State {
        let ns = self.scenarios.len();
        let ne = self.g.edge_count();
        State {
            tables: self.table_len.iter().map(|&l| vec![0; l]).collect(),
            rx: vec![vec![0; ne]; ns],
            idx: vec![vec![0; ne]; ns],
            pos: 0,
        }
    }

    fn run(&self, start: Instant) -> (Option<std::result::Result<NetworkCode, ()>>, u64) {
        let counter = AtomicU64::new(0);
        let stop = AtomicBool::new(false);
        let mut ctx = Ctx {
            counter: &counter,
            stop: &stop,
            start,
            local: 0,
            split_at: None,
            collected: Vec::new(),
            overflow: false,
        };
        let mut buf = Vec::new();
        let st = self.fresh_state();
        if !self.consistent(&st, 0, &mut buf) {
            return (None, 0);
        }

        // Expand the tree breadth-first by node levels until there is enough
        // work to spread, keeping prefixes in canonical order.
        let mut frontier = vec![st];
        let mut level = 0;
        if !par::is_sequential() {
            'expand: while frontier.len() < SPLIT_TARGET && level < self.order.len() {
                level += 1;
                let mut next = Vec::new();
                for st in &frontier {
                    let mut st = st.clone();
                    ctx.split_at = Some(level);
                    match self.node(&mut st, &mut ctx, &mut buf) {
                        Flow::Continue => {}
                        Flow::Abort if ctx.overflow => {
                            // too wide to split here; hand out the previous level
                            ctx.collected.clear();
                            next.clear();
                            break 'expand;
                        }
                        Flow::Abort => {
                            ctx.flush();
                            return (Some(Err(())), counter.load(Ordering::Relaxed));
                        }
                        Flow::Found(w) => {
                            // reached a leaf before the split level; earlier
                            // prefixes were exhausted without a witness
                            next.append(&mut ctx.collected);
                            next.push(w);
                            ctx.collected.clear();
                            // stop expanding: everything after is ordered later
                            ctx.flush();
                            return self.finish_frontier(next, &counter, &stop, start);
                        }
                    }
                    next.append(&mut ctx.collected);
                }
                frontier = next;
                if frontier.is_empty() {
                    ctx.flush();
                    return (None, counter.load(Ordering::Relaxed));
                }
            }
        }
        ctx.flush();
        self.finish_frontier(frontier, &counter, &stop, start)
    }

    fn finish_frontier(
        &self,
        frontier: Vec<State>,
        counter: &AtomicU64,
        stop: &AtomicBool,
        start: Instant,
    ) -> (Option<std::result::Result<NetworkCode, ()>>, u64) {
        let found = par::find_map_first_in(&frontier, |st| {
            let mut st = st.clone();
            if st.pos == self.order.len() {
                return Some(Ok(st));
            }
            let mut ctx = Ctx {
                counter,
                stop,
                start,
                local: 0,
                split_at: None,
                collected: Vec::new(),
                overflow: false,
            };
            let mut buf = Vec::new();
            let out = match self.node(&mut st, &mut ctx, &mut buf) {
                Flow::Continue => None,
                Flow::Found(w) => Some(Ok(w)),
                Flow::Abort => Some(Err(())),
            };
            ctx.flush();
            out
        });
        let total = counter.load(Ordering::Relaxed);
        (found.map(|r| r.map(|st| self.witness(&st))), total)
    }

    /// Assign every out-edge table of `order[st.pos]`, then recurse.
    fn node(&self, st: &mut State, ctx: &mut Ctx, buf: &mut Vec<(u128, u64)>) -> Flow {
        let p = st.pos;
        if ctx.split_at == Some(p) {
            if ctx.collected.len() >= MAX_FRONTIER {
                ctx.overflow = true;
                return Flow::Abort;
            }
            ctx.collected.push(st.clone());
            return Flow::Continue;
        }
        if p == self.order.len() {
            return Flow::Found(st.clone());
        }
        let v = self.order[p];
        let outs = self.g.out_edges(v);
        let mut entries: Vec<(usize, usize)> = Vec::new();
        for &e in &outs {
            let table = &mut st.tables[e];
            table.iter_mut().for_each(|x| *x = 0);
            for s in 0..self.scenarios.len() {
                let m = self.scenarios[s].message;
                let mut ix = 0u64;
                for (src, &r) in self.inputs[e].iter().zip(&self.radices[e]) {
                    let val = match *src {
                        Src::Edge(f) => st.rx[s][f],
                        Src::Slot(sl) => self.layout.slots[sl].value(m),
                    };
                    ix = ix * r + val;
                }
                st.idx[s][e] = ix as usize;
            }
            if self.dead[e] {
                continue;
            }
            let used: BTreeSet<usize> = (0..self.scenarios.len()).map(|s| st.idx[s][e]).collect();
            for &i in &used {
                table[i] = UNSET;
                entries.push((e, i));
            }
        }
        st.pos = p + 1;
        let flow = self.entry(st, &entries, 0, &outs, ctx, buf);
        st.pos = p;
        flow
    }

    fn entry(
        &self,
        st: &mut State,
        entries: &[(usize, usize)],
        j: usize,
        outs: &[usize],
        ctx: &mut Ctx,
        buf: &mut Vec<(u128, u64)>,
    ) -> Flow {
        if j == entries.len() {
            if entries.is_empty() && !self.consistent(st, st.pos, buf) {
                return Flow::Continue;
            }
            for &e in outs {
                for s in 0..self.scenarios.len() {
                    st.rx[s][e] = st.tables[e][st.idx[s][e]] ^ self.error(s, e);
                }
            }
            return self.node(st, ctx, buf);
        }
        let (e, i) = entries[j];
        let q = 1u64 << self.widths[e];
        let cap = if self.symmetry {
            // first-occurrence order over this edge's entries so far
            let seen_max = entries[..j]
                .iter()
                .filter(|&&(f, _)| f == e)
                .map(|&(f, k)| st.tables[f][k])
                .max();
            seen_max.map_or(1, |m| (m + 2).min(q))
        } else {
            q
        };
        for val in 0..cap {
            if !ctx.tick(self) {
                st.tables[e][i] = UNSET;
                return Flow::Abort;
            }
            st.tables[e][i] = val;
            if !self.consistent(st, st.pos, buf) {
                continue;
            }
            match self.entry(st, entries, j + 1, outs, ctx, buf) {
                Flow::Continue => {}
                other => {
                    st.tables[e][i] = UNSET;
                    return other;
                }
            }
        }
        st.tables[e][i] = UNSET;
        Flow::Continue
    }

    /// Complete code from a fully assigned state, with derived decoders.
    fn witness(&self, st: &State) -> NetworkCode {
        let g = self.g;
        let mut code = NetworkCode::new(self.n, self.message_bits);
        for e in 0..g.edge_count() {
            let inputs = self.inputs[e]
                .iter()
                .map(|src| match *src {
                    Src::Edge(f) => Input::edge(&g.edge(f).id),
                    Src::Slot(s) => Input::Message(s),
                })
                .collect();
            let table = st.tables[e].iter().map(|&v| if v == UNSET { 0 } else { v }).collect();
            code.edge_functions.insert(g.edge(e).id.clone(), FunctionTable::new(inputs, table));
        }
        for (d, dem) in self.layout.demands.iter().enumerate() {
            let ins = g.in_edges(dem.terminal);
            let rs: Vec<u64> = ins.iter().map(|&f| 1u64 << self.widths[f]).collect();
            let len: u64 = rs.iter().product();
            let mut table = vec![0u64; len as usize];
            for s in 0..self.scenarios.len() {
                let ix = ins.iter().zip(&rs).fold(0u64, |a, (&f, &r)| a * r + st.rx[s][f]);
                table[ix as usize] = self.demand(d, self.scenarios[s].message);
            }
            code.decoders.insert(
                g.nodes()[dem.terminal].clone(),
                FunctionTable::new(ins.iter().map(|&f| Input::edge(&g.edge(f).id)).collect(), table),
            );
        }
        code
    }
}
