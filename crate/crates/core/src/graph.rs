//! Directed acyclic networks and the two problem instances built on them:
//! multiple-unicast instances and single-source/single-sink error-correction
//! instances.

use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adversary::AdversaryClass;
use crate::error::{Error, Result};

/// A point-to-point channel. `capacity` is in bits per symbol time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: u32,
}

impl Edge {
    pub fn new(id: impl Into<String>, tail: impl Into<String>, head: impl Into<String>, capacity: u32) -> Self {
        Edge {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            capacity,
        }
    }
}

/// Node and edge lists with index lookups. Construction never fails;
/// [`NetworkGraph::validate`] reports every structural problem.
#[derive(Debug, Clone)]
pub struct NetworkGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    node_ix: HashMap<String, usize>,
    edge_ix: HashMap<String, usize>,
    ends: Vec<Option<(usize, usize)>>,
}

impl PartialEq for NetworkGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for NetworkGraph {}

impl NetworkGraph {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>) -> Self {
        let mut node_ix = HashMap::with_capacity(nodes.len());
        for (i, v) in nodes.iter().enumerate() {
            node_ix.entry(v.clone()).or_insert(i);
        }
        let mut edge_ix = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            edge_ix.entry(e.id.clone()).or_insert(i);
        }
        let ends = edges
            .iter()
            .map(|e| Some((*node_ix.get(&e.tail)?, *node_ix.get(&e.head)?)))
            .collect();
        NetworkGraph {
            nodes,
            edges,
            node_ix,
            edge_ix,
            ends,
        }
    }

    /// Convenience constructor from string slices, all edges unit capacity.
    pub fn from_unit_edges(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Self {
        NetworkGraph::new(
            nodes.iter().map(|s| s.to_string()).collect(),
            edges.iter().map(|(id, u, v)| Edge::new(*id, *u, *v, 1)).collect(),
        )
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_ix.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_ix.get(id).copied()
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Tail node index. Panics on an unvalidated graph with dangling edges.
    pub fn tail(&self, e: usize) -> usize {
        self.ends[e].expect("edge with unknown endpoint").0
    }

    pub fn head(&self, e: usize) -> usize {
        self.ends[e].expect("edge with unknown endpoint").1
    }

    /// Incoming edges of `v` in declaration order.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| matches!(self.ends[e], Some((_, h)) if h == v))
            .collect()
    }

    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| matches!(self.ends[e], Some((t, _)) if t == v))
            .collect()
    }

    /// Kahn's algorithm, smallest declared index first among ready nodes.
    /// `None` if the graph has a cycle or dangling edges.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for end in &self.ends {
            let (t, h) = (*end)?;
            indeg[h] += 1;
            succ[t].push(h);
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Position of every node in [`Self::topo_order`].
    pub fn topo_positions(&self) -> Option<Vec<usize>> {
        let order = self.topo_order()?;
        let mut pos = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        Some(pos)
    }

    /// Edges sorted by the topological position of their tail, ties in
    /// declaration order. This is the evaluation order of network codes.
    pub fn topo_edge_order(&self) -> Option<Vec<usize>> {
        let pos = self.topo_positions()?;
        let mut edges: Vec<usize> = (0..self.edges.len()).collect();
        edges.sort_by_key(|&e| (pos[self.tail(e)], e));
        Some(edges)
    }

    /// Nodes from which `v` is reachable, including `v`.
    pub fn ancestors(&self, v: usize) -> HashSet<usize> {
        let mut seen = HashSet::from([v]);
        let mut stack = vec![v];
        while let Some(w) = stack.pop() {
            for e in self.in_edges(w) {
                let t = self.tail(e);
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for v in &self.nodes {
            if !seen.insert(v.as_str()) {
                out.push(format!("duplicate node `{v}`"));
            }
        }
        let mut seen = HashSet::new();
        let mut dangling = false;
        for e in &self.edges {
            if !seen.insert(e.id.as_str()) {
                out.push(format!("duplicate edge `{}`", e.id));
            }
            for end in [&e.tail, &e.head] {
                if !self.node_ix.contains_key(end) {
                    out.push(format!("edge `{}` references unknown node `{end}`", e.id));
                    dangling = true;
                }
            }
            if e.capacity == 0 {
                out.push(format!("edge `{}` has zero capacity", e.id));
            }
        }
        if !dangling && self.topo_order().is_none() {
            out.push("cycle detected".to_string());
        }
        out
    }
}

/// Violations found by `validate`; empty iff the instance is well formed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(self.violations))
        }
    }
}

/// A multiple-unicast network coding problem: `pairs[i]` is
/// `(source, terminal)` and terminal `i` wants source `i`'s message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnicastInstance {
    pub graph: NetworkGraph,
    pub pairs: Vec<(String, String)>,
}

impl UnicastInstance {
    pub fn new(graph: NetworkGraph, pairs: Vec<(String, String)>) -> Self {
        UnicastInstance { graph, pairs }
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = self.graph.validate();
        if self.pairs.is_empty() {
            violations.push("no source/terminal pairs".to_string());
        }
        let mut used = HashSet::new();
        for (s, t) in &self.pairs {
            for v in [s, t] {
                if self.graph.node_index(v).is_none() {
                    violations.push(format!("pair endpoint `{v}` is not a node"));
                } else if !used.insert(v.as_str()) {
                    violations.push(format!("pair endpoint `{v}` used more than once"));
                }
            }
        }
        ValidationReport { violations }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleKind {
    A,
    X,
    Y,
    Z,
    ZPrime,
    B,
    Internal,
}

impl RoleKind {
    pub const BRANCH: [RoleKind; 6] = [
        RoleKind::A,
        RoleKind::X,
        RoleKind::Y,
        RoleKind::Z,
        RoleKind::ZPrime,
        RoleKind::B,
    ];
}

impl fmt::Display for RoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RoleKind::A => "a",
            RoleKind::X => "x",
            RoleKind::Y => "y",
            RoleKind::Z => "z",
            RoleKind::ZPrime => "z'",
            RoleKind::B => "b",
            RoleKind::Internal => "internal",
        };
        f.write_str(s)
    }
}

/// Role of an edge in a reduced instance. `branch` is zero-based and is
/// `None` exactly for internal edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRole {
    pub kind: RoleKind,
    pub branch: Option<usize>,
}

impl EdgeRole {
    pub fn branch(kind: RoleKind, i: usize) -> Self {
        EdgeRole { kind, branch: Some(i) }
    }

    pub fn internal() -> Self {
        EdgeRole {
            kind: RoleKind::Internal,
            branch: None,
        }
    }
}

/// A single-source/single-sink network error correction problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecInstance {
    pub graph: NetworkGraph,
    pub source: String,
    pub terminal: String,
    pub adversary: AdversaryClass,
    pub roles: Option<BTreeMap<String, EdgeRole>>,
}

impl NecInstance {
    pub fn new(graph: NetworkGraph, source: impl Into<String>, terminal: impl Into<String>, adversary: AdversaryClass) -> Self {
        NecInstance {
            graph,
            source: source.into(),
            terminal: terminal.into(),
            adversary,
            roles: None,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = self.graph.validate();
        for v in [&self.source, &self.terminal] {
            if self.graph.node_index(v).is_none() {
                violations.push(format!("`{v}` is not a node"));
            }
        }
        if self.source == self.terminal {
            violations.push("source equals terminal".to_string());
        }
        for set in self.adversary.sets() {
            for e in set {
                if self.graph.edge_index(e).is_none() {
                    violations.push(format!("unknown edge in adversary: `{e}`"));
                }
            }
        }
        if let Some(roles) = &self.roles {
            if violations.is_empty() {
                violations.extend(self.role_violations(roles));
            }
        }
        ValidationReport { violations }
    }

    fn role_violations(&self, roles: &BTreeMap<String, EdgeRole>) -> Vec<String> {
        let mut out = Vec::new();
        let g = &self.graph;
        let mut by_branch: BTreeMap<usize, BTreeMap<RoleKind, Vec<usize>>> = BTreeMap::new();
        for (id, role) in roles {
            let Some(e) = g.edge_index(id) else {
                out.push(format!("role assigned to unknown edge `{id}`"));
                continue;
            };
            match (role.kind, role.branch) {
                (RoleKind::Internal, None) => {}
                (RoleKind::Internal, Some(_)) => out.push(format!("internal edge `{id}` carries a branch index")),
                (_, None) => out.push(format!("branch edge `{id}` has no branch index")),
                (kind, Some(i)) => by_branch.entry(i).or_default().entry(kind).or_default().push(e),
            }
        }
        let k = by_branch.len();
        if by_branch.keys().copied().ne(0..k) {
            out.push("branch indices are not contiguous from 1".to_string());
        }
        let (s, t) = (g.node_index(&self.source), g.node_index(&self.terminal));
        for (i, kinds) in &by_branch {
            let mut edge = BTreeMap::new();
            for kind in RoleKind::BRANCH {
                match kinds.get(&kind).map(Vec::as_slice) {
                    Some([e]) => {
                        edge.insert(kind, *e);
                    }
                    _ => out.push(format!("branch {} needs exactly one `{kind}` edge", i + 1)),
                }
            }
            if edge.len() != 6 {
                continue;
            }
            let (a, x, y, z, zp, b) = (
                edge[&RoleKind::A],
                edge[&RoleKind::X],
                edge[&RoleKind::Y],
                edge[&RoleKind::Z],
                edge[&RoleKind::ZPrime],
                edge[&RoleKind::B],
            );
            let u = g.head(a);
            let bnode = g.tail(b);
            let ok = Some(g.tail(a)) == s
                && [x, y, z].iter().all(|&e| g.tail(e) == u)
                && [x, y, zp].iter().all(|&e| g.head(e) == bnode)
                && Some(g.head(b)) == t;
            if !ok {
                out.push(format!("branch {} does not follow the gadget wiring", i + 1));
            }
            if [a, x, y, z, zp, b].iter().any(|&e| g.edge(e).capacity != 1) {
                out.push(format!("branch {} has a non-unit gadget edge", i + 1));
            }
        }
        out
    }
}
