//! Max-flow / min-cut on integer capacities (Edmonds–Karp).

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{NetworkGraph, UnicastInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutReport {
    /// Bits per symbol time.
    pub value: u64,
    pub cut_edges: BTreeSet<String>,
}

/// Minimum `src`–`dst` cut. The witness is the cut closest to `dst`: the
/// edges entering the set of nodes that can still reach `dst` in the final
/// residual graph.
pub fn min_cut(graph: &NetworkGraph, src: &str, dst: &str) -> Result<CutReport> {
    let s = graph
        .node_index(src)
        .ok_or_else(|| Error::InvalidInstance(vec![format!("`{src}` is not a node")]))?;
    let t = graph
        .node_index(dst)
        .ok_or_else(|| Error::InvalidInstance(vec![format!("`{dst}` is not a node")]))?;
    if s == t {
        return Err(Error::InvalidInstance(vec!["min-cut endpoints coincide".into()]));
    }
    let m = graph.edge_count();
    let cap: Vec<u64> = graph.edges().iter().map(|e| e.capacity as u64).collect();
    let mut flow = vec![0u64; m];
    let mut adj = vec![Vec::new(); graph.node_count()];
    for e in 0..m {
        adj[graph.tail(e)].push(e);
        adj[graph.head(e)].push(e);
    }
    // residual capacity of traversing e away from node `from`
    let residual = |e: usize, from: usize, flow: &[u64]| -> u64 {
        if graph.tail(e) == from {
            cap[e] - flow[e]
        } else {
            flow[e]
        }
    };
    let other = |e: usize, v: usize| if graph.tail(e) == v { graph.head(e) } else { graph.tail(e) };

    let mut value = 0u64;
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; graph.node_count()];
        let mut seen = vec![false; graph.node_count()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &e in &adj[v] {
                let w = other(e, v);
                if !seen[w] && residual(e, v, &flow) > 0 {
                    seen[w] = true;
                    pred[w] = Some(e);
                    queue.push_back(w);
                }
            }
        }
        if !seen[t] {
            break;
        }
        let mut path = Vec::new();
        let mut v = t;
        let mut bottleneck = u64::MAX;
        while v != s {
            let e = pred[v].expect("bfs tree");
            let u = other(e, v);
            bottleneck = bottleneck.min(residual(e, u, &flow));
            path.push((e, u));
            v = u;
        }
        for (e, u) in path {
            if graph.tail(e) == u {
                flow[e] += bottleneck;
            } else {
                flow[e] -= bottleneck;
            }
        }
        value += bottleneck;
    }

    // nodes that reach t in the residual graph
    let mut sink_side = vec![false; graph.node_count()];
    sink_side[t] = true;
    let mut queue = VecDeque::from([t]);
    while let Some(v) = queue.pop_front() {
        for &e in &adj[v] {
            let w = other(e, v);
            if !sink_side[w] && residual(e, w, &flow) > 0 {
                sink_side[w] = true;
                queue.push_back(w);
            }
        }
    }
    let cut_edges = (0..m)
        .filter(|&e| !sink_side[graph.tail(e)] && sink_side[graph.head(e)])
        .map(|e| graph.edge(e).id.clone())
        .collect();
    Ok(CutReport { value, cut_edges })
}

/// Per-pair min-cut values; a zero entry certifies that unit rate is
/// infeasible for that pair.
pub fn unicast_cut_check(inst: &UnicastInstance) -> Result<Vec<u64>> {
    inst.validate().into_result()?;
    inst.pairs
        .iter()
        .map(|(s, t)| min_cut(&inst.graph, s, t).map(|c| c.value))
        .collect()
}
