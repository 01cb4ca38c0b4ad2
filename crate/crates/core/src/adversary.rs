//! Admissible error patterns for an adversary class.
//!
//! A pattern is admissible when its support (the edges with a nonzero error
//! value) is contained in some member set of the class. The zero pattern is
//! always admissible. Patterns are ordered by support, compared as sorted
//! lists of edge indices, and then by their value tuple.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NecInstance, NetworkGraph};

/// Largest member set whose subsets we are willing to list.
const MAX_SET_SIZE: usize = 20;

/// The collection of edge sets an adversary may corrupt (at most one set at a time).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdversaryClass {
    sets: BTreeSet<BTreeSet<String>>,
}

impl AdversaryClass {
    pub fn new<I, S>(sets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = String>,
    {
        AdversaryClass {
            sets: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn empty() -> Self {
        AdversaryClass::default()
    }

    pub fn singletons<I: IntoIterator<Item = String>>(edges: I) -> Self {
        AdversaryClass::new(edges.into_iter().map(|e| [e]))
    }

    pub fn sets(&self) -> impl Iterator<Item = &BTreeSet<String>> {
        self.sets.iter()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_singleton_only(&self) -> bool {
        self.sets.iter().all(|s| s.len() == 1)
    }

    /// Every edge that appears in some member set.
    pub fn jammable(&self) -> BTreeSet<&str> {
        self.sets.iter().flatten().map(String::as_str).collect()
    }
}

/// An error value per edge; edges not listed carry no error.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorPattern {
    pub values: BTreeMap<String, u64>,
}

impl ErrorPattern {
    pub fn zero() -> Self {
        ErrorPattern::default()
    }

    pub fn single(edge: impl Into<String>, value: u64) -> Self {
        ErrorPattern {
            values: BTreeMap::from([(edge.into(), value)]),
        }
    }

    pub fn support(&self) -> BTreeSet<&str> {
        self.values
            .iter()
            .filter(|(_, &v)| v != 0)
            .map(|(e, _)| e.as_str())
            .collect()
    }

    pub(crate) fn from_indexed(graph: &NetworkGraph, pattern: &[(usize, u64)]) -> Self {
        ErrorPattern {
            values: pattern.iter().map(|&(e, v)| (graph.edge(e).id.clone(), v)).collect(),
        }
    }

    /// Resolve edge ids and check values against the edge alphabets.
    pub(crate) fn to_indexed(&self, graph: &NetworkGraph, n: u32) -> Result<Vec<(usize, u64)>> {
        let mut out = Vec::new();
        for (id, &v) in &self.values {
            let e = graph
                .edge_index(id)
                .ok_or_else(|| Error::Mismatch(format!("error pattern names unknown edge `{id}`")))?;
            let bits = graph.edge(e).capacity * n;
            if bits < 64 && v >> bits != 0 {
                return Err(Error::Mismatch(format!("error value {v} out of range on edge `{id}`")));
            }
            if v != 0 {
                out.push((e, v));
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Indexable, restartable enumeration of the admissible patterns.
#[derive(Debug, Clone)]
pub struct PatternSpace {
    supports: Vec<Vec<usize>>,
    radices: Vec<Vec<u64>>,
    /// `starts[i]` is the index of the first pattern with support `supports[i]`.
    starts: Vec<u64>,
    len: u64,
}

impl PatternSpace {
    pub fn new(inst: &NecInstance, n: u32) -> Result<Self> {
        let g = &inst.graph;
        let supports = admissible_supports(inst)?;
        let mut radices = Vec::with_capacity(supports.len());
        let mut starts = Vec::with_capacity(supports.len());
        let mut len: u64 = 1;
        for s in &supports {
            let mut block: u64 = 1;
            let mut rs = Vec::with_capacity(s.len());
            for &e in s {
                let bits = g.edge(e).capacity * n;
                if bits >= 64 {
                    return Err(too_large(pattern_count_of(inst, n)?));
                }
                let r = (1u64 << bits) - 1;
                rs.push(r);
                block = block.checked_mul(r).ok_or_else(|| too_large_msg(inst, n))?;
            }
            starts.push(len);
            len = len.checked_add(block).ok_or_else(|| too_large_msg(inst, n))?;
            radices.push(rs);
        }
        Ok(PatternSpace {
            supports,
            radices,
            starts,
            len,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pattern at canonical position `index`, as sorted `(edge, value)` pairs.
    pub fn get(&self, index: u64) -> Vec<(usize, u64)> {
        assert!(index < self.len, "pattern index out of range");
        if index == 0 {
            return Vec::new();
        }
        let block = self.starts.partition_point(|&s| s <= index) - 1;
        let mut rest = index - self.starts[block];
        let support = &self.supports[block];
        let radices = &self.radices[block];
        let mut values = vec![0u64; support.len()];
        for j in (0..support.len()).rev() {
            values[j] = rest % radices[j] + 1;
            rest /= radices[j];
        }
        support.iter().copied().zip(values).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<(usize, u64)>> + '_ {
        self.range(0..self.len)
    }

    pub fn range(&self, range: std::ops::Range<u64>) -> impl Iterator<Item = Vec<(usize, u64)>> + '_ {
        range.map(move |i| self.get(i))
    }

    /// Distinct nonempty supports in canonical order.
    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }
}

fn admissible_supports(inst: &NecInstance) -> Result<Vec<Vec<usize>>> {
    let g = &inst.graph;
    let mut out = BTreeSet::new();
    for set in inst.adversary.sets() {
        if set.len() > MAX_SET_SIZE {
            return Err(Error::TooLarge {
                size: format!("2^{} subsets", set.len()),
                limit: format!("2^{MAX_SET_SIZE}"),
            });
        }
        let mut edges: Vec<usize> = set
            .iter()
            .map(|e| {
                g.edge_index(e)
                    .ok_or_else(|| Error::InvalidInstance(vec![format!("unknown edge in adversary: `{e}`")]))
            })
            .collect::<Result<_>>()?;
        edges.sort_unstable();
        for mask in 1u32..(1 << edges.len()) {
            let sub: Vec<usize> = (0..edges.len()).filter(|j| mask >> j & 1 == 1).map(|j| edges[j]).collect();
            out.insert(sub);
        }
    }
    Ok(out.into_iter().collect())
}

fn pattern_count_of(inst: &NecInstance, n: u32) -> Result<BigUint> {
    let g = &inst.graph;
    let mut total = BigUint::one();
    for s in admissible_supports(inst)? {
        let mut block = BigUint::one();
        for e in s {
            let bits = (g.edge(e).capacity * n) as u64;
            block *= (BigUint::one() << bits) - BigUint::one();
        }
        total += block;
    }
    Ok(total)
}

fn too_large(count: BigUint) -> Error {
    Error::TooLarge {
        size: count.to_string(),
        limit: u64::MAX.to_string(),
    }
}

fn too_large_msg(inst: &NecInstance, n: u32) -> Error {
    too_large(pattern_count_of(inst, n).unwrap_or_else(|_| BigUint::zero()))
}

/// All admissible patterns at block length `n`, in canonical order.
pub fn enumerate_patterns(inst: &NecInstance, n: u32) -> Result<Vec<ErrorPattern>> {
    let space = PatternSpace::new(inst, n)?;
    if space.len() > 1 << 24 {
        return Err(Error::TooLarge {
            size: space.len().to_string(),
            limit: (1u64 << 24).to_string(),
        });
    }
    Ok(space.iter().map(|p| ErrorPattern::from_indexed(&inst.graph, &p)).collect())
}

/// Number of admissible patterns, computed from the supports without
/// listing patterns.
pub fn pattern_count(inst: &NecInstance, n: u32) -> Result<BigUint> {
    pattern_count_of(inst, n)
}
