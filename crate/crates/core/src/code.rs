//! Network codes as explicit lookup tables.
//!
//! Each edge (and each decoder) owns a table indexed by the mixed-radix
//! value of its inputs: inputs are taken in listed order, the first input is
//! the most significant digit, and input `e` ranges over `[0, 2^(c_e·n))`.
//! Source messages are split into slots; a message integer stores slot 0 in
//! its least significant bits.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Input {
    Edge(String),
    /// A source message slot, written `msg:<slot>` in documents.
    Message(usize),
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::Edge(e) => f.write_str(e),
            Input::Message(s) => write!(f, "msg:{s}"),
        }
    }
}

impl FromStr for Input {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.strip_prefix("msg:") {
            Some(slot) => slot
                .parse()
                .map(Input::Message)
                .map_err(|_| Error::Parse(format!("bad message slot `{s}`"))),
            None => Ok(Input::Edge(s.to_string())),
        }
    }
}

impl Input {
    pub fn edge(id: impl Into<String>) -> Self {
        Input::Edge(id.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    pub inputs: Vec<Input>,
    pub table: Vec<u64>,
}

impl FunctionTable {
    pub fn new(inputs: Vec<Input>, table: Vec<u64>) -> Self {
        FunctionTable { inputs, table }
    }

    /// Single input passed through unchanged over an alphabet of `bits` bits.
    pub fn identity(input: Input, bits: u32) -> Self {
        FunctionTable::new(vec![input], (0..1u64 << bits).collect())
    }

    /// A table that ignores its inputs.
    pub fn constant(inputs: Vec<Input>, len: usize, value: u64) -> Self {
        FunctionTable::new(inputs, vec![value; len])
    }
}

/// Edge encoders and terminal decoders at block length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkCode {
    pub n: u32,
    pub message_bits: u32,
    pub edge_functions: BTreeMap<String, FunctionTable>,
    pub decoders: BTreeMap<String, FunctionTable>,
}

impl NetworkCode {
    pub fn new(n: u32, message_bits: u32) -> Self {
        NetworkCode {
            n,
            message_bits,
            edge_functions: BTreeMap::new(),
            decoders: BTreeMap::new(),
        }
    }

    pub fn with_edge(mut self, id: &str, inputs: &[&str], table: Vec<u64>) -> Self {
        self.edge_functions.insert(id.to_string(), parse_inputs(inputs, table));
        self
    }

    pub fn with_decoder(mut self, node: &str, inputs: &[&str], table: Vec<u64>) -> Self {
        self.decoders.insert(node.to_string(), parse_inputs(inputs, table));
        self
    }
}

fn parse_inputs(inputs: &[&str], table: Vec<u64>) -> FunctionTable {
    FunctionTable::new(
        inputs.iter().map(|s| s.parse().expect("infallible for edge ids")).collect(),
        table,
    )
}

/// Row-major index of `values` under `radices` (first value most significant).
pub fn mixed_radix_index(values: &[u64], radices: &[u64]) -> u64 {
    values.iter().zip(radices).fold(0, |acc, (&v, &r)| acc * r + v)
}

/// Inverse of [`mixed_radix_index`].
pub fn mixed_radix_digits(mut index: u64, radices: &[u64]) -> Vec<u64> {
    let mut out = vec![0; radices.len()];
    for j in (0..radices.len()).rev() {
        out[j] = index % radices[j];
        index /= radices[j];
    }
    out
}

/// Bitwise majority of three `bits`-bit inputs, as a table over
/// `(first, second, third)`.
pub fn majority_table(bits: u32) -> Vec<u64> {
    let q = 1u64 << bits;
    let mut out = Vec::with_capacity((q * q * q) as usize);
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                out.push((a & b) | (a & c) | (b & c));
            }
        }
    }
    out
}

/// Slot `i` of a message whose slots are all `bits` wide.
pub fn message_slot(message: u64, i: usize, bits: u32) -> u64 {
    (message >> (bits as usize * i)) & ((1u64 << bits) - 1)
}

/// Pack equal-width slot values into a message integer.
pub fn pack_slots(values: &[u64], bits: u32) -> u64 {
    values
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | v << (bits as usize * i))
}
