//! JSON documents for instances and codes.
//!
//! Serialization is canonical: object keys sorted, two-space indentation,
//! trailing newline, so equal values always produce identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adversary::AdversaryClass;
use crate::code::{FunctionTable, Input, NetworkCode};
use crate::engine::ProblemRef;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeRole, NecInstance, NetworkGraph, RoleKind, UnicastInstance};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(default = "unit")]
    pub capacity: u32,
}

fn unit() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub source: String,
    pub terminal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleDoc {
    pub role: RoleKind,
    /// One-based; absent for internal edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceDocument {
    Unicast {
        format_version: String,
        nodes: Vec<String>,
        edges: Vec<EdgeDoc>,
        pairs: Vec<PairDoc>,
    },
    Nec {
        format_version: String,
        nodes: Vec<String>,
        edges: Vec<EdgeDoc>,
        source: String,
        terminal: String,
        adversary: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        roles: Option<BTreeMap<String, RoleDoc>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    pub inputs: Vec<String>,
    pub table: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDocument {
    pub format_version: String,
    pub n: u32,
    pub message_bits: u32,
    pub edge_functions: BTreeMap<String, FunctionDoc>,
    #[serde(default)]
    pub decoders: BTreeMap<String, FunctionDoc>,
}

/// Either kind of instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Unicast(UnicastInstance),
    Nec(NecInstance),
}

impl Instance {
    pub fn as_problem(&self) -> ProblemRef<'_> {
        match self {
            Instance::Unicast(i) => i.into(),
            Instance::Nec(i) => i.into(),
        }
    }

    pub fn graph(&self) -> &NetworkGraph {
        self.as_problem().graph()
    }
}

impl From<UnicastInstance> for Instance {
    fn from(i: UnicastInstance) -> Self {
        Instance::Unicast(i)
    }
}

impl From<NecInstance> for Instance {
    fn from(i: NecInstance) -> Self {
        Instance::Nec(i)
    }
}

fn check_version(v: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format_version `{v}` (expected `{FORMAT_VERSION}`)")));
    }
    Ok(())
}

fn graph_from(nodes: Vec<String>, edges: Vec<EdgeDoc>) -> NetworkGraph {
    NetworkGraph::new(
        nodes,
        edges
            .into_iter()
            .map(|e| Edge::new(e.id, e.from, e.to, e.capacity))
            .collect(),
    )
}

fn graph_doc(g: &NetworkGraph) -> (Vec<String>, Vec<EdgeDoc>) {
    (
        g.nodes().to_vec(),
        g.edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.id.clone(),
                from: e.tail.clone(),
                to: e.head.clone(),
                capacity: e.capacity,
            })
            .collect(),
    )
}

impl InstanceDocument {
    pub fn into_instance(self) -> Result<Instance> {
        let inst = match self {
            InstanceDocument::Unicast {
                format_version,
                nodes,
                edges,
                pairs,
            } => {
                check_version(&format_version)?;
                Instance::Unicast(UnicastInstance::new(
                    graph_from(nodes, edges),
                    pairs.into_iter().map(|p| (p.source, p.terminal)).collect(),
                ))
            }
            InstanceDocument::Nec {
                format_version,
                nodes,
                edges,
                source,
                terminal,
                adversary,
                roles,
            } => {
                check_version(&format_version)?;
                let mut inst = NecInstance::new(graph_from(nodes, edges), source, terminal, AdversaryClass::new(adversary));
                inst.roles = roles
                    .map(|r| {
                        r.into_iter()
                            .map(|(id, doc)| {
                                let role = match (doc.role, doc.branch) {
                                    (kind, Some(0)) => {
                                        return Err(Error::Parse(format!("edge `{id}`: {kind} branch numbers start at 1")))
                                    }
                                    (kind, b) => EdgeRole {
                                        kind,
                                        branch: b.map(|b| b - 1),
                                    },
                                };
                                Ok((id, role))
                            })
                            .collect::<Result<BTreeMap<_, _>>>()
                    })
                    .transpose()?;
                Instance::Nec(inst)
            }
        };
        let report = match &inst {
            Instance::Unicast(i) => i.validate(),
            Instance::Nec(i) => i.validate(),
        };
        if !report.is_valid() {
            return Err(Error::InvalidInstance(report.violations));
        }
        Ok(inst)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        match inst {
            Instance::Unicast(i) => {
                let (nodes, edges) = graph_doc(&i.graph);
                InstanceDocument::Unicast {
                    format_version: FORMAT_VERSION.into(),
                    nodes,
                    edges,
                    pairs: i
                        .pairs
                        .iter()
                        .map(|(s, t)| PairDoc {
                            source: s.clone(),
                            terminal: t.clone(),
                        })
                        .collect(),
                }
            }
            Instance::Nec(i) => {
                let (nodes, edges) = graph_doc(&i.graph);
                InstanceDocument::Nec {
                    format_version: FORMAT_VERSION.into(),
                    nodes,
                    edges,
                    source: i.source.clone(),
                    terminal: i.terminal.clone(),
                    adversary: i.adversary.sets().map(|s| s.iter().cloned().collect()).collect(),
                    roles: i.roles.as_ref().map(|r| {
                        r.iter()
                            .map(|(id, role)| {
                                (
                                    id.clone(),
                                    RoleDoc {
                                        role: role.kind,
                                        branch: role.branch.map(|b| b + 1),
                                    },
                                )
                            })
                            .collect()
                    }),
                }
            }
        }
    }
}

fn function_doc(f: &FunctionTable) -> FunctionDoc {
    FunctionDoc {
        inputs: f.inputs.iter().map(Input::to_string).collect(),
        table: f.table.clone(),
    }
}

fn function_from(f: FunctionDoc) -> Result<FunctionTable> {
    Ok(FunctionTable::new(
        f.inputs.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        f.table,
    ))
}

impl CodeDocument {
    pub fn from_code(code: &NetworkCode) -> Self {
        CodeDocument {
            format_version: FORMAT_VERSION.into(),
            n: code.n,
            message_bits: code.message_bits,
            edge_functions: code.edge_functions.iter().map(|(k, f)| (k.clone(), function_doc(f))).collect(),
            decoders: code.decoders.iter().map(|(k, f)| (k.clone(), function_doc(f))).collect(),
        }
    }

    pub fn into_code(self) -> Result<NetworkCode> {
        check_version(&self.format_version)?;
        let conv = |m: BTreeMap<String, FunctionDoc>| -> Result<BTreeMap<String, FunctionTable>> {
            m.into_iter().map(|(k, f)| Ok((k, function_from(f)?))).collect()
        };
        Ok(NetworkCode {
            n: self.n,
            message_bits: self.message_bits,
            edge_functions: conv(self.edge_functions)?,
            decoders: conv(self.decoders)?,
        })
    }
}

impl Serialize for NetworkCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CodeDocument::from_code(self).serialize(s)
    }
}

/// Canonical JSON text for any serializable value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_instance()
}

pub fn instance_to_string(inst: &Instance) -> Result<String> {
    to_canonical_json(&InstanceDocument::from_instance(inst))
}

/// Parse a code document. Table shapes are checked against an instance
/// when the code is used.
pub fn parse_code(text: &str) -> Result<NetworkCode> {
    let doc: CodeDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_code()
}

pub fn code_to_string(code: &NetworkCode) -> Result<String> {
    to_canonical_json(&CodeDocument::from_code(code))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn read_code(path: impl AsRef<Path>) -> Result<NetworkCode> {
    parse_code(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, inst: &Instance) -> Result<()> {
    std::fs::write(path, instance_to_string(inst)?)?;
    Ok(())
}

pub fn write_code(path: impl AsRef<Path>, code: &NetworkCode) -> Result<()> {
    std::fs::write(path, code_to_string(code)?)?;
    Ok(())
}
