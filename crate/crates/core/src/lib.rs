//! Reduction from multiple-unicast network coding to single-source,
//! single-sink network error correction with a single jammed link, plus the
//! exhaustive tools to verify it on small instances: code evaluation under
//! adversarial errors, brute-force feasibility search, message
//! classification audits and discrete information measures.

pub mod adversary;
pub mod audit;
pub mod cli;
pub mod code;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod flow;
pub mod graph;
pub mod info;
pub mod io;
pub mod oracle;
pub mod par;
pub mod reduction;

pub use adversary::{enumerate_patterns, pattern_count, AdversaryClass, ErrorPattern, PatternSpace};
pub use code::{FunctionTable, Input, NetworkCode};
pub use engine::{
    check_unicast_zero_error, check_zero_error, empirical_error_prob, evaluate, ErrorRate, EvalTrace, ProblemRef,
    UnicastVerdict, ZeroErrorVerdict,
};
pub use error::{Error, Result};
pub use flow::{min_cut, unicast_cut_check, CutReport};
pub use graph::{Edge, EdgeRole, NecInstance, NetworkGraph, RoleKind, UnicastInstance, ValidationReport};
pub use reduction::{extract_code, lift_code, lift_code_unchecked, reduce, BijectionChain, BranchWiring, Extraction, Reduced};

/// Validate either kind of instance.
pub fn validate_instance<'a>(inst: impl Into<ProblemRef<'a>>) -> ValidationReport {
    match inst.into() {
        ProblemRef::Unicast(i) => i.validate(),
        ProblemRef::Nec(i) => i.validate(),
    }
}
