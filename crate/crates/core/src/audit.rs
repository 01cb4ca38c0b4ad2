//! Message classification for codes on reduced instances and exact checks
//! of the counting bounds that drive the vanishing-error argument.
//!
//! Messages split into good (decoded under every admissible pattern) and
//! bad. A good message is poor when another good message has the same
//! zero-pattern `z'` tuple; the remaining good messages form the circle set.
//! With `ε = |bad| / 2^{kn}` and `ε' = 4ε` the bounds below hold for every
//! deterministic code; all comparisons use exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::Serialize;

use crate::code::NetworkCode;
use crate::engine::good_messages;
use crate::error::{Error, Result};
use crate::graph::NecInstance;
use crate::reduction::{branch_signals, bijection_chain, BijectionChain, BranchWiring};

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MessageClassification {
    /// `k·n`; the message space is `[0, 2^message_bits)`.
    pub message_bits: u32,
    pub good: Vec<u64>,
    pub bad: Vec<u64>,
    pub poor: Vec<u64>,
    pub circle: Vec<u64>,
}

impl MessageClassification {
    pub fn total(&self) -> u64 {
        1 << self.message_bits
    }

    pub fn epsilon(&self) -> Rational {
        Ratio::new(self.bad.len() as i128, self.total() as i128)
    }

    pub fn epsilon_prime(&self) -> Rational {
        self.epsilon() * 4
    }

    /// First broken structural invariant, if any.
    pub fn inconsistency(&self) -> Option<String> {
        let good: BTreeSet<u64> = self.good.iter().copied().collect();
        let bad: BTreeSet<u64> = self.bad.iter().copied().collect();
        let poor: BTreeSet<u64> = self.poor.iter().copied().collect();
        let circle: BTreeSet<u64> = self.circle.iter().copied().collect();
        if good.len() != self.good.len() || bad.len() != self.bad.len() {
            return Some("duplicate messages".into());
        }
        if !good.is_disjoint(&bad) {
            return Some("good and bad messages overlap".into());
        }
        if good.len() + bad.len() != self.total() as usize || good.iter().chain(&bad).any(|&m| m >= self.total()) {
            return Some("good and bad messages do not cover the message space".into());
        }
        if !poor.is_subset(&good) {
            return Some("poor messages are not all good".into());
        }
        if circle != good.difference(&poor).copied().collect() {
            return Some("circle set is not good minus poor".into());
        }
        None
    }
}

/// Classify every message of a code on a reduced instance.
pub fn classify_messages(code: &NetworkCode, inst: &NecInstance) -> Result<MessageClassification> {
    let wiring = BranchWiring::from_instance(inst)?;
    let flags = good_messages(code, inst)?;
    let sig = branch_signals(code, inst, &wiring)?;
    let (good, bad): (Vec<u64>, Vec<u64>) = (0..flags.len() as u64).partition(|&m| flags[m as usize]);
    let mut by_zp: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
    for &m in &good {
        let tuple = sig.iter().map(|s| s.z_prime[m as usize]).collect();
        by_zp.entry(tuple).or_default().push(m);
    }
    let poor_set: BTreeSet<u64> = by_zp.values().filter(|g| g.len() > 1).flatten().copied().collect();
    let circle = good.iter().copied().filter(|m| !poor_set.contains(m)).collect();
    Ok(MessageClassification {
        message_bits: code.message_bits,
        good,
        bad,
        poor: poor_set.into_iter().collect(),
        circle,
    })
}

/// Occupancy of one signal family on one branch over the circle set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilySets {
    /// `N(v)`: circle messages whose signal equals `v`.
    pub occupancy: BTreeMap<u64, u64>,
    /// Values with `N(v) ≥ (1 − l·ε')·2^{(k−1)n}`.
    pub level_set: Vec<u64>,
}

impl FamilySets {
    fn build(values: impl Iterator<Item = u64>, threshold_num: i128, threshold_den: i128) -> Self {
        let mut occupancy = BTreeMap::new();
        for v in values {
            *occupancy.entry(v).or_insert(0) += 1;
        }
        let level_set = occupancy
            .iter()
            .filter(|(_, &c)| c as i128 * threshold_den >= threshold_num)
            .map(|(&v, _)| v)
            .collect();
        FamilySets { occupancy, level_set }
    }

    /// Values that occur at all (the per-branch projection of the circle set).
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.occupancy.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchSets {
    pub a: FamilySets,
    pub b: FamilySets,
    pub z_prime: FamilySets,
    /// For each `z'` value: the most frequent `b` value (smallest on ties)
    /// and its count among circle messages with that `z'`.
    pub argmax_b: BTreeMap<u64, (u64, u64)>,
    /// `Σ_{z'} (N(z') − |M(z', b̂_{z'})|)`.
    pub collision_excess: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignalSets {
    pub l: u64,
    pub n: u32,
    pub k: usize,
    pub circle_size: u64,
    pub a_circle: BTreeSet<Vec<u64>>,
    pub a_cross: u64,
    pub b_circle: BTreeSet<Vec<u64>>,
    pub b_cross: u64,
    pub z_prime_circle: BTreeSet<Vec<u64>>,
    pub branches: Vec<BranchSets>,
}

pub fn compute_signal_sets(
    code: &NetworkCode,
    inst: &NecInstance,
    classification: &MessageClassification,
    l: u64,
) -> Result<SignalSets> {
    if l == 0 {
        return Err(Error::Mismatch("l must be positive".into()));
    }
    let wiring = BranchWiring::from_instance(inst)?;
    let k = wiring.k();
    let n = code.n;
    if classification.message_bits != code.message_bits {
        return Err(Error::Mismatch("classification belongs to a different code".into()));
    }
    let sig = branch_signals(code, inst, &wiring)?;
    let circle = &classification.circle;
    let tuples = |pick: fn(&crate::reduction::BranchSignals) -> &Vec<u64>| -> BTreeSet<Vec<u64>> {
        circle
            .iter()
            .map(|&m| sig.iter().map(|s| pick(s)[m as usize]).collect())
            .collect()
    };
    let a_circle = tuples(|s| &s.a);
    let b_circle = tuples(|s| &s.b);
    let z_prime_circle = tuples(|s| &s.z_prime);
    let space = 1u64 << (k as u32 * n);

    // N(v)·2^{kn} ≥ (2^{kn} − 4·l·|bad|)·2^{(k−1)n}
    let total = classification.total() as i128;
    let bad = classification.bad.len() as i128;
    let threshold_num = (total - 4 * l as i128 * bad) * (1i128 << ((k as u32 - 1) * n));
    let threshold_den = total;

    let branches = sig
        .iter()
        .map(|s| {
            let fam = |vals: &Vec<u64>| {
                FamilySets::build(circle.iter().map(|&m| vals[m as usize]), threshold_num, threshold_den)
            };
            let mut joint: BTreeMap<u64, BTreeMap<u64, u64>> = BTreeMap::new();
            for &m in circle {
                *joint
                    .entry(s.z_prime[m as usize])
                    .or_default()
                    .entry(s.b[m as usize])
                    .or_insert(0) += 1;
            }
            let mut argmax_b = BTreeMap::new();
            let mut collision_excess = 0;
            for (&zp, counts) in &joint {
                // max count, smallest b on ties
                let (&b, &c) = counts
                    .iter()
                    .max_by(|(b1, c1), (b2, c2)| c1.cmp(c2).then(b2.cmp(b1)))
                    .expect("nonempty");
                let total: u64 = counts.values().sum();
                collision_excess += total - c;
                argmax_b.insert(zp, (b, c));
            }
            BranchSets {
                a: fam(&s.a),
                b: fam(&s.b),
                z_prime: fam(&s.z_prime),
                argmax_b,
                collision_excess,
            }
        })
        .collect();

    Ok(SignalSets {
        l,
        n,
        k,
        circle_size: circle.len() as u64,
        a_cross: space - a_circle.len() as u64,
        b_cross: space - b_circle.len() as u64,
        a_circle,
        b_circle,
        z_prime_circle,
        branches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub name: String,
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: Rational,
    pub relation: Relation,
    #[serde(serialize_with = "ser_ratio")]
    pub rhs: Rational,
    pub holds: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.serialize_str(&r.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }
}

impl BoundRow {
    fn new(name: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        let holds = match relation {
            Relation::AtMost => lhs <= rhs,
            Relation::AtLeast => lhs >= rhs,
        };
        BoundRow {
            name: name.into(),
            lhs,
            relation,
            rhs,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub malformed: Option<String>,
    pub rows: Vec<BoundRow>,
}

impl AuditReport {
    pub fn all_hold(&self) -> bool {
        self.malformed.is_none() && self.rows.iter().all(|r| r.holds)
    }

    pub fn row(&self, name: &str) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// Check the counting bounds on a classification and its signal sets.
pub fn audit_counting_bounds(classification: &MessageClassification, sets: &SignalSets, l: u64) -> AuditReport {
    if let Some(why) = classification.inconsistency() {
        return AuditReport {
            malformed: Some(format!("malformed classification: {why}")),
            rows: Vec::new(),
        };
    }
    if sets.circle_size != classification.circle.len() as u64 || sets.l != l || l == 0 {
        return AuditReport {
            malformed: Some("malformed classification: signal sets do not match".into()),
            rows: Vec::new(),
        };
    }
    let int = |v: u64| Rational::from_integer(v as i128);
    let total = int(classification.total());
    let eps = classification.epsilon();
    let eps_p = classification.epsilon_prime();
    let q = int(1 << sets.n);
    let level_rhs = (Rational::from_integer(1) - eps_p - Ratio::new(1, l as i128)) * q;

    let mut rows = vec![
        BoundRow::new("bad <= eps*2^kn", int(classification.bad.len() as u64), Relation::AtMost, eps * total),
        BoundRow::new(
            "poor <= 3*eps*2^kn",
            int(classification.poor.len() as u64),
            Relation::AtMost,
            eps * 3 * total,
        ),
        BoundRow::new(
            "circle >= (1-eps')*2^kn",
            int(classification.circle.len() as u64),
            Relation::AtLeast,
            (Rational::from_integer(1) - eps_p) * total,
        ),
        BoundRow::new("a_cross <= eps'*2^kn", int(sets.a_cross), Relation::AtMost, eps_p * total),
        BoundRow::new("b_cross <= eps'*2^kn", int(sets.b_cross), Relation::AtMost, eps_p * total),
    ];
    for (i, br) in sets.branches.iter().enumerate() {
        let j = i + 1;
        for (fam, name) in [(&br.a, "a"), (&br.b, "b"), (&br.z_prime, "z'")] {
            rows.push(BoundRow::new(
                format!("|{name}_level_{j}| >= (1-eps'-1/l)*2^n"),
                int(fam.level_set.len() as u64),
                Relation::AtLeast,
                level_rhs,
            ));
        }
        rows.push(BoundRow::new(
            format!("collision_excess_{j} <= 2*b_cross"),
            int(br.collision_excess),
            Relation::AtMost,
            int(2 * sets.b_cross),
        ));
    }
    AuditReport { malformed: None, rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChainCheck {
    Verified { chain: BijectionChain },
    Violated { branch: usize, relation: String, witnesses: (u64, u64) },
}

/// Verify the zero-pattern bijection chain on every branch, or report the
/// first violated relation with two witness messages.
pub fn check_bijections(code: &NetworkCode, inst: &NecInstance) -> Result<ChainCheck> {
    match bijection_chain(code, inst) {
        Ok(chain) => Ok(ChainCheck::Verified { chain }),
        Err(Error::ChainViolated { branch, relation, m1, m2 }) => Ok(ChainCheck::Violated {
            branch,
            relation,
            witnesses: (m1, m2),
        }),
        Err(e) => Err(e),
    }
}
