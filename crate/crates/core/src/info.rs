//! Discrete entropy and mutual information over finite joint pmfs, the
//! three-variable information inequality, edge-signal distributions of a
//! code, and the finite-length lower bound on `I(z_i; z'_i)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::code::NetworkCode;
use crate::engine::{guard_size, Compiled, ProblemRef};
use crate::error::{Error, Result};
use crate::par;
use crate::reduction::BranchWiring;

/// Comparison tolerance for information quantities.
pub const TOLERANCE: f64 = 1e-9;
/// Allowed deviation of a pmf's total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    variables: Vec<String>,
    #[serde(serialize_with = "ser_pmf")]
    pmf: BTreeMap<Vec<u64>, f64>,
}

fn ser_pmf<S: serde::Serializer>(pmf: &BTreeMap<Vec<u64>, f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(pmf.len()))?;
    for (k, p) in pmf {
        seq.serialize_element(&(k, p))?;
    }
    seq.end()
}

impl JointDistribution {
    pub fn new(variables: Vec<String>, pmf: BTreeMap<Vec<u64>, f64>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = variables.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::InvalidDistribution(format!("duplicate variable `{dup}`")));
        }
        let mut total = 0.0;
        for (k, &p) in &pmf {
            if k.len() != variables.len() {
                return Err(Error::InvalidDistribution(format!(
                    "tuple of length {} for {} variables",
                    k.len(),
                    variables.len()
                )));
            }
            if p.is_nan() || p < 0.0 || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("probability {p} is not a nonnegative number")));
            }
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("total mass {total} differs from 1")));
        }
        Ok(JointDistribution { variables, pmf })
    }

    /// Normalize nonnegative weights into a distribution.
    pub fn from_weights(variables: Vec<String>, weights: BTreeMap<Vec<u64>, f64>) -> Result<Self> {
        let total: f64 = weights.values().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        let pmf = weights.into_iter().map(|(k, w)| (k, w / total)).collect();
        Self::new(variables, pmf)
    }

    /// Uniform distribution over the given tuples (duplicates count once).
    pub fn uniform(variables: Vec<String>, support: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        Self::from_weights(variables, support.into_iter().map(|t| (t, 1.0)).collect())
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn pmf(&self) -> &BTreeMap<Vec<u64>, f64> {
        &self.pmf
    }

    pub fn support_size(&self) -> usize {
        self.pmf.values().filter(|&&p| p > 0.0).count()
    }

    fn positions(&self, vars: &[&str]) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = Vec::with_capacity(vars.len());
        for v in vars {
            let i = self
                .variables
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
            if !out.contains(&i) {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn marginal(&self, vars: &[&str]) -> Result<JointDistribution> {
        let pos = self.positions(vars)?;
        let mut pmf: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for (k, &p) in &self.pmf {
            *pmf.entry(pos.iter().map(|&i| k[i]).collect()).or_insert(0.0) += p;
        }
        Ok(JointDistribution {
            variables: pos.iter().map(|&i| self.variables[i].clone()).collect(),
            pmf,
        })
    }

    /// Shannon entropy in bits of the marginal on `vars`.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        let m = self.marginal(vars)?;
        Ok(m.pmf.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
    }

    /// `I(X; Z) = H(X) + H(Z) − H(X, Z)`.
    pub fn mutual_information(&self, x: &[&str], z: &[&str]) -> Result<f64> {
        let xz: Vec<&str> = x.iter().chain(z).copied().collect();
        Ok(self.entropy(x)? + self.entropy(z)? - self.entropy(&xz)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleCheck {
    /// `I(X; Z)`
    pub lhs: f64,
    /// `I(X; Y) + I(Y; Z) − H(Y)`
    pub rhs: f64,
    pub holds: bool,
}

/// Check `I(X;Z) ≥ I(X;Y) + I(Y;Z) − H(Y)` within [`TOLERANCE`].
pub fn triangle_bound_check(dist: &JointDistribution, x: &[&str], y: &[&str], z: &[&str]) -> Result<TriangleCheck> {
    let lhs = dist.mutual_information(x, z)?;
    let rhs = dist.mutual_information(x, y)? + dist.mutual_information(y, z)? - dist.entropy(y)?;
    Ok(TriangleCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "messages", rename_all = "snake_case")]
pub enum MessageDistribution {
    /// Every message equally likely.
    Uniform,
    /// Uniform over the listed messages.
    UniformOver(Vec<u64>),
    /// On a reduced instance: the `a` edges carry a uniform tuple in
    /// `[2^n]^k` regardless of the message.
    UniformA,
}

/// Joint pmf of the received signals on `edges` under error-free operation.
pub fn edge_joint_distribution<'a>(
    code: &NetworkCode,
    problem: impl Into<ProblemRef<'a>>,
    edges: &[&str],
    dist: &MessageDistribution,
) -> Result<JointDistribution> {
    let problem = problem.into();
    let c = Compiled::new(code, problem)?;
    let g = problem.graph();
    let ids: Vec<usize> = edges
        .iter()
        .map(|e| g.edge_index(e).ok_or_else(|| Error::UnknownVariable(e.to_string())))
        .collect::<Result<_>>()?;
    let vars: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
    let project = |rx: &[u64]| ids.iter().map(|&e| rx[e]).collect::<Vec<u64>>();

    let samples: Vec<Vec<u64>> = match dist {
        MessageDistribution::Uniform => {
            guard_size(c.message_count(), 1)?;
            par::map_collect(0..c.message_count(), |m| project(&c.received(m, &[])))
        }
        MessageDistribution::UniformOver(ms) => {
            if ms.is_empty() {
                return Err(Error::InvalidDistribution("empty message set".into()));
            }
            if let Some(m) = ms.iter().find(|&&m| m >= c.message_count()) {
                return Err(Error::InvalidDistribution(format!("message {m} out of range")));
            }
            par::map_collect_in(ms, |&m| project(&c.received(m, &[])))
        }
        MessageDistribution::UniformA => {
            let ProblemRef::Nec(inst) = problem else {
                return Err(Error::NotReduced);
            };
            let wiring = BranchWiring::from_instance(inst)?;
            let a: Vec<usize> = wiring
                .branches
                .iter()
                .map(|b| g.edge_index(&b.a).expect("wired"))
                .collect();
            let bits: u32 = a.iter().map(|&e| c.widths[e]).sum();
            if bits > 40 {
                return Err(Error::TooLarge {
                    size: format!("2^{bits} a-tuples"),
                    limit: "2^40".into(),
                });
            }
            guard_size(1 << bits, 1)?;
            par::map_collect(0..1u64 << bits, |t| {
                let mut rest = t;
                let over: Vec<(usize, u64)> = a
                    .iter()
                    .map(|&e| {
                        let w = c.widths[e];
                        let v = rest & ((1 << w) - 1);
                        rest >>= w;
                        (e, v)
                    })
                    .collect();
                let mut tx = vec![0; c.edge_count()];
                let mut rx = vec![0; c.edge_count()];
                c.run(0, &[], &over, &mut tx, &mut rx);
                project(&rx)
            })
        }
    };
    let mut weights: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    for s in samples {
        *weights.entry(s).or_insert(0.0) += 1.0;
    }
    JointDistribution::from_weights(vars, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: u64,
    pub eps: f64,
    pub l: u64,
    pub k: u64,
    /// Apply the `(1 − ε')` factor for a uniform `a` tuple.
    pub uniform_a: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub eps_prime: f64,
    /// `None` when `ε' ≥ 1` or `l·ε' ≥ 1`.
    pub value: Option<f64>,
    /// No information is guaranteed (value missing or not positive).
    pub vacuous: bool,
}

/// Lower bound on `I(z_i; z'_i)` in bits for a code with worst-case error
/// probability `ε`, with `ε' = 4ε`:
///
/// `(1−ε'−1/l)(1−lε')(n + log2(1−ε')) − (1/l + lε')n − ε'n/((1−ε')(1−lε'))
///  − 1 − 2kε'n/(1−ε')`, times `(1 − ε')` under `uniform_a`.
pub fn information_lower_bound(p: &BoundParams) -> Result<BoundValue> {
    if p.l == 0 || p.n == 0 || p.k == 0 || p.eps.is_nan() || p.eps < 0.0 || !p.eps.is_finite() {
        return Err(Error::InvalidDistribution(
            "bound parameters need n, l, k ≥ 1 and ε ≥ 0".into(),
        ));
    }
    let e = 4.0 * p.eps;
    let (n, l, k) = (p.n as f64, p.l as f64, p.k as f64);
    if e >= 1.0 || l * e >= 1.0 {
        return Ok(BoundValue {
            eps_prime: e,
            value: None,
            vacuous: true,
        });
    }
    let mut v = (1.0 - e - 1.0 / l) * (1.0 - l * e) * (n + (1.0 - e).log2())
        - (1.0 / l + l * e) * n
        - e * n / ((1.0 - e) * (1.0 - l * e))
        - 1.0
        - 2.0 * k * e * n / (1.0 - e);
    if p.uniform_a {
        v *= 1.0 - e;
    }
    Ok(BoundValue {
        eps_prime: e,
        value: Some(v),
        vacuous: v <= 0.0,
    })
}
