//! Command-line surface. [`run`] parses arguments, executes one command and
//! returns the exit code with a JSON report: 0 for success (feasible, holds,
//! verified), 1 for a verified negative answer, 2 for usage errors and
//! refusals.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::audit::{audit_counting_bounds, check_bijections, classify_messages, compute_signal_sets, ChainCheck};
use crate::code::NetworkCode;
use crate::engine::{check_unicast_zero_error, check_zero_error, UnicastVerdict, ZeroErrorVerdict};
use crate::error::Error;
use crate::flow::{min_cut, unicast_cut_check};
use crate::info::{edge_joint_distribution, information_lower_bound, BoundParams, MessageDistribution};
use crate::io::{read_code, read_instance, write_code, write_instance, Instance};
use crate::oracle::{search_nec, search_unicast, SearchBudget, Verdict};
use crate::par;
use crate::reduction::{extract_code, lift_code, lift_code_unchecked, reduce, BranchWiring};

#[derive(Debug, Parser)]
#[command(name = "necred", version, about = "Multiple-unicast to network error correction reduction toolkit")]
struct Cli {
    /// Worker threads for exhaustive passes (1 = sequential).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Dist {
    Uniform,
    /// Uniform over messages that are good and not poor.
    Circle,
    UniformA,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the error-correction instance of a unicast instance.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a zero-error unicast code to the reduced instance.
    Lift {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lift even when the unicast code is not zero-error.
        #[arg(long)]
        force: bool,
    },
    /// Recover a unicast code from a zero-error code on a reduced instance.
    Extract {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive zero-error check.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
    },
    /// Split messages into good, bad, poor and circle sets.
    Classify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
    },
    /// Check the counting bounds and the bijection chain.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = 2)]
        l: u64,
    },
    /// Brute-force feasibility search.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Message bits per symbol for error-correction instances
        /// (default: branch count of a reduced instance, else 1).
        #[arg(long)]
        rate_bits: Option<u32>,
        /// Cap on table-entry assignments.
        #[arg(long)]
        budget: Option<u64>,
        /// Wall-clock cap in seconds.
        #[arg(long)]
        seconds: Option<f64>,
        /// Candidate witness to verify before searching.
        #[arg(long)]
        hint: Option<PathBuf>,
        /// Search the full table space instead of first-occurrence-ordered tables.
        #[arg(long)]
        no_symmetry: bool,
    },
    /// Entropy and mutual information of edge signals.
    Info {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        /// Comma-separated edge ids.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<String>,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: Dist,
    },
    /// Evaluate the finite-length information lower bound.
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        l: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long)]
        uniform_a: bool,
    },
    /// Minimum cuts of an instance.
    Mincut {
        #[arg(long)]
        instance: PathBuf,
    },
}

/// Exit code and JSON report for one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> (i32, Value)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return (code, json!({ "status": "usage", "message": e.to_string() }));
        }
    };
    let jobs = cli.jobs;
    let command = cli.command;
    let result = par::with_jobs(jobs, move || dispatch(command));
    match result {
        Ok((ok, report)) => (if ok { 0 } else { 1 }, report),
        Err(e) => {
            let negative = matches!(e, Error::PremiseViolated(_) | Error::ChainViolated { .. });
            let status = if negative { "negative" } else { "refused" };
            (if negative { 1 } else { 2 }, json!({ "status": status, "error": e.to_string() }))
        }
    }
}

type Outcome = Result<(bool, Value), Error>;

fn unicast(path: &Path) -> Result<crate::graph::UnicastInstance, Error> {
    match read_instance(path)? {
        Instance::Unicast(i) => Ok(i),
        Instance::Nec(_) => Err(Error::Parse(format!("{}: expected a unicast instance", path.display()))),
    }
}

fn nec(path: &Path) -> Result<crate::graph::NecInstance, Error> {
    match read_instance(path)? {
        Instance::Nec(i) => Ok(i),
        Instance::Unicast(_) => Err(Error::Parse(format!("{}: expected an error-correction instance", path.display()))),
    }
}

fn write_out_code(out: &Option<PathBuf>, code: &NetworkCode) -> Result<Value, Error> {
    match out {
        Some(p) => {
            write_code(p, code)?;
            Ok(json!(p.display().to_string()))
        }
        None => Ok(Value::Null),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Reduce { instance, out } => {
            let inst = unicast(&instance)?;
            let r = reduce(&inst)?;
            let g = &r.instance.graph;
            let cut = min_cut(g, &r.instance.source, &r.instance.terminal)?;
            let written = match &out {
                Some(p) => {
                    write_instance(p, &Instance::Nec(r.instance.clone()))?;
                    json!(p.display().to_string())
                }
                None => Value::Null,
            };
            Ok((
                true,
                json!({
                    "command": "reduce",
                    "status": "ok",
                    "nodes": g.node_count(),
                    "edges": g.edge_count(),
                    "adversary_sets": r.instance.adversary.len(),
                    "min_cut": cut.value,
                    "wiring": to_value(&r.wiring),
                    "out": written,
                }),
            ))
        }
        Command::Lift {
            instance,
            code,
            out,
            force,
        } => {
            let inst = unicast(&instance)?;
            let ucode = read_code(&code)?;
            let r = reduce(&inst)?;
            match lift_code(&ucode, &r) {
                Ok(lifted) => {
                    let written = write_out_code(&out, &lifted)?;
                    Ok((true, json!({ "command": "lift", "status": "ok", "out": written })))
                }
                Err(Error::PremiseViolated(why)) => {
                    let verdict = unicast_verdict(&check_unicast_zero_error(&ucode, &inst)?);
                    let written = if force {
                        write_out_code(&out, &lift_code_unchecked(&ucode, &r)?)?
                    } else {
                        Value::Null
                    };
                    Ok((
                        false,
                        json!({
                            "command": "lift",
                            "status": "premise_violated",
                            "message": why,
                            "counterexample": verdict,
                            "out": written,
                        }),
                    ))
                }
                Err(e) => Err(e),
            }
        }
        Command::Extract { instance, code, out } => {
            let inst = nec(&instance)?;
            let ncode = read_code(&code)?;
            let ex = extract_code(&ncode, &inst)?;
            let ok = check_unicast_zero_error(&ex.code, &ex.instance)?;
            let written = write_out_code(&out, &ex.code)?;
            Ok((
                ok.is_ok(),
                json!({
                    "command": "extract",
                    "status": if ok.is_ok() { "ok" } else { "extracted_code_fails" },
                    "chain": to_value(&ex.chain),
                    "unicast_check": unicast_verdict(&ok),
                    "out": written,
                }),
            ))
        }
        Command::Verify { instance, code } => {
            let code = read_code(&code)?;
            match read_instance(&instance)? {
                Instance::Unicast(inst) => {
                    let v = check_unicast_zero_error(&code, &inst)?;
                    Ok((v.is_ok(), json!({ "command": "verify", "result": unicast_verdict(&v) })))
                }
                Instance::Nec(inst) => {
                    let v = check_zero_error(&code, &inst)?;
                    Ok((v.is_ok(), json!({ "command": "verify", "result": nec_verdict(&v) })))
                }
            }
        }
        Command::Classify { instance, code } => {
            let inst = nec(&instance)?;
            let code = read_code(&code)?;
            let c = classify_messages(&code, &inst)?;
            let eps = c.epsilon();
            Ok((
                true,
                json!({
                    "command": "classify",
                    "status": "ok",
                    "total": c.total(),
                    "good": c.good.len(),
                    "bad": c.bad.len(),
                    "poor": c.poor.len(),
                    "circle": c.circle.len(),
                    "epsilon": format!("{}/{}", eps.numer(), eps.denom()),
                    "classification": to_value(&c),
                }),
            ))
        }
        Command::Audit { instance, code, l } => {
            let inst = nec(&instance)?;
            let code = read_code(&code)?;
            let c = classify_messages(&code, &inst)?;
            let sets = compute_signal_sets(&code, &inst, &c, l)?;
            let report = audit_counting_bounds(&c, &sets, l);
            let chain = check_bijections(&code, &inst)?;
            let holds = report.all_hold();
            Ok((
                holds,
                json!({
                    "command": "audit",
                    "status": if holds { "holds" } else { "violated" },
                    "report": to_value(&report),
                    "bijections": to_value(&chain),
                    "zero_error": matches!(chain, ChainCheck::Verified { .. }),
                }),
            ))
        }
        Command::Oracle {
            instance,
            n,
            rate_bits,
            budget,
            seconds,
            hint,
            no_symmetry,
        } => {
            let mut b = SearchBudget::default().with_symmetry(!no_symmetry);
            if let Some(max) = budget {
                b.max_codes = max;
            }
            if let Some(s) = seconds {
                b.max_seconds = s;
            }
            let report = match read_instance(&instance)? {
                Instance::Unicast(inst) => search_unicast(&inst, n, b)?,
                Instance::Nec(inst) => {
                    let rate = match rate_bits {
                        Some(r) => r,
                        None => BranchWiring::from_instance(&inst).map_or(1, |w| w.k() as u32),
                    };
                    let hint = hint.as_deref().map(read_code).transpose()?;
                    search_nec(&inst, rate, n, b, hint.as_ref())?
                }
            };
            if let Verdict::Exhausted { .. } = report.verdict {
                return Err(Error::TooLarge {
                    size: format!("code space {}", report.code_space),
                    limit: format!("{} candidates", b.max_codes),
                });
            }
            Ok((
                report.verdict.is_feasible(),
                json!({
                    "command": "oracle",
                    "status": report.verdict.describe(),
                    "report": to_value(&report),
                }),
            ))
        }
        Command::Info {
            instance,
            code,
            x,
            z,
            dist,
        } => {
            let inst = read_instance(&instance)?;
            let code = read_code(&code)?;
            let mode = match dist {
                Dist::Uniform => MessageDistribution::Uniform,
                Dist::UniformA => MessageDistribution::UniformA,
                Dist::Circle => {
                    let Instance::Nec(i) = &inst else {
                        return Err(Error::NotReduced);
                    };
                    MessageDistribution::UniformOver(classify_messages(&code, i)?.circle)
                }
            };
            let edges: Vec<&str> = x.iter().chain(&z).map(String::as_str).collect();
            let d = edge_joint_distribution(&code, inst.as_problem(), &edges, &mode)?;
            let xs: Vec<&str> = x.iter().map(String::as_str).collect();
            let zs: Vec<&str> = z.iter().map(String::as_str).collect();
            Ok((
                true,
                json!({
                    "command": "info",
                    "status": "ok",
                    "h_x": d.entropy(&xs)?,
                    "h_z": d.entropy(&zs)?,
                    "h_xz": d.entropy(&edges)?,
                    "mutual_information": d.mutual_information(&xs, &zs)?,
                    "support_size": d.support_size(),
                    "distribution": to_value(&d),
                }),
            ))
        }
        Command::Bound { n, eps, l, k, uniform_a } => {
            let p = BoundParams { n, eps, l, k, uniform_a };
            let v = information_lower_bound(&p)?;
            Ok((
                !v.vacuous,
                json!({
                    "command": "bound",
                    "status": if v.vacuous { "vacuous" } else { "ok" },
                    "params": to_value(&p),
                    "bound": to_value(&v),
                }),
            ))
        }
        Command::Mincut { instance } => match read_instance(&instance)? {
            Instance::Unicast(inst) => {
                let cuts = unicast_cut_check(&inst)?;
                Ok((true, json!({ "command": "mincut", "status": "ok", "pair_cuts": cuts })))
            }
            Instance::Nec(inst) => {
                let cut = min_cut(&inst.graph, &inst.source, &inst.terminal)?;
                Ok((true, json!({ "command": "mincut", "status": "ok", "cut": to_value(&cut) })))
            }
        },
    }
}

fn unicast_verdict(v: &UnicastVerdict) -> Value {
    match v {
        UnicastVerdict::Ok => json!({ "status": "ok" }),
        UnicastVerdict::Counterexample { messages, failing } => json!({
            "status": "counterexample",
            "messages": messages,
            "failing": failing,
        }),
    }
}

fn nec_verdict(v: &ZeroErrorVerdict) -> Value {
    match v {
        ZeroErrorVerdict::Ok => json!({ "status": "ok" }),
        ZeroErrorVerdict::Counterexample {
            message,
            pattern,
            decoded,
        } => json!({
            "status": "counterexample",
            "message": message,
            "pattern": to_value(pattern),
            "decoded": decoded,
        }),
    }
}
