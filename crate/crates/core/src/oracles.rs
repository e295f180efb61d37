//! Brute-force solvers for the source problems and end-to-end checks of the
//! reductions against them.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::adversary::worst_case;
use crate::cnf::CnfFormula;
use crate::error::{Error, Result};
use crate::model::{arcs_cost, NeighborhoodKind, Path, Stage};
use crate::rational::{self, Rational};
use crate::reductions::{
    reduce_hp_continuous_with_budget, reduce_hp_discrete, reduce_max3sat, SimpleDigraph,
};
use crate::solver::{solve, SolveOptions};

/// Largest variable count accepted by [`max3sat_oracle`].
pub const MAX3SAT_VARIABLE_LIMIT: usize = 20;

/// A Hamiltonian path as a node sequence, found by backtracking from each
/// start node in increasing order.
pub fn hp_oracle(g: &SimpleDigraph) -> Option<Vec<usize>> {
    let n = g.node_count();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for (u, v) in g.arcs() {
        succ[u].push(v);
        pred[v].push(u);
    }
    // A path has one start and one end, so at most one node may lack a
    // predecessor and at most one a successor.
    let sources: Vec<usize> = (0..n).filter(|&v| pred[v].is_empty()).collect();
    let sinks = (0..n).filter(|&v| succ[v].is_empty()).count();
    if n > 1 && (sources.len() > 1 || sinks > 1) {
        return None;
    }
    let starts: Vec<usize> = if sources.len() == 1 { sources } else { (0..n).collect() };

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in starts {
        visited[start] = true;
        order.push(start);
        if extend(&succ, &pred, &mut visited, &mut order) {
            return Some(order);
        }
        order.pop();
        visited[start] = false;
    }
    None
}

fn extend(succ: &[Vec<usize>], pred: &[Vec<usize>], visited: &mut [bool], order: &mut Vec<usize>) -> bool {
    let n = succ.len();
    if order.len() == n {
        return true;
    }
    let cur = *order.last().expect("nonempty");
    // Every unvisited node still has to be entered from the current node or
    // from another unvisited node.
    let stranded = (0..n).any(|v| !visited[v] && pred[v].iter().all(|&u| visited[u] && u != cur));
    if stranded {
        return false;
    }
    for &v in &succ[cur] {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        order.push(v);
        if extend(succ, pred, visited, order) {
            return true;
        }
        order.pop();
        visited[v] = false;
    }
    false
}

/// The maximum number of simultaneously satisfiable clauses and the first
/// assignment reaching it, counting assignments in binary with x1 as the
/// least significant bit.
pub fn max3sat_oracle(formula: &CnfFormula) -> Result<(usize, Vec<bool>)> {
    let n = formula.variable_count();
    if n > MAX3SAT_VARIABLE_LIMIT {
        return Err(Error::TooManyVariables {
            variables: n,
            limit: MAX3SAT_VARIABLE_LIMIT,
        });
    }
    let mut best = (0, None);
    for bits in 0u32..(1u32 << n) {
        let assignment = assignment_from_bits(bits, n);
        let count = formula.satisfied_count(&assignment);
        if best.1.is_none() || count > best.0 {
            best = (count, Some(assignment));
        }
    }
    Ok((best.0, best.1.expect("at least the empty assignment")))
}

/// Variable `i` (zero-based) is true when bit `i` is set.
pub fn assignment_from_bits(bits: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// Budget model for [`verify_hp_reduction`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HpBudget {
    Continuous(Rational),
    Discrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn serialize_rational<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(value))
}

/// Outcome of a reduction check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Short description of the source instance.
    pub instance: String,
    #[serde(serialize_with = "serialize_rational")]
    pub opt: Rational,
    /// The value the optimum is compared against.
    #[serde(serialize_with = "serialize_rational")]
    pub threshold: Rational,
    /// What the source-problem oracle reported.
    pub oracle_answer: String,
    pub verdict: Verdict,
    /// One entry per failed check.
    #[serde(skip)]
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Builds the layered instance for `g`, solves it and compares against
/// [`hp_oracle`]. Continuous: a Hamiltonian path exists iff the optimum is at
/// most `Γ/n`, in which case it equals `Γ/n`; otherwise it is at least
/// `Γ/(n-1)`. Discrete: a Hamiltonian path exists iff the optimum is 0, and
/// it is 1 otherwise.
pub fn verify_hp_reduction(
    g: &SimpleDigraph,
    kind: NeighborhoodKind,
    budget: &HpBudget,
    opts: &SolveOptions,
) -> Result<VerificationReport> {
    let n = g.node_count();
    let (inst, meta) = match budget {
        HpBudget::Continuous(gamma) => reduce_hp_continuous_with_budget(g, kind, gamma.clone())?,
        HpBudget::Discrete => reduce_hp_discrete(g, kind)?,
    };
    let opt = solve(&inst, opts)?.opt;
    let hp = hp_oracle(g);
    let threshold = meta.threshold.clone();
    let mut failures = Vec::new();
    let within = opt <= threshold;
    if hp.is_some() != within {
        failures.push(format!(
            "Hamiltonian path {} but OPT = {opt} is {} the threshold {threshold}",
            if hp.is_some() { "exists" } else { "does not exist" },
            if within { "within" } else { "above" },
        ));
    }
    match (budget, hp.is_some()) {
        (HpBudget::Continuous(_), true) if opt != threshold => {
            failures.push(format!("expected OPT = {threshold}, got {opt}"));
        }
        (HpBudget::Continuous(gamma), false) => {
            let lower = gamma / rational::from_usize(n - 1);
            if opt < lower {
                failures.push(format!("expected OPT >= {lower}, got {opt}"));
            }
        }
        (HpBudget::Discrete, false) if opt != rational::one() => {
            failures.push(format!("expected OPT = 1, got {opt}"));
        }
        _ => {}
    }
    let oracle_answer = match &hp {
        Some(order) => {
            let nodes: Vec<String> = order.iter().map(|v| (v + 1).to_string()).collect();
            format!("hamiltonian path {}", nodes.join(" "))
        }
        None => "no hamiltonian path".to_string(),
    };
    Ok(VerificationReport {
        instance: format!("digraph n={} arcs={} kind={} budget={}", n, g.arc_count(), kind.as_str(), inst.budget),
        opt,
        threshold,
        oracle_answer,
        verdict: Verdict::from_bool(failures.is_empty()),
        failures,
    })
}

/// Builds the clause-gadget instance, solves it and checks
/// `OPT = 1/s_max^q` against [`max3sat_oracle`], then checks for every
/// assignment `a` that its solid path costs exactly `1/s(a)^q` where `s(a)`
/// counts the clauses it satisfies.
pub fn verify_sat_reduction(
    formula: &CnfFormula,
    q: usize,
    kind: NeighborhoodKind,
    opts: &SolveOptions,
) -> Result<VerificationReport> {
    let (inst, meta) = reduce_max3sat(formula, q, kind)?;
    let opt = solve(&inst, opts)?.opt;
    let (s_max, best) = max3sat_oracle(formula)?;
    let power = |s: usize| -> Result<Rational> {
        let p = s.checked_pow(q as u32).ok_or_else(|| Error::Precondition("clause count overflows".into()))?;
        Ok(rational::from_usize(p))
    };
    let threshold = rational::one() / power(s_max)?;
    let mut failures = Vec::new();
    if opt != threshold {
        failures.push(format!("expected OPT = {threshold}, got {opt}"));
    }
    let n = formula.variable_count();
    for bits in 0u32..(1u32 << n) {
        let a = assignment_from_bits(bits, n);
        let arcs = meta.solid_path_codec.encode(&a);
        let x = Path::new(&inst.graph, arcs)?;
        let first = arcs_cost(&inst.graph, x.arcs(), Stage::First)?;
        let value = first + worst_case(&inst, &x, &opts.adversary)?.value;
        let expected = rational::one() / power(formula.satisfied_count(&a))?;
        if value != expected {
            failures.push(format!("assignment {}: expected {expected}, got {value}", format_assignment(&a)));
        }
    }
    Ok(VerificationReport {
        instance: format!(
            "cnf n={} m={} q={} kind={}",
            n,
            formula.clause_count(),
            q,
            kind.as_str()
        ),
        opt,
        threshold,
        oracle_answer: format!("s_max {} at {}", s_max, format_assignment(&best)),
        verdict: Verdict::from_bool(failures.is_empty()),
        failures,
    })
}

/// `0`/`1` characters in variable order.
pub fn format_assignment(a: &[bool]) -> String {
    a.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
