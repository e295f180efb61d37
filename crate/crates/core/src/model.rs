//! Problem data: acyclic multigraphs with interval costs, recovery rules,
//! budgets, paths and scenarios.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default cap on the number of s-t paths any enumeration may produce.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub u32);

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Drawing role of an arc in the generated reduction graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcRole {
    Vertical,
    Diagonal,
    Dashed,
    Dotted,
    SolidNormal,
    SolidFat,
    Plain,
}

impl ArcRole {
    pub const ALL: [ArcRole; 7] = [
        ArcRole::Vertical,
        ArcRole::Diagonal,
        ArcRole::Dashed,
        ArcRole::Dotted,
        ArcRole::SolidNormal,
        ArcRole::SolidFat,
        ArcRole::Plain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArcRole::Vertical => "vertical",
            ArcRole::Diagonal => "diagonal",
            ArcRole::Dashed => "dashed",
            ArcRole::Dotted => "dotted",
            ArcRole::SolidNormal => "solid-normal",
            ArcRole::SolidFat => "solid-fat",
            ArcRole::Plain => "plain",
        }
    }

    pub fn is_solid(self) -> bool {
        matches!(self, ArcRole::SolidNormal | ArcRole::SolidFat)
    }
}

impl FromStr for ArcRole {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ArcRole::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown arc role {s:?}"))
    }
}

impl fmt::Display for ArcRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub tail: usize,
    pub head: usize,
    /// First-stage cost `C_e`.
    pub first_stage_cost: Rational,
    /// Nominal second-stage cost; the realized cost lies in
    /// `[nominal, nominal + deviation_cap]`.
    pub nominal: Rational,
    pub deviation_cap: Rational,
    pub role: Option<ArcRole>,
}

impl Arc {
    /// An arc with all costs zero and no role.
    pub fn new(id: u32, tail: usize, head: usize) -> Self {
        Arc {
            id: ArcId(id),
            tail,
            head,
            first_stage_cost: Rational::zero(),
            nominal: Rational::zero(),
            deviation_cap: Rational::zero(),
            role: None,
        }
    }

    pub fn with_costs(mut self, first_stage: Rational, nominal: Rational, deviation_cap: Rational) -> Self {
        self.first_stage_cost = first_stage;
        self.nominal = nominal;
        self.deviation_cap = deviation_cap;
        self
    }

    pub fn with_role(mut self, role: ArcRole) -> Self {
        self.role = Some(role);
        self
    }
}

/// Acyclic multigraph with distinguished source and sink. Arcs are kept
/// sorted by id; parallel arcs are distinct arcs.
#[derive(Clone, Debug)]
pub struct Digraph {
    node_count: usize,
    arcs: Vec<Arc>,
    source: usize,
    sink: usize,
    index: HashMap<ArcId, usize>,
    out: Vec<Vec<usize>>,
    order: std::result::Result<Vec<usize>, Vec<usize>>,
    reaches_sink: Vec<bool>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count
            && self.source == other.source
            && self.sink == other.sink
            && self.arcs == other.arcs
    }
}

impl Digraph {
    /// Builds the graph. Fails on duplicate arc ids or out-of-range
    /// endpoints; cycles and cost signs are reported by [`validate_instance`].
    pub fn new(node_count: usize, mut arcs: Vec<Arc>, source: usize, sink: usize) -> Result<Self> {
        for terminal in [source, sink] {
            if terminal >= node_count {
                return Err(Error::TerminalOutOfRange {
                    node: terminal,
                    node_count,
                });
            }
        }
        arcs.sort_by_key(|a| a.id);
        let mut index = HashMap::with_capacity(arcs.len());
        let mut out = vec![Vec::new(); node_count];
        for (i, arc) in arcs.iter().enumerate() {
            for node in [arc.tail, arc.head] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange {
                        arc: arc.id,
                        node,
                        node_count,
                    });
                }
            }
            if index.insert(arc.id, i).is_some() {
                return Err(Error::DuplicateArc(arc.id));
            }
            out[arc.tail].push(i);
        }
        let order = kahn_order(node_count, &arcs);
        let reaches_sink = reverse_reachability(node_count, &arcs, sink);
        Ok(Digraph {
            node_count,
            arcs,
            source,
            sink,
            index,
            out,
            order,
            reaches_sink,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// All arcs in ascending id order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> Option<&Arc> {
        self.index.get(&id).map(|&i| &self.arcs[i])
    }

    pub(crate) fn arc_index(&self, id: ArcId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Outgoing arcs of `node` in ascending id order.
    pub fn out_arcs(&self, node: usize) -> impl Iterator<Item = &Arc> + '_ {
        self.out[node].iter().map(move |&i| &self.arcs[i])
    }

    pub(crate) fn out_indices(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    /// Whether some path leads from `node` to the sink.
    pub fn reaches_sink(&self, node: usize) -> bool {
        self.reaches_sink[node]
    }

    pub fn is_acyclic(&self) -> bool {
        self.order.is_ok()
    }

    /// Nodes in topological order, ties broken by ascending node id.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        self.order.clone().map_err(Error::Cycle)
    }

    pub(crate) fn order_slice(&self) -> Result<&[usize]> {
        self.order.as_deref().map_err(|c| Error::Cycle(c.clone()))
    }
}

fn kahn_order(node_count: usize, arcs: &[Arc]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let mut indegree = vec![0usize; node_count];
    let mut succ = vec![Vec::new(); node_count];
    for arc in arcs {
        indegree[arc.head] += 1;
        succ[arc.tail].push(arc.head);
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..node_count)
        .filter(|&v| indegree[v] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(node_count);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    if order.len() == node_count {
        return Ok(order);
    }
    // Every node left over has a predecessor that is also left over, so
    // walking predecessors from any of them must revisit a node.
    let mut pred = vec![None; node_count];
    for arc in arcs {
        if indegree[arc.head] > 0 && indegree[arc.tail] > 0 && pred[arc.head].is_none() {
            pred[arc.head] = Some(arc.tail);
        }
    }
    let start = (0..node_count).find(|&v| indegree[v] > 0).expect("leftover node");
    let mut seen = vec![usize::MAX; node_count];
    let mut walk = Vec::new();
    let mut v = start;
    while seen[v] == usize::MAX {
        seen[v] = walk.len();
        walk.push(v);
        v = pred[v].expect("leftover node has a leftover predecessor");
    }
    let mut cycle = walk[seen[v]..].to_vec();
    cycle.reverse();
    Err(cycle)
}

fn reverse_reachability(node_count: usize, arcs: &[Arc], sink: usize) -> Vec<bool> {
    let mut pred = vec![Vec::new(); node_count];
    for arc in arcs {
        pred[arc.head].push(arc.tail);
    }
    let mut seen = vec![false; node_count];
    let mut stack = vec![sink];
    seen[sink] = true;
    while let Some(v) = stack.pop() {
        for &u in &pred[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NeighborhoodKind {
    /// At most `k` arcs of the recovery path lie outside the first-stage path.
    Incl,
    /// At most `k` arcs of the first-stage path are abandoned.
    Excl,
    /// The symmetric difference has at most `k` arcs.
    Sym,
}

impl NeighborhoodKind {
    pub const ALL: [NeighborhoodKind; 3] = [NeighborhoodKind::Incl, NeighborhoodKind::Excl, NeighborhoodKind::Sym];

    pub fn as_str(self) -> &'static str {
        match self {
            NeighborhoodKind::Incl => "incl",
            NeighborhoodKind::Excl => "excl",
            NeighborhoodKind::Sym => "sym",
        }
    }
}

impl FromStr for NeighborhoodKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "incl" => Ok(NeighborhoodKind::Incl),
            "excl" => Ok(NeighborhoodKind::Excl),
            "sym" => Ok(NeighborhoodKind::Sym),
            other => Err(format!("unknown neighborhood kind {other:?} (expected incl, excl or sym)")),
        }
    }
}

impl fmt::Display for NeighborhoodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RecoveryRule {
    pub kind: NeighborhoodKind,
    pub k: usize,
}

impl RecoveryRule {
    pub fn new(kind: NeighborhoodKind, k: usize) -> Self {
        RecoveryRule { kind, k }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Budget {
    /// Cap on the total deviation summed over all arcs.
    Continuous(Rational),
    /// Cap on the number of arcs that deviate at all.
    Discrete(usize),
}

impl Budget {
    pub fn is_zero(&self) -> bool {
        match self {
            Budget::Continuous(g) => g.is_zero(),
            Budget::Discrete(g) => *g == 0,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            Budget::Continuous(_) => "continuous",
            Budget::Discrete(_) => "discrete",
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Continuous(g) => write!(f, "cont:{g}"),
            Budget::Discrete(g) => write!(f, "disc:{g}"),
        }
    }
}

impl FromStr for Budget {
    type Err = String;

    /// `cont:G` with `G` a rational, or `disc:G` with `G` a nonnegative integer.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| format!("budget {s:?} is not of the form cont:G or disc:G"))?;
        match kind {
            "cont" => rational::parse(value)
                .map(Budget::Continuous)
                .ok_or_else(|| format!("invalid rational budget {value:?}")),
            "disc" => value
                .parse::<usize>()
                .map(Budget::Discrete)
                .map_err(|_| format!("invalid integer budget {value:?}")),
            other => Err(format!("unknown budget kind {other:?} (expected cont or disc)")),
        }
    }
}

/// A complete problem input.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: Digraph,
    pub rule: RecoveryRule,
    pub budget: Budget,
}

impl Instance {
    pub fn new(graph: Digraph, rule: RecoveryRule, budget: Budget) -> Self {
        Instance { graph, rule, budget }
    }

    /// Fails with every violation found by [`validate_instance`].
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate_instance(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(violations.iter().map(ToString::to_string).collect()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Cycle(Vec<usize>),
    SelfLoop(ArcId),
    NegativeCost { arc: ArcId, field: &'static str },
    NoStPath,
    SourceIsSink,
    NegativeBudget,
    DiscreteBudgetTooLarge { budget: usize, arcs: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle(nodes) => write!(f, "cycle detected through nodes {nodes:?}"),
            Violation::SelfLoop(id) => write!(f, "arc {id} is a self-loop"),
            Violation::NegativeCost { arc, field } => write!(f, "arc {arc} has negative {field}"),
            Violation::NoStPath => write!(f, "no path from source to sink"),
            Violation::SourceIsSink => write!(f, "source and sink coincide"),
            Violation::NegativeBudget => write!(f, "continuous budget is negative"),
            Violation::DiscreteBudgetTooLarge { budget, arcs } => {
                write!(f, "discrete budget {budget} exceeds the arc count {arcs}")
            }
        }
    }
}

/// Checks acyclicity, cost signs, s-t reachability and budget bounds.
/// An empty list means the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let g = &inst.graph;
    let mut violations = Vec::new();
    for arc in g.arcs() {
        if arc.tail == arc.head {
            violations.push(Violation::SelfLoop(arc.id));
        }
        for (value, field) in [
            (&arc.first_stage_cost, "first-stage cost"),
            (&arc.nominal, "nominal cost"),
            (&arc.deviation_cap, "deviation cap"),
        ] {
            if value.is_negative() {
                violations.push(Violation::NegativeCost { arc: arc.id, field });
            }
        }
    }
    // Self-loops already make the graph cyclic; report them only once.
    if let Err(cycle) = &g.order {
        if !g.arcs().iter().any(|a| a.tail == a.head) {
            violations.push(Violation::Cycle(cycle.clone()));
        }
    }
    if g.source() == g.sink() {
        violations.push(Violation::SourceIsSink);
    } else if !g.reaches_sink(g.source()) {
        violations.push(Violation::NoStPath);
    }
    match &inst.budget {
        Budget::Continuous(gamma) if gamma.is_negative() => violations.push(Violation::NegativeBudget),
        Budget::Discrete(gamma) if *gamma > g.arc_count() => violations.push(Violation::DiscreteBudgetTooLarge {
            budget: *gamma,
            arcs: g.arc_count(),
        }),
        _ => {}
    }
    violations
}

/// Deterministic topological order (ties by ascending node id).
pub fn topological_order(g: &Digraph) -> Result<Vec<usize>> {
    g.topological_order()
}

/// An s-t path given as its arc sequence. Ordering is lexicographic on the
/// arc ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    arcs: Vec<ArcId>,
}

impl Path {
    /// Checks that `arcs` chains from source to sink in `g`.
    pub fn new(g: &Digraph, arcs: Vec<ArcId>) -> Result<Self> {
        let mut at = g.source();
        if arcs.is_empty() {
            return Err(Error::InvalidPath("empty arc sequence".into()));
        }
        for &id in &arcs {
            let arc = g.arc(id).ok_or(Error::UnknownArc(id))?;
            if arc.tail != at {
                return Err(Error::InvalidPath(format!(
                    "arc {id} leaves node {} but the path is at node {at}",
                    arc.tail
                )));
            }
            at = arc.head;
        }
        if at != g.sink() {
            return Err(Error::InvalidPath(format!("path ends at node {at}, not at the sink")));
        }
        Ok(Path { arcs })
    }

    pub(crate) fn from_arcs_unchecked(arcs: Vec<ArcId>) -> Self {
        Path { arcs }
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, id: ArcId) -> bool {
        self.arcs.contains(&id)
    }

    pub fn into_arcs(self) -> Vec<ArcId> {
        self.arcs
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, id) in self.arcs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("]")
    }
}

/// Visits every s-t path in lexicographic order of arc-id sequences.
/// The visitor may stop the walk early with `ControlFlow::Break`.
pub fn for_each_st_path<F>(g: &Digraph, mut visit: F) -> Result<()>
where
    F: FnMut(&[ArcId]) -> ControlFlow<()>,
{
    g.order_slice()?;
    if !g.reaches_sink(g.source()) || g.source() == g.sink() {
        return Ok(());
    }
    // Depth-first over out-arcs in id order yields lexicographic order,
    // since no s-t path is a proper prefix of another in a DAG.
    let mut arcs: Vec<ArcId> = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(g.source(), 0)];
    while let Some(frame) = stack.last_mut() {
        let (node, next) = *frame;
        let outs = g.out_indices(node);
        if next == outs.len() {
            stack.pop();
            arcs.pop();
            continue;
        }
        frame.1 += 1;
        let arc = &g.arcs()[outs[next]];
        if !g.reaches_sink(arc.head) {
            continue;
        }
        arcs.push(arc.id);
        if arc.head == g.sink() {
            if visit(&arcs).is_break() {
                return Ok(());
            }
            arcs.pop();
        } else {
            stack.push((arc.head, 0));
        }
    }
    Ok(())
}

/// All s-t paths in lexicographic order, or [`Error::PathOverflow`] if more
/// than `cap` exist.
pub fn enumerate_st_paths(g: &Digraph, cap: usize) -> Result<Vec<Path>> {
    let mut paths = Vec::new();
    let mut overflow = false;
    for_each_st_path(g, |arcs| {
        if paths.len() == cap {
            overflow = true;
            return ControlFlow::Break(());
        }
        paths.push(Path::from_arcs_unchecked(arcs.to_vec()));
        ControlFlow::Continue(())
    })?;
    if overflow {
        return Err(Error::PathOverflow { cap });
    }
    Ok(paths)
}

/// Per-arc deviations from the nominal second-stage costs. Only nonzero
/// deviations are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    deviation: BTreeMap<ArcId, Rational>,
}

impl Scenario {
    /// The nominal scenario (no deviation anywhere).
    pub fn nominal() -> Self {
        Scenario::default()
    }

    pub fn from_deviations(deviations: impl IntoIterator<Item = (ArcId, Rational)>) -> Self {
        let mut deviation = BTreeMap::new();
        for (id, d) in deviations {
            if !d.is_zero() {
                deviation.insert(id, d);
            }
        }
        Scenario { deviation }
    }

    pub fn deviation(&self, id: ArcId) -> Rational {
        self.deviation.get(&id).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero deviations in ascending arc order.
    pub fn deviations(&self) -> impl Iterator<Item = (ArcId, &Rational)> {
        self.deviation.iter().map(|(&id, d)| (id, d))
    }

    pub fn support_size(&self) -> usize {
        self.deviation.len()
    }

    pub fn total(&self) -> Rational {
        self.deviation.values().sum()
    }

    /// Realized second-stage cost of `arc`.
    pub fn cost(&self, arc: &Arc) -> Rational {
        match self.deviation.get(&arc.id) {
            Some(d) => &arc.nominal + d,
            None => arc.nominal.clone(),
        }
    }

    /// Checks bounds `0 ≤ d_e ≤ Δ_e` and the instance's budget.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        for (&id, d) in &self.deviation {
            let arc = inst.graph.arc(id).ok_or(Error::UnknownArc(id))?;
            if d.is_negative() || *d > arc.deviation_cap {
                return Err(Error::InvalidScenario(format!(
                    "deviation {d} on arc {id} outside [0, {}]",
                    arc.deviation_cap
                )));
            }
        }
        match &inst.budget {
            Budget::Continuous(gamma) => {
                let total = self.total();
                if total > *gamma {
                    return Err(Error::InvalidScenario(format!(
                        "total deviation {total} exceeds budget {gamma}"
                    )));
                }
            }
            Budget::Discrete(gamma) => {
                if self.support_size() > *gamma {
                    return Err(Error::InvalidScenario(format!(
                        "{} arcs deviate, budget allows {gamma}",
                        self.support_size()
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (id, d)) in self.deviation.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{id}: {d}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Stage<'a> {
    First,
    Second(&'a Scenario),
}

/// Sum of first-stage costs, or of realized second-stage costs, over `arcs`.
pub fn arcs_cost(g: &Digraph, arcs: &[ArcId], stage: Stage<'_>) -> Result<Rational> {
    let mut total = Rational::zero();
    for &id in arcs {
        let arc = g.arc(id).ok_or(Error::UnknownArc(id))?;
        match stage {
            Stage::First => total += &arc.first_stage_cost,
            Stage::Second(scenario) => total += scenario.cost(arc),
        }
    }
    Ok(total)
}

pub fn path_cost(g: &Digraph, path: &Path, stage: Stage<'_>) -> Result<Rational> {
    arcs_cost(g, path.arcs(), stage)
}
