use std::collections::BTreeMap;

use serde::Serialize;

use crate::cnf::{CnfFormula, Literal};
use crate::error::{Error, Result};
use crate::model::{Arc, ArcId, ArcRole, Budget, Digraph, Instance, NeighborhoodKind, RecoveryRule};
use crate::rational::{self, int};

/// Refuse constructions with more clause gadgets than this.
pub const MAX_GADGETS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiteralPathInfo {
    /// One literal per tuple component.
    pub literals: Vec<Literal>,
    /// All arcs from the gadget source to the gadget sink.
    pub arcs: Vec<ArcId>,
    /// The literal arc of each component.
    pub literal_arcs: Vec<ArcId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetInfo {
    /// One-based clause indices of the tuple.
    pub clauses: Vec<usize>,
    pub source: usize,
    pub sink: usize,
    pub dashed_arc: ArcId,
    pub dotted_arc: ArcId,
    pub literal_paths: Vec<LiteralPathInfo>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiteralArc {
    pub gadget: usize,
    pub path: usize,
    pub component: usize,
    pub arc: ArcId,
}

/// Maps assignments to solid s-t paths and back. Variable `i` is routed
/// through `positive_routes[i]` when true and `negative_routes[i]` when false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolidPathCodec {
    pub entry_arc: ArcId,
    pub positive_routes: Vec<Vec<ArcId>>,
    pub negative_routes: Vec<Vec<ArcId>>,
}

impl SolidPathCodec {
    pub fn encode(&self, assignment: &[bool]) -> Vec<ArcId> {
        assert_eq!(assignment.len(), self.positive_routes.len(), "assignment length");
        let mut arcs = vec![self.entry_arc];
        for (i, &value) in assignment.iter().enumerate() {
            let route = if value { &self.positive_routes[i] } else { &self.negative_routes[i] };
            arcs.extend_from_slice(route);
        }
        arcs
    }

    pub fn decode(&self, arcs: &[ArcId]) -> Option<Vec<bool>> {
        let (&first, mut rest) = arcs.split_first()?;
        if first != self.entry_arc {
            return None;
        }
        let mut assignment = Vec::with_capacity(self.positive_routes.len());
        for (pos, neg) in self.positive_routes.iter().zip(&self.negative_routes) {
            if let Some(tail) = rest.strip_prefix(pos.as_slice()) {
                assignment.push(true);
                rest = tail;
            } else {
                rest = rest.strip_prefix(neg.as_slice())?;
                assignment.push(false);
            }
        }
        rest.is_empty().then_some(assignment)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SatReductionMeta {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub k: usize,
    /// Arcs per variable route after splitting; set for excl and sym only.
    pub r: Option<usize>,
    /// Gadgets in lexicographic order of their clause tuples.
    pub gadget_index: Vec<GadgetInfo>,
    pub literal_arc_map: Vec<LiteralArc>,
    pub solid_path_codec: SolidPathCodec,
}

impl SatReductionMeta {
    /// Number of gadgets whose whole clause tuple is satisfied.
    pub fn satisfied_gadgets(&self, formula: &CnfFormula, assignment: &[bool]) -> usize {
        self.gadget_index
            .iter()
            .filter(|g| g.clauses.iter().all(|&j| formula.clause_satisfied(j - 1, assignment)))
            .count()
    }
}

struct Builder {
    next_node: usize,
    arcs: Vec<Arc>,
}

impl Builder {
    fn node(&mut self) -> usize {
        self.next_node += 1;
        self.next_node - 1
    }

    fn arc(&mut self, tail: usize, head: usize, role: ArcRole) -> ArcId {
        let (first, nominal, cap) = match role {
            ArcRole::SolidFat => (0, 0, 0),
            ArcRole::SolidNormal => (0, 2, 0),
            ArcRole::Dotted => (2, 0, 0),
            ArcRole::Dashed => (2, 0, 1),
            other => unreachable!("role {other:?} is not used here"),
        };
        let id = self.arcs.len() as u32;
        self.arcs.push(Arc::new(id, tail, head).with_costs(int(first), int(nominal), int(cap)).with_role(role));
        ArcId(id)
    }

    /// A chain of `len ≥ 1` arcs from `tail` to `head` through fresh nodes.
    fn chain(&mut self, tail: usize, head: usize, len: usize, role: ArcRole, out: &mut Vec<ArcId>) {
        let mut cur = tail;
        for step in 0..len {
            let next = if step + 1 == len { head } else { self.node() };
            out.push(self.arc(cur, next, role));
            cur = next;
        }
    }
}

fn literal_layer(lit: Literal) -> usize {
    2 * (lit.var() - 1) + usize::from(!lit.is_positive())
}

#[derive(Clone, Copy)]
struct Copy {
    arc: ArcId,
    tail: usize,
    head: usize,
}

/// Clause-gadget construction for tuple arity `q`, with unit continuous
/// budget.
///
/// Requires `1 ≤ q < 2n`, no clause containing a literal and its negation,
/// and every variable occurring both positively and negatively.
pub fn reduce_max3sat(
    formula: &CnfFormula,
    q: usize,
    kind: NeighborhoodKind,
) -> Result<(Instance, SatReductionMeta)> {
    let n = formula.variable_count();
    let m = formula.clause_count();
    check_preconditions(formula, q)?;

    let gadget_count = m
        .checked_pow(q as u32)
        .filter(|&c| c <= MAX_GADGETS)
        .ok_or_else(|| Error::Precondition(format!("{m}^{q} clause gadgets exceed the limit of {MAX_GADGETS}")))?;
    let tuples: Vec<Vec<usize>> = (0..gadget_count)
        .map(|mut index| {
            let mut digits = vec![0; q];
            for d in digits.iter_mut().rev() {
                *d = index % m;
                index /= m;
            }
            digits
        })
        .collect();

    let literal_tuples: Vec<Vec<Vec<Literal>>> = tuples
        .iter()
        .map(|t| {
            let sets: Vec<Vec<Literal>> = t.iter().map(|&j| formula.literal_set(j)).collect();
            literal_product(&sets)
        })
        .collect();
    for lt in literal_tuples.iter().flatten() {
        let runs = runs_of(lt).len();
        if runs > 2 * n - q {
            return Err(Error::Precondition(format!(
                "literal tuple {} needs {} dummy arcs but only {} fit in 2n+1 = {}",
                format_literals(lt),
                runs + 1,
                2 * n + 1 - q,
                2 * n + 1
            )));
        }
    }

    // chains[g][layer]: the (path, component) copies threaded through that
    // layer's route in gadget g.
    let chains: Vec<Vec<Vec<(usize, usize)>>> = literal_tuples
        .iter()
        .map(|paths| {
            let mut layers = vec![Vec::new(); 2 * n];
            for (p, lits) in paths.iter().enumerate() {
                for (c, &lit) in lits.iter().enumerate() {
                    layers[literal_layer(lit)].push((p, c));
                }
            }
            layers
        })
        .collect();

    let r = match kind {
        NeighborhoodKind::Incl => None,
        NeighborhoodKind::Excl | NeighborhoodKind::Sym => Some(split_target(m, q)?),
    };

    let source = 0;
    let sink = 1;
    let variable_node = |i: usize| 2 + i;
    let mut b = Builder {
        next_node: 2 + n,
        arcs: Vec::new(),
    };
    let entry_arc = b.arc(source, variable_node(0), ArcRole::SolidNormal);

    let mut copies: BTreeMap<(usize, usize, usize), Copy> = BTreeMap::new();
    let mut positive_routes = Vec::with_capacity(n);
    let mut negative_routes = Vec::with_capacity(n);
    for i in 0..n {
        let next = if i + 1 < n { variable_node(i + 1) } else { sink };
        for layer in [2 * i, 2 * i + 1] {
            let natural = route_length(&chains, layer);
            let pad = match r {
                None => 0,
                Some(r) => r.checked_sub(natural).ok_or_else(|| {
                    Error::Precondition(format!("route of length {natural} exceeds the split target {r}"))
                })?,
            };
            let mut route = Vec::with_capacity(natural + pad);
            let first_in = b.node();
            b.chain(variable_node(i), first_in, 1 + pad, ArcRole::SolidNormal, &mut route);
            let mut cur = first_in;
            for (g, layers) in chains.iter().enumerate() {
                if g > 0 {
                    let inn = b.node();
                    route.push(b.arc(cur, inn, ArcRole::SolidNormal));
                    cur = inn;
                }
                let chain = &layers[layer];
                for (idx, &(p, c)) in chain.iter().enumerate() {
                    let tail = if idx > 0 && chain[idx - 1].0 == p {
                        cur
                    } else {
                        let t = b.node();
                        route.push(b.arc(cur, t, ArcRole::SolidNormal));
                        t
                    };
                    let head = b.node();
                    let arc = b.arc(tail, head, ArcRole::SolidFat);
                    route.push(arc);
                    copies.insert((g, p, c), Copy { arc, tail, head });
                    cur = head;
                }
                let out = b.node();
                route.push(b.arc(cur, out, ArcRole::SolidNormal));
                cur = out;
            }
            route.push(b.arc(cur, next, ArcRole::SolidNormal));
            debug_assert_eq!(route.len(), natural + pad);
            if layer % 2 == 0 {
                positive_routes.push(route);
            } else {
                negative_routes.push(route);
            }
        }
    }

    let mut gadget_index = Vec::with_capacity(gadget_count);
    let mut literal_arc_map = Vec::new();
    for (g, (tuple, paths)) in tuples.iter().zip(&literal_tuples).enumerate() {
        let g_source = b.node();
        let g_sink = b.node();
        let dashed_arc = b.arc(source, g_source, ArcRole::Dashed);
        let mut literal_paths = Vec::with_capacity(paths.len());
        for (p, lits) in paths.iter().enumerate() {
            let runs = runs_of(lits);
            let gaps = dummy_gaps(&runs, lits, n);
            let mut arcs = Vec::with_capacity(2 * n + 1);
            let mut cur = g_source;
            for (run, &gap) in runs.iter().zip(&gaps) {
                let first = copies[&(g, p, run[0])];
                b.chain(cur, first.tail, gap, ArcRole::Dotted, &mut arcs);
                for &c in run {
                    arcs.push(copies[&(g, p, c)].arc);
                }
                cur = copies[&(g, p, *run.last().expect("runs are nonempty"))].head;
            }
            b.chain(cur, g_sink, *gaps.last().expect("one gap per run plus one"), ArcRole::Dotted, &mut arcs);
            debug_assert_eq!(arcs.len(), 2 * n + 1);
            let literal_arcs: Vec<ArcId> = (0..q).map(|c| copies[&(g, p, c)].arc).collect();
            for (c, &arc) in literal_arcs.iter().enumerate() {
                literal_arc_map.push(LiteralArc {
                    gadget: g,
                    path: p,
                    component: c,
                    arc,
                });
            }
            literal_paths.push(LiteralPathInfo {
                literals: lits.clone(),
                arcs,
                literal_arcs,
            });
        }
        let dotted_arc = b.arc(g_sink, sink, ArcRole::Dotted);
        gadget_index.push(GadgetInfo {
            clauses: tuple.iter().map(|j| j + 1).collect(),
            source: g_source,
            sink: g_sink,
            dashed_arc,
            dotted_arc,
            literal_paths,
        });
    }

    let k = match (kind, r) {
        (NeighborhoodKind::Incl, _) => 2 * n + 3 - q,
        (NeighborhoodKind::Excl, Some(r)) => n * r + 1 - q,
        (NeighborhoodKind::Sym, Some(r)) => (2 * n + 3) + (n * r + 1) - 2 * q,
        _ => unreachable!("split target is set for excl and sym"),
    };
    let graph = Digraph::new(b.next_node, b.arcs, source, sink)?;
    let inst = Instance::new(graph, RecoveryRule::new(kind, k), Budget::Continuous(rational::one()));
    let meta = SatReductionMeta {
        n,
        m,
        q,
        k,
        r,
        gadget_index,
        literal_arc_map,
        solid_path_codec: SolidPathCodec {
            entry_arc,
            positive_routes,
            negative_routes,
        },
    };
    Ok((inst, meta))
}

fn check_preconditions(formula: &CnfFormula, q: usize) -> Result<()> {
    let n = formula.variable_count();
    if q == 0 || q >= 2 * n {
        return Err(Error::Precondition(format!("tuple arity q = {q} must satisfy 1 <= q < 2n = {}", 2 * n)));
    }
    if formula.clause_count() == 0 {
        return Err(Error::Precondition("the formula has no clauses".into()));
    }
    let mut seen = vec![[false; 2]; n];
    for (j, clause) in formula.clauses().iter().enumerate() {
        if let Some(lit) = clause.iter().find(|l| clause.contains(&l.negated())) {
            return Err(Error::Precondition(format!(
                "clause {} contains both {lit} and {}",
                j + 1,
                lit.negated()
            )));
        }
        for lit in clause {
            seen[lit.var() - 1][usize::from(!lit.is_positive())] = true;
        }
    }
    if let Some(i) = seen.iter().position(|s| !(s[0] && s[1])) {
        return Err(Error::Precondition(format!(
            "x{} must occur both positively and negatively",
            i + 1
        )));
    }
    Ok(())
}

/// `m^q (q 3^q + 1) + 1`, an upper bound on the arcs of any unsplit route.
fn split_target(m: usize, q: usize) -> Result<usize> {
    let q32 = q as u32;
    m.checked_pow(q32)
        .zip(3usize.checked_pow(q32))
        .and_then(|(g, t)| g.checked_mul(q.checked_mul(t)?.checked_add(1)?)?.checked_add(1))
        .ok_or_else(|| Error::Precondition("split target overflows".into()))
}

/// Arcs of the unsplit route through `layer`: one entry arc, per gadget an
/// in-out arc or the connectors, copies and exit arc of its chain, one arc
/// between consecutive gadgets and one final arc.
fn route_length(chains: &[Vec<Vec<(usize, usize)>>], layer: usize) -> usize {
    let per_gadget: usize = chains
        .iter()
        .map(|layers| {
            let chain = &layers[layer];
            let joined = chain.windows(2).filter(|w| w[0].0 == w[1].0).count();
            2 * chain.len() + 1 - joined
        })
        .sum();
    1 + per_gadget + (chains.len() - 1) + 1
}

/// Non-contradictory literal tuples in lexicographic order of the per-clause
/// literal choices.
fn literal_product(sets: &[Vec<Literal>]) -> Vec<Vec<Literal>> {
    let mut out = vec![Vec::new()];
    for set in sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for &lit in set {
                if prefix.contains(&lit.negated()) {
                    continue;
                }
                let mut t: Vec<Literal> = prefix.clone();
                t.push(lit);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Component indices grouped into maximal runs of equal literals, ordered by
/// layer.
fn runs_of(lits: &[Literal]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..lits.len()).collect();
    order.sort_by_key(|&c| (literal_layer(lits[c]), c));
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for c in order {
        match runs.last_mut() {
            Some(run) if lits[run[0]] == lits[c] => run.push(c),
            _ => runs.push(vec![c]),
        }
    }
    runs
}

/// Dummy-chain lengths before each run and after the last, each at least
/// one, summing to `2n + 1 - q`; runs sit at their layer position when room
/// allows.
fn dummy_gaps(runs: &[Vec<usize>], lits: &[Literal], n: usize) -> Vec<usize> {
    let mut gaps = Vec::with_capacity(runs.len() + 1);
    let mut pos = 0;
    let mut remaining: usize = runs.iter().map(Vec::len).sum();
    for (idx, run) in runs.iter().enumerate() {
        let latest = 2 * n - remaining - (runs.len() - 1 - idx);
        let start = literal_layer(lits[run[0]]).min(latest).max(pos + 1);
        gaps.push(start - pos);
        pos = start + run.len();
        remaining -= run.len();
    }
    gaps.push(2 * n + 1 - pos);
    gaps
}

fn format_literals(lits: &[Literal]) -> String {
    let parts: Vec<String> = lits.iter().map(Literal::to_string).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_st_paths, validate_instance};

    fn sample() -> CnfFormula {
        CnfFormula::from_dimacs(2, &[&[1, 2], &[-1], &[-2, 1]]).unwrap()
    }

    #[test]
    fn preconditions() {
        let f = CnfFormula::from_dimacs(2, &[&[1, 2], &[-1]]).unwrap();
        assert!(reduce_max3sat(&f, 1, NeighborhoodKind::Incl).is_err(), "x2 never negated");
        let f = CnfFormula::from_dimacs(1, &[&[1, -1]]).unwrap();
        assert!(reduce_max3sat(&f, 1, NeighborhoodKind::Incl).is_err());
        assert!(reduce_max3sat(&sample(), 0, NeighborhoodKind::Incl).is_err());
        assert!(reduce_max3sat(&sample(), 4, NeighborhoodKind::Incl).is_err());
    }

    #[test]
    fn gadget_and_path_counts() {
        let (inst, meta) = reduce_max3sat(&sample(), 2, NeighborhoodKind::Incl).unwrap();
        assert!(validate_instance(&inst).is_empty());
        assert_eq!(meta.gadget_index.len(), 9);
        assert_eq!(meta.k, 2 * 2 + 3 - 2);
        for g in &meta.gadget_index {
            assert!(g.literal_paths.len() <= 9);
            for p in &g.literal_paths {
                assert_eq!(p.arcs.len(), 5);
                assert_eq!(p.literal_arcs.len(), 2);
            }
        }
        // Tuple (C1, C2) = ({x1, x2}, {~x1}) keeps only (x2, ~x1).
        let g = &meta.gadget_index[1];
        assert_eq!(g.clauses, vec![1, 2]);
        assert_eq!(g.literal_paths.len(), 1);
        assert_eq!(g.literal_paths[0].literals, vec![Literal::new(2, true), Literal::new(1, false)]);
    }

    #[test]
    fn split_routes_have_length_r() {
        for kind in [NeighborhoodKind::Excl, NeighborhoodKind::Sym] {
            let (_, meta) = reduce_max3sat(&sample(), 1, kind).unwrap();
            let r = meta.r.unwrap();
            assert_eq!(r, 3 * 4 + 1);
            let codec = &meta.solid_path_codec;
            assert!(codec.positive_routes.iter().chain(&codec.negative_routes).all(|route| route.len() == r));
            assert_eq!(codec.encode(&[true, false]).len(), 2 * r + 1);
        }
        let (_, meta) = reduce_max3sat(&sample(), 1, NeighborhoodKind::Excl).unwrap();
        assert_eq!(meta.k, 2 * 13 + 1 - 1);
        let (_, meta) = reduce_max3sat(&sample(), 1, NeighborhoodKind::Sym).unwrap();
        assert_eq!(meta.k, 7 + 27 - 2);
    }

    #[test]
    fn codec_round_trip() {
        let (inst, meta) = reduce_max3sat(&sample(), 1, NeighborhoodKind::Incl).unwrap();
        let codec = &meta.solid_path_codec;
        for bits in 0..4u32 {
            let a = vec![bits & 1 == 1, bits & 2 == 2];
            let arcs = codec.encode(&a);
            crate::model::Path::new(&inst.graph, arcs.clone()).unwrap();
            assert_eq!(codec.decode(&arcs), Some(a));
        }
        assert_eq!(codec.decode(&[]), None);
    }

    #[test]
    fn solid_paths_are_assignments() {
        let (inst, _) = reduce_max3sat(&sample(), 2, NeighborhoodKind::Incl).unwrap();
        let solid: Vec<Arc> = inst.graph.arcs().iter().filter(|a| a.role.is_some_and(ArcRole::is_solid)).cloned().collect();
        let g = Digraph::new(inst.graph.node_count(), solid, 0, 1).unwrap();
        assert_eq!(enumerate_st_paths(&g, 100).unwrap().len(), 4);
    }

    #[test]
    fn gaps_fill_to_full_length() {
        let lits = [Literal::new(2, false), Literal::new(1, true), Literal::new(2, false)];
        let runs = runs_of(&lits);
        assert_eq!(runs, vec![vec![1], vec![0, 2]]);
        let gaps = dummy_gaps(&runs, &lits, 3);
        assert_eq!(gaps.iter().sum::<usize>(), 7 - 3);
        assert!(gaps.iter().all(|&g| g >= 1));
    }
}
