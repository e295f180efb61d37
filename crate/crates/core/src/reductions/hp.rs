use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use super::SimpleDigraph;
use crate::error::{Error, Result};
use crate::model::{Arc, ArcId, ArcRole, Budget, Digraph, Instance, NeighborhoodKind, RecoveryRule};
use crate::rational::{self, Rational};

/// Bookkeeping for the layered Hamiltonian-path construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HpReductionMeta {
    pub n: usize,
    /// Arc ids of the `n` disjoint vertical s-t paths.
    pub vertical_paths: Vec<Vec<ArcId>>,
    /// The first arc of every vertical path, leaving the source.
    pub dashed_arcs: Vec<ArcId>,
    /// The optimum equals this value exactly when the input has a
    /// Hamiltonian path.
    #[serde(serialize_with = "serialize_rational")]
    pub threshold: Rational,
    /// Second-stage cost of a diagonal arc.
    #[serde(rename = "M", serialize_with = "serialize_rational")]
    pub big_m: Rational,
    pub k: usize,
    pub budget: String,
}

fn serialize_rational<S: serde::Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(value))
}

enum Model {
    Continuous { gamma: Rational, big_m: Rational },
    Discrete,
}

/// Layered graph with unit continuous budget: vertical arcs in `[0, 2]`,
/// diagonal arcs fixed at 2.
pub fn reduce_hp_continuous(g: &SimpleDigraph, kind: NeighborhoodKind) -> Result<(Instance, HpReductionMeta)> {
    reduce_hp_continuous_with_budget(g, kind, rational::one())
}

/// As [`reduce_hp_continuous`] with budget `gamma > 0`; diagonal arcs cost
/// the smallest integer above `gamma`.
pub fn reduce_hp_continuous_with_budget(
    g: &SimpleDigraph,
    kind: NeighborhoodKind,
    gamma: Rational,
) -> Result<(Instance, HpReductionMeta)> {
    if gamma <= rational::zero() {
        return Err(Error::Precondition(format!("budget must be positive, got {gamma}")));
    }
    let big_m = Rational::from_integer(gamma.numer().div_floor(gamma.denom()) + BigInt::from(1));
    build(g, kind, Model::Continuous { gamma, big_m })
}

/// Same layered graph with discrete budget `n - 1`: only the arcs leaving
/// the source are uncertain (`[0, 1]`), diagonal arcs are fixed at 1.
pub fn reduce_hp_discrete(g: &SimpleDigraph, kind: NeighborhoodKind) -> Result<(Instance, HpReductionMeta)> {
    build(g, kind, Model::Discrete)
}

fn build(g: &SimpleDigraph, kind: NeighborhoodKind, model: Model) -> Result<(Instance, HpReductionMeta)> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the Hamiltonian-path construction needs at least 2 nodes, got {n}"
        )));
    }
    let layers = 2 * n;
    let source = 0;
    let sink = 1 + n * layers;
    // Copy j ∈ 1..=2n of node i ∈ 0..n.
    let node = |i: usize, j: usize| 1 + i * layers + (j - 1);
    let zero = rational::zero;

    let (vertical_cost, diagonal_cost, big_m) = match &model {
        Model::Continuous { big_m, .. } => (
            (zero(), big_m.clone()),
            (big_m.clone(), zero()),
            big_m.clone(),
        ),
        Model::Discrete => ((zero(), zero()), (rational::one(), zero()), rational::one()),
    };

    let mut arcs = Vec::new();
    let mut vertical_paths = Vec::with_capacity(n);
    let mut dashed_arcs = Vec::with_capacity(n);
    let mut next_id = 0u32;
    let mut push = |arcs: &mut Vec<Arc>, tail, head, nominal: &Rational, cap: &Rational, role| {
        let id = next_id;
        next_id += 1;
        arcs.push(Arc::new(id, tail, head).with_costs(zero(), nominal.clone(), cap.clone()).with_role(role));
        ArcId(id)
    };

    for i in 0..n {
        let mut path = Vec::with_capacity(layers + 1);
        let (first_cap, first_role) = match model {
            Model::Continuous { .. } => (vertical_cost.1.clone(), ArcRole::Vertical),
            Model::Discrete => (rational::one(), ArcRole::Dashed),
        };
        let first = push(&mut arcs, source, node(i, 1), &vertical_cost.0, &first_cap, first_role);
        dashed_arcs.push(first);
        path.push(first);
        for j in 1..layers {
            path.push(push(
                &mut arcs,
                node(i, j),
                node(i, j + 1),
                &vertical_cost.0,
                &vertical_cost.1,
                ArcRole::Vertical,
            ));
        }
        path.push(push(
            &mut arcs,
            node(i, layers),
            sink,
            &vertical_cost.0,
            &vertical_cost.1,
            ArcRole::Vertical,
        ));
        vertical_paths.push(path);
    }
    for j in 1..n {
        for (a, b) in g.arcs() {
            push(
                &mut arcs,
                node(a, 2 * j),
                node(b, 2 * j + 1),
                &diagonal_cost.0,
                &diagonal_cost.1,
                ArcRole::Diagonal,
            );
        }
    }

    let graph = Digraph::new(sink + 1, arcs, source, sink)?;
    let k = match kind {
        NeighborhoodKind::Incl | NeighborhoodKind::Excl => 2 * n,
        NeighborhoodKind::Sym => 4 * n,
    };
    let (budget, threshold) = match model {
        Model::Continuous { gamma, .. } => {
            let threshold = &gamma / rational::from_usize(n);
            (Budget::Continuous(gamma), threshold)
        }
        Model::Discrete => (Budget::Discrete(n - 1), zero()),
    };
    let meta = HpReductionMeta {
        n,
        vertical_paths,
        dashed_arcs,
        threshold,
        big_m,
        k,
        budget: budget.to_string(),
    };
    Ok((Instance::new(graph, RecoveryRule::new(kind, k), budget), meta))
}
