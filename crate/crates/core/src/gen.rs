//! Seeded random instances for property tests and the command line.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Arc, Budget, Digraph, Instance, NeighborhoodKind, RecoveryRule, Scenario};
use crate::rational::{self, Rational};
use crate::reductions::SimpleDigraph;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetChoice {
    Continuous,
    Discrete,
    Either,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceParams {
    /// At least 2.
    pub nodes: usize,
    /// At least 1; parallel arcs are allowed.
    pub arcs: usize,
    /// Costs are drawn from the halves in `[0, max_cost]`.
    pub max_cost: i64,
    pub max_k: usize,
    pub kind: Option<NeighborhoodKind>,
    pub budget: BudgetChoice,
}

impl InstanceParams {
    pub fn new(nodes: usize, arcs: usize) -> Self {
        InstanceParams {
            nodes,
            arcs,
            max_cost: 4,
            max_k: 4,
            kind: None,
            budget: BudgetChoice::Either,
        }
    }
}

/// A DAG on `nodes` nodes with `arcs` arcs (at least one) and a guaranteed
/// source-sink path. Node labels are shuffled so the topological order is
/// not the identity. Returns `(tail, head)` pairs plus source and sink.
pub fn random_dag(rng: &mut GenRng, nodes: usize, arcs: usize) -> (Vec<(usize, usize)>, usize, usize) {
    assert!(nodes >= 2, "a DAG with a source-sink path needs two nodes");
    let arcs = arcs.max(1);
    // Rank r holds label perm[r]; arcs always go up in rank.
    let mut perm: Vec<usize> = (0..nodes).collect();
    perm.shuffle(rng);

    let inner = rng.gen_range(0..=(nodes - 2).min(arcs - 1));
    let mut ranks: Vec<usize> = (1..nodes - 1).collect::<Vec<_>>();
    ranks.shuffle(rng);
    let mut backbone: Vec<usize> = ranks[..inner].to_vec();
    backbone.sort_unstable();
    backbone.insert(0, 0);
    backbone.push(nodes - 1);

    let mut pairs: Vec<(usize, usize)> = backbone.windows(2).map(|w| (w[0], w[1])).collect();
    while pairs.len() < arcs {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a != b {
            pairs.push((a.min(b), a.max(b)));
        }
    }
    pairs.shuffle(rng);
    let labeled = pairs.into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    (labeled, perm[0], perm[nodes - 1])
}

fn random_cost(rng: &mut GenRng, max_cost: i64) -> Rational {
    Rational::new(rng.gen_range(0..=2 * max_cost).into(), 2.into())
}

pub fn random_instance(rng: &mut GenRng, params: &InstanceParams) -> Instance {
    let (pairs, source, sink) = random_dag(rng, params.nodes, params.arcs);
    let arcs = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (tail, head))| {
            let first = random_cost(rng, params.max_cost);
            let nominal = random_cost(rng, params.max_cost);
            let cap = if rng.gen_bool(0.3) { rational::zero() } else { random_cost(rng, params.max_cost) };
            Arc::new(i as u32, tail, head).with_costs(first, nominal, cap)
        })
        .collect();
    let graph = Digraph::new(params.nodes, arcs, source, sink).expect("generated arcs are in range");
    let kind = params.kind.unwrap_or_else(|| *NeighborhoodKind::ALL.choose(rng).expect("three kinds"));
    let k = rng.gen_range(0..=params.max_k);
    let discrete = match params.budget {
        BudgetChoice::Continuous => false,
        BudgetChoice::Discrete => true,
        BudgetChoice::Either => rng.gen_bool(0.5),
    };
    let budget = if discrete {
        Budget::Discrete(rng.gen_range(0..=3.min(params.arcs.max(1))))
    } else {
        Budget::Continuous(random_cost(rng, params.max_cost))
    };
    Instance::new(graph, RecoveryRule::new(kind, k), budget)
}

/// A scenario admissible for `inst`'s budget.
pub fn random_scenario(rng: &mut GenRng, inst: &Instance) -> Scenario {
    let uncertain: Vec<&Arc> = inst.graph.arcs().iter().filter(|a| a.deviation_cap > rational::zero()).collect();
    match &inst.budget {
        Budget::Discrete(gamma) => {
            let size = rng.gen_range(0..=(*gamma).min(uncertain.len()));
            let chosen: Vec<&&Arc> = uncertain.choose_multiple(rng, size).collect();
            Scenario::from_deviations(chosen.into_iter().map(|a| {
                let scale = Rational::new(rng.gen_range(0..=4).into(), 4.into());
                (a.id, &a.deviation_cap * scale)
            }))
        }
        Budget::Continuous(gamma) => {
            let mut left = gamma.clone();
            let mut devs = Vec::new();
            for a in uncertain {
                let room = if a.deviation_cap < left { a.deviation_cap.clone() } else { left.clone() };
                let scale = Rational::new(rng.gen_range(0..=4).into(), 4.into());
                let d = room * scale;
                left -= &d;
                devs.push((a.id, d));
            }
            Scenario::from_deviations(devs)
        }
    }
}

/// Each ordered pair of distinct nodes becomes an arc with probability `p`.
pub fn random_simple_digraph(rng: &mut GenRng, nodes: usize, p: f64) -> SimpleDigraph {
    let pairs = crate::reductions::all_pairs(nodes);
    SimpleDigraph::new(nodes, pairs.into_iter().filter(|_| rng.gen_bool(p))).expect("pairs are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_st_paths, validate_instance};

    #[test]
    fn generated_instances_are_valid() {
        let mut r = rng(7);
        for _ in 0..50 {
            let inst = random_instance(&mut r, &InstanceParams::new(6, 10));
            assert!(validate_instance(&inst).is_empty(), "{:?}", validate_instance(&inst));
            assert_eq!(inst.graph.arc_count(), 10);
            assert!(!enumerate_st_paths(&inst.graph, 10_000).unwrap().is_empty());
            random_scenario(&mut r, &inst).check(&inst).unwrap();
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_instance(&mut rng(3), &InstanceParams::new(5, 8));
        let b = random_instance(&mut rng(3), &InstanceParams::new(5, 8));
        assert_eq!(a, b);
    }
}
