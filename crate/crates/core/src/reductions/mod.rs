//! Instance generators for the hardness constructions: layered graphs built
//! from a Hamiltonian-path input, and clause-gadget graphs built from a
//! MAX-3SAT input.

mod hp;
mod sat;

use std::collections::BTreeSet;

pub use hp::{reduce_hp_continuous, reduce_hp_continuous_with_budget, reduce_hp_discrete, HpReductionMeta};
pub use sat::{
    reduce_max3sat, GadgetInfo, LiteralArc, LiteralPathInfo, SatReductionMeta, SolidPathCodec,
};

use crate::error::{Error, Result};

/// A simple directed graph on nodes `0..node_count`, the input of the
/// Hamiltonian-path constructions. Parallel arcs collapse; self-loops are
/// rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleDigraph {
    node_count: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl SimpleDigraph {
    pub fn new(node_count: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            if u >= node_count || v >= node_count {
                return Err(Error::Precondition(format!(
                    "arc ({u}, {v}) leaves the node range 0..{node_count}"
                )));
            }
            if u == v {
                return Err(Error::Precondition(format!("self-loop at node {u}")));
            }
            set.insert((u, v));
        }
        Ok(SimpleDigraph { node_count, arcs: set })
    }

    /// The path `0 → 1 → … → n-1`.
    pub fn chain(node_count: usize) -> Self {
        SimpleDigraph::new(node_count, (1..node_count).map(|i| (i - 1, i))).expect("valid chain")
    }

    /// The digraph on `n` nodes whose arc set is the `mask`-selected subset
    /// of all ordered pairs `(u, v)`, `u ≠ v`, in lexicographic order.
    pub fn from_mask(node_count: usize, mask: u64) -> Self {
        let pairs = all_pairs(node_count);
        let arcs = pairs.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p);
        SimpleDigraph::new(node_count, arcs).expect("valid pairs")
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arcs.contains(&(u, v))
    }
}

/// All ordered pairs of distinct nodes in lexicographic order.
pub fn all_pairs(node_count: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for u in 0..node_count {
        for v in 0..node_count {
            if u != v {
                pairs.push((u, v));
            }
        }
    }
    pairs
}
