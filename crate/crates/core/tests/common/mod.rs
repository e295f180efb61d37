#![allow(dead_code)]

use rrsp::gen::{self, InstanceParams};
use rrsp::model::{enumerate_st_paths, path_cost, Stage};
use rrsp::recovery::neighborhood_contains;
use rrsp::{Digraph, Instance, Path, Rational, Scenario};

/// Number of source-sink paths by a sweep over the reversed topological order.
pub fn count_paths(g: &Digraph) -> u128 {
    let order = g.topological_order().unwrap();
    let mut ways = vec![0u128; g.node_count()];
    ways[g.sink()] = 1;
    for &v in order.iter().rev() {
        if v == g.sink() {
            continue;
        }
        ways[v] = g.out_arcs(v).map(|a| ways[a.head]).sum();
    }
    ways[g.source()]
}

/// Cheapest neighbor of `x` by filtering every path.
pub fn brute_recovery(inst: &Instance, x: &Path, scenario: &Scenario) -> (Rational, Path) {
    let paths = enumerate_st_paths(&inst.graph, 1_000_000).unwrap();
    paths
        .into_iter()
        .filter(|y| neighborhood_contains(x, y, inst.rule))
        .map(|y| (path_cost(&inst.graph, &y, Stage::Second(scenario)).unwrap(), y))
        .min()
        .expect("x is its own neighbor")
}

pub fn instance(seed: u64, nodes: usize, arcs: usize, max_k: usize) -> Instance {
    let mut params = InstanceParams::new(nodes, arcs);
    params.max_k = max_k;
    gen::random_instance(&mut gen::rng(seed), &params)
}

/// A random first-stage path of `inst`, chosen by `seed`.
pub fn some_path(inst: &Instance, seed: u64) -> Path {
    let paths = enumerate_st_paths(&inst.graph, 1_000_000).unwrap();
    paths[(seed as usize) % paths.len()].clone()
}
