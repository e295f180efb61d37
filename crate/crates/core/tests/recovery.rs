mod common;

use proptest::prelude::*;
use rrsp::model::{enumerate_st_paths, path_cost, Stage};
use rrsp::rational::ratio;
use rrsp::recovery::{best_recovery, neighborhood_contains};
use rrsp::reductions::{reduce_hp_continuous, SimpleDigraph};
use rrsp::{Instance, NeighborhoodKind, Path, RecoveryRule, Scenario};

fn with_rule(inst: &Instance, kind: NeighborhoodKind, k: usize) -> Instance {
    Instance::new(inst.graph.clone(), RecoveryRule::new(kind, k), inst.budget.clone())
}

#[test]
fn sym_with_zero_k_keeps_x() {
    let inst = common::instance(11, 7, 12, 0);
    let inst = with_rule(&inst, NeighborhoodKind::Sym, 0);
    for x in enumerate_st_paths(&inst.graph, 1000).unwrap() {
        let r = best_recovery(&inst, &x, &Scenario::nominal()).unwrap().unwrap();
        assert_eq!(r.path, x);
    }
}

#[test]
fn large_k_gives_plain_shortest_path() {
    let inst = common::instance(5, 8, 15, 0);
    let inst = with_rule(&inst, NeighborhoodKind::Sym, 100);
    let paths = enumerate_st_paths(&inst.graph, 1000).unwrap();
    let shortest = paths.iter().map(|p| path_cost(&inst.graph, p, Stage::Second(&Scenario::nominal())).unwrap()).min().unwrap();
    let r = best_recovery(&inst, &paths[0], &Scenario::nominal()).unwrap().unwrap();
    assert_eq!(r.cost, shortest);
}

/// A first-stage path through every vertical path of the layered graph for
/// the chain 1 -> 2 -> 3, with the budget split evenly over the verticals.
#[test]
fn layered_graph_recovers_at_one_third() {
    let (inst, meta) = reduce_hp_continuous(&SimpleDigraph::chain(3), NeighborhoodKind::Incl).unwrap();
    let g = &inst.graph;
    let x = enumerate_st_paths(g, 100_000)
        .unwrap()
        .into_iter()
        .find(|p| meta.vertical_paths.iter().all(|v| v.iter().any(|&a| p.contains(a))))
        .expect("the Hamiltonian path visits every column");
    for v in &meta.vertical_paths {
        let y = Path::new(g, v.clone()).unwrap();
        assert!(neighborhood_contains(&x, &y, inst.rule));
    }
    let split = Scenario::from_deviations(meta.vertical_paths.iter().map(|v| (v[0], ratio(1, 3))));
    let r = best_recovery(&inst, &x, &split).unwrap().unwrap();
    assert_eq!(r.cost, ratio(1, 3));
    assert_eq!(r.cost, common::brute_recovery(&inst, &x, &split).0);
}

#[test]
fn disjoint_paths_exceed_small_k() {
    let g = rrsp::Digraph::new(
        6,
        (0..5u32).map(|i| rrsp::Arc::new(i, i as usize, i as usize + 1)).chain([rrsp::Arc::new(5, 0, 5)]).collect(),
        0,
        5,
    )
    .unwrap();
    let long = Path::new(&g, (0..5).map(rrsp::ArcId).collect()).unwrap();
    let short = Path::new(&g, vec![rrsp::ArcId(5)]).unwrap();
    assert!(!neighborhood_contains(&short, &long, RecoveryRule::new(NeighborhoodKind::Incl, 4)));
    assert!(neighborhood_contains(&short, &long, RecoveryRule::new(NeighborhoodKind::Incl, 5)));
    assert!(neighborhood_contains(&long, &short, RecoveryRule::new(NeighborhoodKind::Incl, 1)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dp_matches_filtering(seed: u64, nodes in 2usize..=10, arcs in 1usize..=20, k in 0usize..=6, kind_idx in 0usize..3) {
        let inst = common::instance(seed, nodes, arcs, 0);
        let inst = with_rule(&inst, NeighborhoodKind::ALL[kind_idx], k);
        let x = common::some_path(&inst, seed >> 7);
        let scenario = rrsp::gen::random_scenario(&mut rrsp::gen::rng(seed ^ 0x5eed), &inst);
        let r = best_recovery(&inst, &x, &scenario).unwrap().unwrap();
        let (cost, path) = common::brute_recovery(&inst, &x, &scenario);
        prop_assert_eq!(&r.cost, &cost);
        prop_assert_eq!(&r.path, &path, "tie-break differs");
        prop_assert!(r.cost <= path_cost(&inst.graph, &x, Stage::Second(&scenario)).unwrap());
    }

    #[test]
    fn larger_k_never_hurts(seed: u64, k in 0usize..6, kind_idx in 0usize..3) {
        let inst = common::instance(seed, 8, 16, 0);
        let kind = NeighborhoodKind::ALL[kind_idx];
        let x = common::some_path(&inst, seed >> 3);
        let s = rrsp::gen::random_scenario(&mut rrsp::gen::rng(seed), &inst);
        let tight = best_recovery(&with_rule(&inst, kind, k), &x, &s).unwrap().unwrap().cost;
        let loose = best_recovery(&with_rule(&inst, kind, k + 1), &x, &s).unwrap().unwrap().cost;
        prop_assert!(loose <= tight);
    }

    #[test]
    fn neighborhoods_nest(seed: u64, k in 0usize..6) {
        let inst = common::instance(seed, 8, 16, 0);
        let paths = enumerate_st_paths(&inst.graph, 10_000).unwrap();
        let x = &paths[(seed as usize) % paths.len()];
        let rule = |kind| RecoveryRule::new(kind, k);
        for y in &paths {
            let incl = neighborhood_contains(x, y, rule(NeighborhoodKind::Incl));
            let excl = neighborhood_contains(x, y, rule(NeighborhoodKind::Excl));
            if neighborhood_contains(x, y, rule(NeighborhoodKind::Sym)) {
                prop_assert!(incl && excl);
            }
            if incl && excl {
                prop_assert!(neighborhood_contains(x, y, RecoveryRule::new(NeighborhoodKind::Sym, 2 * k)));
            }
        }
        for kind in NeighborhoodKind::ALL {
            prop_assert!(neighborhood_contains(x, x, RecoveryRule::new(kind, 0)));
        }
    }
}
