mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rrsp::model::{arcs_cost, enumerate_st_paths, path_cost, Stage};
use rrsp::rational::int;
use rrsp::reductions::{reduce_hp_continuous, SimpleDigraph};
use rrsp::{Arc, ArcId, Digraph, Error, NeighborhoodKind};

#[test]
fn parallel_arcs_come_in_id_order() {
    let g = Digraph::new(2, vec![Arc::new(2, 0, 1), Arc::new(1, 0, 1)], 0, 1).unwrap();
    let paths = enumerate_st_paths(&g, 10).unwrap();
    let ids: Vec<&[ArcId]> = paths.iter().map(|p| p.arcs()).collect();
    assert_eq!(ids, vec![&[ArcId(1)][..], &[ArcId(2)][..]]);
}

#[test]
fn overflow_carries_cap() {
    let g = Digraph::new(2, (0..5).map(|i| Arc::new(i, 0, 1)).collect(), 0, 1).unwrap();
    assert!(matches!(enumerate_st_paths(&g, 4), Err(Error::PathOverflow { cap: 4 })));
    assert_eq!(enumerate_st_paths(&g, 5).unwrap().len(), 5);
}

#[test]
fn layered_graph_of_empty_digraph() {
    let (inst, meta) = reduce_hp_continuous(&SimpleDigraph::new(2, []).unwrap(), NeighborhoodKind::Incl).unwrap();
    let paths = enumerate_st_paths(&inst.graph, 10).unwrap();
    assert_eq!(paths.len(), 2);
    assert_eq!(paths[0].arcs(), meta.vertical_paths[0].as_slice());
    for p in &paths {
        assert_eq!(path_cost(&inst.graph, p, Stage::First).unwrap(), int(0));
    }
}

#[test]
fn cycles_are_reported() {
    let g = Digraph::new(3, vec![Arc::new(0, 0, 1), Arc::new(1, 1, 2), Arc::new(2, 2, 1)], 0, 2).unwrap();
    assert!(g.topological_order().is_err());
    assert!(enumerate_st_paths(&g, 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn enumeration_matches_path_count(seed: u64, nodes in 2usize..=12, arcs in 1usize..=24) {
        let inst = common::instance(seed, nodes, arcs, 0);
        let g = &inst.graph;
        let paths = enumerate_st_paths(g, 1_000_000).unwrap();
        prop_assert_eq!(paths.len() as u128, common::count_paths(g));
        prop_assert!(paths.windows(2).all(|w| w[0] < w[1]), "not in lexicographic order");
        for p in &paths {
            let mut seen = BTreeSet::from([g.source()]);
            for &id in p.arcs() {
                prop_assert!(seen.insert(g.arc(id).unwrap().head), "node repeated");
            }
        }
    }

    #[test]
    fn path_cost_is_additive(seed: u64, split in 0usize..16) {
        let inst = common::instance(seed, 8, 14, 0);
        let p = common::some_path(&inst, seed);
        let cut = split.min(p.len());
        let (head, tail) = p.arcs().split_at(cut);
        let scenario = rrsp::gen::random_scenario(&mut rrsp::gen::rng(seed), &inst);
        for stage in [Stage::First, Stage::Second(&scenario)] {
            let whole = path_cost(&inst.graph, &p, stage).unwrap();
            let parts = arcs_cost(&inst.graph, head, stage).unwrap() + arcs_cost(&inst.graph, tail, stage).unwrap();
            prop_assert_eq!(whole, parts);
        }
    }

    #[test]
    fn integer_inputs_give_integer_costs(seed: u64) {
        let inst = common::instance(seed, 6, 10, 0);
        let arcs = inst.graph.arcs().iter().map(|a| {
            Arc::new(a.id.0, a.tail, a.head).with_costs(a.first_stage_cost.ceil(), a.nominal.ceil(), a.deviation_cap.ceil())
        }).collect();
        let g = Digraph::new(inst.graph.node_count(), arcs, inst.graph.source(), inst.graph.sink()).unwrap();
        for p in enumerate_st_paths(&g, 10_000).unwrap() {
            prop_assert!(path_cost(&g, &p, Stage::First).unwrap().is_integer());
        }
    }
}
