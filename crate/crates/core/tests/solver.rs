mod common;

use proptest::prelude::*;
use rrsp::adversary::worst_case;
use rrsp::model::{path_cost, Stage};
use rrsp::rational::{int, ratio};
use rrsp::recovery::{best_recovery, neighborhood_contains};
use rrsp::reductions::{reduce_hp_continuous, reduce_hp_discrete, SimpleDigraph};
use rrsp::{brute_solve, solve, Budget, Instance, NeighborhoodKind, Rational, RecoveryRule, SolveOptions};

fn with(inst: &Instance, rule: RecoveryRule, budget: Budget) -> Instance {
    Instance::new(inst.graph.clone(), rule, budget)
}

#[test]
fn chain_of_three_has_value_one_third() {
    let (inst, _) = reduce_hp_continuous(&SimpleDigraph::chain(3), NeighborhoodKind::Incl).unwrap();
    assert_eq!(inst.rule.k, 6);
    let r = solve(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(r.opt, ratio(1, 3));
}

#[test]
fn star_on_three_nodes() {
    let star = SimpleDigraph::new(3, [(0, 1), (0, 2)]).unwrap();
    let (inst, _) = reduce_hp_continuous(&star, NeighborhoodKind::Incl).unwrap();
    let fast = solve(&inst, &SolveOptions::default()).unwrap();
    assert!(fast.opt >= ratio(1, 2));
    assert_eq!(fast.opt, brute_solve(&inst, &SolveOptions::default()).unwrap().opt);

    let (inst, _) = reduce_hp_discrete(&star, NeighborhoodKind::Sym).unwrap();
    assert_eq!(brute_solve(&inst, &SolveOptions::default()).unwrap().opt, int(1));
    let (inst, _) = reduce_hp_discrete(&SimpleDigraph::chain(3), NeighborhoodKind::Excl).unwrap();
    assert_eq!(brute_solve(&inst, &SolveOptions::default()).unwrap().opt, int(0));
}

#[test]
fn zero_budget_matches_two_stage_enumeration() {
    for seed in 0..15 {
        let inst = common::instance(seed, 7, 12, 3);
        let inst = with(&inst, inst.rule, Budget::Continuous(int(0)));
        let paths = rrsp::model::enumerate_st_paths(&inst.graph, 10_000).unwrap();
        let expected = paths
            .iter()
            .map(|x| {
                let recovery = paths
                    .iter()
                    .filter(|y| neighborhood_contains(x, y, inst.rule))
                    .map(|y| path_cost(&inst.graph, y, Stage::Second(&rrsp::Scenario::nominal())).unwrap())
                    .min()
                    .unwrap();
                path_cost(&inst.graph, x, Stage::First).unwrap() + recovery
            })
            .min()
            .unwrap();
        assert_eq!(brute_solve(&inst, &SolveOptions::default()).unwrap().opt, expected);
        assert_eq!(solve(&inst, &SolveOptions::default()).unwrap().opt, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn pruned_solver_matches_brute_force(seed: u64, nodes in 2usize..=9, arcs in 1usize..=16) {
        let inst = common::instance(seed, nodes, arcs, 6);
        let opts = SolveOptions::default();
        let fast = solve(&inst, &opts).unwrap();
        let brute = brute_solve(&inst, &opts).unwrap();
        prop_assert_eq!(&fast.opt, &brute.opt);
        prop_assert_eq!(&fast.first_stage, &brute.first_stage, "tie-break differs");

        // The witnesses rebuild the optimum.
        let g = &inst.graph;
        fast.worst_scenario.check(&inst).unwrap();
        prop_assert!(neighborhood_contains(&fast.first_stage, &fast.best_recovery, inst.rule));
        let first = path_cost(g, &fast.first_stage, Stage::First).unwrap();
        let second = path_cost(g, &fast.best_recovery, Stage::Second(&fast.worst_scenario)).unwrap();
        prop_assert_eq!(&first + &second, fast.opt.clone());
        let rec = best_recovery(&inst, &fast.first_stage, &fast.worst_scenario).unwrap().unwrap();
        prop_assert_eq!(&rec.cost, &second);
        let adv = worst_case(&inst, &fast.first_stage, &opts.adversary).unwrap();
        prop_assert_eq!(first + adv.value, fast.opt);
    }

    #[test]
    fn monotone_in_k_and_budget(seed: u64, kind_idx in 0usize..3) {
        let inst = common::instance(seed, 7, 12, 0);
        let kind = NeighborhoodKind::ALL[kind_idx];
        let opts = SolveOptions::default();
        let mut last: Option<Rational> = None;
        for k in 0..=5 {
            let v = solve(&with(&inst, RecoveryRule::new(kind, k), Budget::Continuous(int(1))), &opts).unwrap().opt;
            prop_assert!(last.as_ref().is_none_or(|l| v <= *l));
            last = Some(v);
        }
        let rule = RecoveryRule::new(kind, 2);
        let mut last: Option<Rational> = None;
        for gamma in [int(0), ratio(1, 2), int(1), int(3)] {
            let v = solve(&with(&inst, rule, Budget::Continuous(gamma)), &opts).unwrap().opt;
            prop_assert!(last.as_ref().is_none_or(|l| *l <= v));
            last = Some(v);
        }
        let zero_cont = solve(&with(&inst, rule, Budget::Continuous(int(0))), &opts).unwrap();
        let zero_disc = solve(&with(&inst, rule, Budget::Discrete(0)), &opts).unwrap();
        prop_assert_eq!(zero_cont, zero_disc);
    }
}
