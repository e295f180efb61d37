//! Recovery neighborhoods and the inner minimization: the cheapest
//! second-stage path inside the neighborhood of a first-stage path.
//!
//! The search is a label-setting DP over the topological order. Each label
//! carries a single integer resource whose meaning depends on the kind:
//!
//! | kind | resource per arc            | feasible at the sink      |
//! |------|-----------------------------|---------------------------|
//! | incl | +1 if the arc is new        | resource ≤ k              |
//! | excl | -1 if the arc is shared     | resource ≤ k - \|X\|      |
//! | sym  | +1 new, -1 shared           | resource ≤ k - \|X\|      |
//!
//! With `a` new and `b` shared arcs these are `a`, `|X∖Y| - |X|` and
//! `|Y∖X| + |X∖Y| - |X|`. Lower is always better, so labels at a node are
//! kept as a Pareto front over (resource, cost, arc sequence).

use std::collections::HashSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{ArcId, Instance, NeighborhoodKind, Path, RecoveryRule, Scenario};
use crate::rational::Rational;

/// Whether `y` lies in the neighborhood of `x` under `rule`.
pub fn neighborhood_contains(x: &Path, y: &Path, rule: RecoveryRule) -> bool {
    let xs: HashSet<ArcId> = x.arcs().iter().copied().collect();
    let ys: HashSet<ArcId> = y.arcs().iter().copied().collect();
    let added = ys.difference(&xs).count();
    let dropped = xs.difference(&ys).count();
    let size = match rule.kind {
        NeighborhoodKind::Incl => added,
        NeighborhoodKind::Excl => dropped,
        NeighborhoodKind::Sym => added + dropped,
    };
    size <= rule.k
}

/// A recovery path together with its realized second-stage cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovery {
    pub path: Path,
    pub cost: Rational,
}

/// The minimum second-stage cost path in the neighborhood of `x` under
/// scenario `scenario`. Among equal costs the lexicographically smallest
/// arc sequence wins. `None` only if the neighborhood is empty.
pub fn best_recovery(inst: &Instance, x: &Path, scenario: &Scenario) -> Result<Option<Recovery>> {
    scenario.check(inst)?;
    RecoverySearch::new(inst, x)?.best(scenario)
}

/// Per-first-stage-path precomputation, reusable across scenarios.
#[derive(Debug)]
pub struct RecoverySearch<'a> {
    inst: &'a Instance,
    /// Indexed like `graph.arcs()`.
    shared: Vec<bool>,
    /// Most first-stage arcs any path from the node to the sink can pick up.
    max_shared: Vec<i64>,
    bound: i64,
}

#[derive(Clone, Debug)]
struct Label {
    resource: i64,
    cost: Rational,
    arcs: Vec<ArcId>,
}

impl Label {
    fn no_worse_than(&self, other: &Label) -> bool {
        self.resource <= other.resource && (&self.cost, &self.arcs) <= (&other.cost, &other.arcs)
    }
}

impl<'a> RecoverySearch<'a> {
    pub fn new(inst: &'a Instance, x: &Path) -> Result<Self> {
        let g = &inst.graph;
        let x = Path::new(g, x.arcs().to_vec())?;
        let mut shared = vec![false; g.arc_count()];
        for &id in x.arcs() {
            shared[g.arc_index(id).ok_or(Error::UnknownArc(id))?] = true;
        }
        let order = g.order_slice()?;
        let mut max_shared = vec![i64::MIN; g.node_count()];
        max_shared[g.sink()] = 0;
        for &v in order.iter().rev() {
            if v == g.sink() {
                continue;
            }
            for &i in g.out_indices(v) {
                let head = g.arcs()[i].head;
                if max_shared[head] != i64::MIN {
                    max_shared[v] = max_shared[v].max(max_shared[head] + i64::from(shared[i]));
                }
            }
        }
        let len = x.len() as i64;
        let k = inst.rule.k as i64;
        let bound = match inst.rule.kind {
            NeighborhoodKind::Incl => k,
            NeighborhoodKind::Excl | NeighborhoodKind::Sym => k - len,
        };
        Ok(RecoverySearch {
            inst,
            shared,
            max_shared,
            bound,
        })
    }

    fn step(&self, arc_index: usize) -> i64 {
        let shared = self.shared[arc_index];
        match self.inst.rule.kind {
            NeighborhoodKind::Incl => i64::from(!shared),
            NeighborhoodKind::Excl => -i64::from(shared),
            NeighborhoodKind::Sym => {
                if shared {
                    -1
                } else {
                    1
                }
            }
        }
    }

    fn hopeless(&self, resource: i64, node: usize) -> bool {
        match self.inst.rule.kind {
            NeighborhoodKind::Incl => resource > self.bound,
            NeighborhoodKind::Excl | NeighborhoodKind::Sym => resource - self.max_shared[node] > self.bound,
        }
    }

    pub fn best(&self, scenario: &Scenario) -> Result<Option<Recovery>> {
        let g = &self.inst.graph;
        let order = g.order_slice()?;
        let mut fronts: Vec<Vec<Label>> = vec![Vec::new(); g.node_count()];
        fronts[g.source()].push(Label {
            resource: 0,
            cost: Rational::zero(),
            arcs: Vec::new(),
        });
        for &v in order {
            if v == g.sink() {
                continue;
            }
            let labels = std::mem::take(&mut fronts[v]);
            for label in &labels {
                for &i in g.out_indices(v) {
                    let arc = &g.arcs()[i];
                    if self.max_shared[arc.head] == i64::MIN {
                        continue;
                    }
                    let mut resource = label.resource + self.step(i);
                    if self.inst.rule.kind == NeighborhoodKind::Excl {
                        // Excl resources only fall, so anything at or below
                        // the bound is equally feasible.
                        resource = resource.max(self.bound);
                    }
                    if self.hopeless(resource, arc.head) {
                        continue;
                    }
                    let mut arcs = Vec::with_capacity(label.arcs.len() + 1);
                    arcs.extend_from_slice(&label.arcs);
                    arcs.push(arc.id);
                    insert_label(
                        &mut fronts[arc.head],
                        Label {
                            resource,
                            cost: &label.cost + scenario.cost(arc),
                            arcs,
                        },
                    );
                }
            }
        }
        let best = fronts[g.sink()]
            .iter()
            .filter(|l| l.resource <= self.bound)
            .min_by(|a, b| (&a.cost, &a.arcs).cmp(&(&b.cost, &b.arcs)));
        Ok(best.map(|l| Recovery {
            path: Path::from_arcs_unchecked(l.arcs.clone()),
            cost: l.cost.clone(),
        }))
    }
}

fn insert_label(front: &mut Vec<Label>, label: Label) {
    if front.iter().any(|e| e.no_worse_than(&label)) {
        return;
    }
    front.retain(|e| !label.no_worse_than(e));
    front.push(label);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_st_paths, path_cost, Arc, Budget, Digraph, Stage};
    use crate::rational::int;

    /// s=0 → 1 → 3=t via arcs 0,1 (nominal 5 each) and s → 2 → t via arcs
    /// 2,3 (nominal 1 each), plus a direct arc 4 (nominal 3).
    fn diamond(kind: NeighborhoodKind, k: usize) -> Instance {
        let arcs = vec![
            Arc::new(0, 0, 1).with_costs(int(0), int(5), int(1)),
            Arc::new(1, 1, 3).with_costs(int(0), int(5), int(1)),
            Arc::new(2, 0, 2).with_costs(int(0), int(1), int(1)),
            Arc::new(3, 2, 3).with_costs(int(0), int(1), int(1)),
            Arc::new(4, 0, 3).with_costs(int(0), int(3), int(1)),
        ];
        let g = Digraph::new(4, arcs, 0, 3).unwrap();
        Instance::new(g, RecoveryRule::new(kind, k), Budget::Continuous(int(1)))
    }

    fn path(inst: &Instance, ids: &[u32]) -> Path {
        Path::new(&inst.graph, ids.iter().map(|&i| ArcId(i)).collect()).unwrap()
    }

    #[test]
    fn identity_is_always_a_neighbor() {
        let inst = diamond(NeighborhoodKind::Incl, 0);
        let x = path(&inst, &[0, 1]);
        for kind in NeighborhoodKind::ALL {
            assert!(neighborhood_contains(&x, &x, RecoveryRule::new(kind, 0)));
        }
    }

    #[test]
    fn disjoint_long_path_not_included() {
        let arcs = (0..5)
            .map(|i| Arc::new(i, i as usize, i as usize + 1))
            .chain([Arc::new(5, 0, 5)])
            .collect();
        let g = Digraph::new(6, arcs, 0, 5).unwrap();
        let y = Path::new(&g, (0..5).map(ArcId).collect()).unwrap();
        let x = Path::new(&g, vec![ArcId(5)]).unwrap();
        assert!(!neighborhood_contains(&x, &y, RecoveryRule::new(NeighborhoodKind::Incl, 4)));
        assert!(neighborhood_contains(&x, &y, RecoveryRule::new(NeighborhoodKind::Incl, 5)));
        assert!(neighborhood_contains(&x, &y, RecoveryRule::new(NeighborhoodKind::Excl, 1)));
        assert!(!neighborhood_contains(&x, &y, RecoveryRule::new(NeighborhoodKind::Sym, 5)));
    }

    #[test]
    fn large_k_gives_global_shortest_path() {
        let inst = diamond(NeighborhoodKind::Incl, 10);
        let x = path(&inst, &[0, 1]);
        let r = best_recovery(&inst, &x, &Scenario::nominal()).unwrap().unwrap();
        assert_eq!(r.cost, int(2));
        assert_eq!(r.path, path(&inst, &[2, 3]));
    }

    #[test]
    fn sym_zero_keeps_first_stage_path() {
        let inst = diamond(NeighborhoodKind::Sym, 0);
        let x = path(&inst, &[0, 1]);
        let sc = Scenario::from_deviations([(ArcId(1), int(1))]);
        let r = best_recovery(&inst, &x, &sc).unwrap().unwrap();
        assert_eq!(r.path, x);
        assert_eq!(r.cost, int(11));
    }

    #[test]
    fn incl_budget_of_one_allows_direct_arc_only() {
        let inst = diamond(NeighborhoodKind::Incl, 1);
        let x = path(&inst, &[0, 1]);
        let r = best_recovery(&inst, &x, &Scenario::nominal()).unwrap().unwrap();
        assert_eq!(r.path, path(&inst, &[4]));
        assert_eq!(r.cost, int(3));
    }

    #[test]
    fn ties_go_to_lexicographically_smallest_path() {
        let arcs = vec![
            Arc::new(0, 0, 1).with_costs(int(0), int(1), int(0)),
            Arc::new(1, 1, 2).with_costs(int(0), int(1), int(0)),
            Arc::new(2, 0, 2).with_costs(int(0), int(2), int(0)),
        ];
        let g = Digraph::new(3, arcs, 0, 2).unwrap();
        let inst = Instance::new(g, RecoveryRule::new(NeighborhoodKind::Sym, 9), Budget::Continuous(int(0)));
        let x = path(&inst, &[2]);
        let r = best_recovery(&inst, &x, &Scenario::nominal()).unwrap().unwrap();
        assert_eq!(r.path, path(&inst, &[0, 1]));
    }

    #[test]
    fn foreign_first_stage_path_is_rejected() {
        let inst = diamond(NeighborhoodKind::Incl, 1);
        let bogus = Path::from_arcs_unchecked(vec![ArcId(1)]);
        assert!(best_recovery(&inst, &bogus, &Scenario::nominal()).is_err());
    }

    #[test]
    fn matches_filtering_on_every_k() {
        for kind in NeighborhoodKind::ALL {
            for k in 0..5 {
                let inst = diamond(kind, k);
                let sc = Scenario::from_deviations([(ArcId(2), int(1))]);
                let all = enumerate_st_paths(&inst.graph, 100).unwrap();
                for x in &all {
                    let brute = all
                        .iter()
                        .filter(|y| neighborhood_contains(x, y, inst.rule))
                        .map(|y| path_cost(&inst.graph, y, Stage::Second(&sc)).unwrap())
                        .min()
                        .unwrap();
                    let dp = best_recovery(&inst, x, &sc).unwrap().unwrap();
                    assert_eq!(dp.cost, brute, "{kind} k={k} x={x}");
                    assert!(neighborhood_contains(x, &dp.path, inst.rule));
                }
            }
        }
    }
}
