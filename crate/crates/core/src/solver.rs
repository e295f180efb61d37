//! The outer minimization: the first-stage path minimizing first-stage cost
//! plus worst-case recovery cost.

use std::ops::ControlFlow;

use crate::adversary::{
    for_each_subset, raised_scenario, subset_count, uncertain_arcs, worst_case, worst_case_with_cutoff,
    worst_continuous_full, AdversaryOptions, Bounded, WorstCase,
};
use crate::error::{Error, Result};
use crate::model::{
    arcs_cost, enumerate_st_paths, for_each_st_path, path_cost, Budget, Instance, Path, Scenario, Stage,
    DEFAULT_PATH_CAP,
};
use crate::rational::Rational;
use crate::recovery::neighborhood_contains;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Cap on enumerated first-stage paths.
    pub path_cap: usize,
    pub adversary: AdversaryOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            path_cap: DEFAULT_PATH_CAP,
            adversary: AdversaryOptions::default(),
        }
    }
}

impl SolveOptions {
    pub fn with_path_cap(path_cap: usize) -> Self {
        SolveOptions {
            path_cap,
            adversary: AdversaryOptions {
                path_cap,
                ..AdversaryOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub opt: Rational,
    pub first_stage: Path,
    pub worst_scenario: Scenario,
    pub best_recovery: Path,
    /// First-stage paths whose worst case was (at least partially) evaluated.
    pub explored: usize,
}

impl SolveResult {
    fn new(first_cost: Rational, first_stage: Path, worst: WorstCase, explored: usize) -> Self {
        SolveResult {
            opt: first_cost + worst.value,
            first_stage,
            worst_scenario: worst.scenario,
            best_recovery: worst.recovery,
            explored,
        }
    }
}

/// Exact optimum by scoring every first-stage path in lexicographic order.
///
/// A path is skipped as soon as its first-stage cost plus a lower bound on
/// its worst case reaches the incumbent; the adversary stops early once its
/// running lower bound does. Ties keep the lexicographically first path.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveResult> {
    inst.ensure_valid()?;
    let g = &inst.graph;
    let mut best: Option<SolveResult> = None;
    let mut explored = 0usize;
    let mut seen = 0usize;
    let mut failure: Option<Error> = None;
    let mut overflow = false;

    let mut score = |arcs: &[crate::model::ArcId], best: &mut Option<SolveResult>| -> Result<()> {
        let first = arcs_cost(g, arcs, Stage::First)?;
        let x = Path::from_arcs_unchecked(arcs.to_vec());
        match best {
            None => {
                explored += 1;
                let worst = worst_case(inst, &x, &opts.adversary)?;
                *best = Some(SolveResult::new(first, x, worst, 0));
            }
            Some(incumbent) => {
                if first >= incumbent.opt {
                    return Ok(());
                }
                let cutoff = &incumbent.opt - &first;
                explored += 1;
                if let Bounded::Exact(worst) = worst_case_with_cutoff(inst, &x, Some(&cutoff), &opts.adversary)? {
                    if worst.value < cutoff {
                        *best = Some(SolveResult::new(first, x, worst, 0));
                    }
                }
            }
        }
        Ok(())
    };

    for_each_st_path(g, |arcs| {
        seen += 1;
        if seen > opts.path_cap {
            overflow = true;
            return ControlFlow::Break(());
        }
        match score(arcs, &mut best) {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let result = best.map(|mut r| {
        r.explored = explored;
        r
    });
    if overflow {
        return Err(Error::SolveOverflow {
            cap: opts.path_cap,
            partial: result.map(Box::new),
        });
    }
    result.ok_or(Error::InvalidInstance(vec!["no path from source to sink".into()]))
}

/// Exhaustive reference solver: no pruning, the continuous adversary solved
/// as one LP over the enumerated neighborhood, the discrete adversary by
/// evaluating every extreme scenario against every neighbor.
pub fn brute_solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveResult> {
    inst.ensure_valid()?;
    let g = &inst.graph;
    let paths = enumerate_st_paths(g, opts.path_cap)?;
    let mut best: Option<SolveResult> = None;
    for x in &paths {
        let first = path_cost(g, x, Stage::First)?;
        let worst = match &inst.budget {
            Budget::Continuous(_) => worst_continuous_full(inst, x, &opts.adversary)?,
            Budget::Discrete(gamma) => brute_discrete(inst, x, &paths, *gamma, &opts.adversary)?,
        };
        if best.as_ref().is_none_or(|b| &first + &worst.value < b.opt) {
            best = Some(SolveResult::new(first, x.clone(), worst, 0));
        }
    }
    let mut result = best.ok_or(Error::InvalidInstance(vec!["no path from source to sink".into()]))?;
    result.explored = paths.len();
    Ok(result)
}

fn brute_discrete(
    inst: &Instance,
    x: &Path,
    paths: &[Path],
    gamma: usize,
    opts: &AdversaryOptions,
) -> Result<WorstCase> {
    let g = &inst.graph;
    let neighbors: Vec<&Path> = paths.iter().filter(|y| neighborhood_contains(x, y, inst.rule)).collect();
    let uncertain = uncertain_arcs(inst);
    let max_size = gamma.min(uncertain.len());
    if subset_count(uncertain.len(), max_size) > opts.subset_cap {
        return Err(Error::SubsetOverflow { cap: opts.subset_cap });
    }
    let mut best: Option<WorstCase> = None;
    for_each_subset(uncertain.len(), max_size, |subset| {
        let scenario = raised_scenario(&uncertain, subset);
        let mut cheapest: Option<(Rational, &Path)> = None;
        for y in &neighbors {
            let cost = path_cost(g, y, Stage::Second(&scenario))?;
            if cheapest.as_ref().is_none_or(|(c, _)| cost < *c) {
                cheapest = Some((cost, y));
            }
        }
        let (value, recovery) = cheapest.expect("x is its own neighbor");
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(WorstCase {
                scenario,
                value,
                recovery: recovery.clone(),
            });
        }
        Ok(true)
    })?;
    Ok(best.expect("the empty subset is always visited"))
}
