//! Worst-case second-stage scenarios for a fixed first-stage path.
//!
//! Continuous budgets use a cutting-plane loop: an LP over a growing pool of
//! recovery paths proposes a scenario, and the recovery DP either certifies
//! it or returns a cheaper path to add to the pool. Discrete budgets
//! enumerate extreme scenarios, which is lossless because the recovery cost
//! is nondecreasing in every arc cost.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation, Sense};
use crate::model::{
    arcs_cost, enumerate_st_paths, Arc, ArcId, Budget, Instance, Path, Scenario, Stage, DEFAULT_PATH_CAP,
};
use crate::rational::Rational;
use crate::recovery::{neighborhood_contains, RecoverySearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdversaryOptions {
    /// Cap on s-t paths enumerated by the full-enumeration variant.
    pub path_cap: usize,
    /// Cap on the recovery-path pool of the cutting-plane loop.
    pub pool_cap: usize,
    /// Cap on deviation subsets examined under a discrete budget.
    pub subset_cap: usize,
}

impl Default for AdversaryOptions {
    fn default() -> Self {
        AdversaryOptions {
            path_cap: DEFAULT_PATH_CAP,
            pool_cap: 100_000,
            subset_cap: 1_000_000,
        }
    }
}

/// A worst scenario, its value, and the recovery path attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorstCase {
    pub scenario: Scenario,
    pub value: Rational,
    pub recovery: Path,
}

/// Outcome of an adversary run that may stop once the value is known to
/// reach a cutoff.
#[derive(Clone, Debug)]
pub(crate) enum Bounded {
    Exact(WorstCase),
    /// The value reaches the cutoff.
    Pruned,
}

/// Dispatches on the instance's budget model.
pub fn worst_case(inst: &Instance, x: &Path, opts: &AdversaryOptions) -> Result<WorstCase> {
    match inst.budget {
        Budget::Continuous(_) => worst_continuous(inst, x, opts),
        Budget::Discrete(_) => worst_discrete(inst, x, opts),
    }
}

pub(crate) fn worst_case_with_cutoff(
    inst: &Instance,
    x: &Path,
    cutoff: Option<&Rational>,
    opts: &AdversaryOptions,
) -> Result<Bounded> {
    let search = RecoverySearch::new(inst, x)?;
    match &inst.budget {
        Budget::Continuous(gamma) => cutting_plane(inst, &search, gamma, cutoff, opts),
        Budget::Discrete(gamma) => extreme_scenarios(inst, &search, *gamma, cutoff, opts),
    }
}

fn exact(bounded: Bounded) -> WorstCase {
    match bounded {
        Bounded::Exact(w) => w,
        Bounded::Pruned => unreachable!("no cutoff was given"),
    }
}

/// Worst case under a continuous budget, by cutting planes.
pub fn worst_continuous(inst: &Instance, x: &Path, opts: &AdversaryOptions) -> Result<WorstCase> {
    let Budget::Continuous(gamma) = &inst.budget else {
        return Err(Error::BudgetMismatch("continuous adversary needs a continuous budget"));
    };
    let search = RecoverySearch::new(inst, x)?;
    cutting_plane(inst, &search, gamma, None, opts).map(exact)
}

fn no_recovery() -> Error {
    // The first-stage path is always its own neighbor.
    Error::InvalidPath("recovery neighborhood is empty".into())
}

fn cutting_plane(
    inst: &Instance,
    search: &RecoverySearch<'_>,
    gamma: &Rational,
    cutoff: Option<&Rational>,
    opts: &AdversaryOptions,
) -> Result<Bounded> {
    let g = &inst.graph;
    let nominal = search.best(&Scenario::nominal())?.ok_or_else(no_recovery)?;
    if cutoff.is_some_and(|c| nominal.cost >= *c) {
        return Ok(Bounded::Pruned);
    }
    let mut pool = vec![nominal.path];
    loop {
        if pool.len() > opts.pool_cap {
            return Err(Error::PoolOverflow { cap: opts.pool_cap });
        }
        let (bound, scenario) = restricted_adversary(inst, &pool, gamma)?;
        let found = search.best(&scenario)?.ok_or_else(no_recovery)?;
        if found.cost >= bound {
            debug_assert_eq!(found.cost, bound);
            debug_assert_eq!(arcs_cost(g, found.path.arcs(), Stage::Second(&scenario))?, found.cost);
            return Ok(Bounded::Exact(WorstCase {
                scenario,
                value: found.cost,
                recovery: found.path,
            }));
        }
        if cutoff.is_some_and(|c| found.cost >= *c) {
            return Ok(Bounded::Pruned);
        }
        pool.push(found.path);
    }
}

/// Maximizes the cheapest pool path's cost over the continuous budget set.
/// Arcs lying on exactly the same pool paths are aggregated into one
/// variable; the aggregate is spread back over them in ascending id order.
fn restricted_adversary(inst: &Instance, pool: &[Path], gamma: &Rational) -> Result<(Rational, Scenario)> {
    let g = &inst.graph;
    let mut signatures: BTreeMap<ArcId, Vec<usize>> = BTreeMap::new();
    for (p, path) in pool.iter().enumerate() {
        for &id in path.arcs() {
            let arc = g.arc(id).ok_or(Error::UnknownArc(id))?;
            if arc.deviation_cap.is_positive() {
                signatures.entry(id).or_default().push(p);
            }
        }
    }
    let mut groups: BTreeMap<Vec<usize>, Vec<&Arc>> = BTreeMap::new();
    for (id, signature) in signatures {
        groups.entry(signature).or_default().push(g.arc(id).expect("arc exists"));
    }

    let mut lp = LinearProgram::new(Sense::Maximize);
    let t = lp.add_variable(None, None, Rational::from_integer(1.into()));
    let mut group_vars = Vec::with_capacity(groups.len());
    let mut path_terms: Vec<Vec<(usize, Rational)>> = vec![vec![(t, Rational::from_integer(1.into()))]; pool.len()];
    for (signature, arcs) in &groups {
        let cap: Rational = arcs.iter().map(|a| &a.deviation_cap).sum();
        let var = lp.add_variable(Some(Rational::zero()), Some(cap), Rational::zero());
        for &p in signature {
            path_terms[p].push((var, Rational::from_integer((-1).into())));
        }
        group_vars.push(var);
    }
    for (path, terms) in pool.iter().zip(path_terms) {
        let nominal = arcs_cost(g, path.arcs(), Stage::Second(&Scenario::nominal()))?;
        lp.add_constraint(terms, Relation::Le, nominal);
    }
    if !group_vars.is_empty() {
        lp.add_constraint(
            group_vars.iter().map(|&v| (v, Rational::from_integer(1.into()))).collect(),
            Relation::Le,
            gamma.clone(),
        );
    }
    let solution = match lp_solve(&lp) {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::LpFailure("infeasible")),
        LpOutcome::Unbounded => return Err(Error::LpFailure("unbounded")),
    };
    let mut deviations = Vec::new();
    for (arcs, &var) in groups.values().zip(&group_vars) {
        let mut left = solution.point[var].clone();
        for arc in arcs {
            if !left.is_positive() {
                break;
            }
            let d = if left > arc.deviation_cap {
                arc.deviation_cap.clone()
            } else {
                left.clone()
            };
            left -= &d;
            deviations.push((arc.id, d));
        }
    }
    Ok((solution.value, Scenario::from_deviations(deviations)))
}

/// Worst case under a continuous budget from one LP over every path in the
/// neighborhood, found by enumeration and filtering. Serves as an oracle for
/// [`worst_continuous`].
pub fn worst_continuous_full(inst: &Instance, x: &Path, opts: &AdversaryOptions) -> Result<WorstCase> {
    let Budget::Continuous(gamma) = &inst.budget else {
        return Err(Error::BudgetMismatch("continuous adversary needs a continuous budget"));
    };
    let g = &inst.graph;
    let x = Path::new(g, x.arcs().to_vec())?;
    let neighbors: Vec<Path> = enumerate_st_paths(g, opts.path_cap)?
        .into_iter()
        .filter(|y| neighborhood_contains(&x, y, inst.rule))
        .collect();
    if neighbors.is_empty() {
        return Err(no_recovery());
    }

    let mut lp = LinearProgram::new(Sense::Maximize);
    let t = lp.add_variable(None, None, Rational::from_integer(1.into()));
    let mut var_of: BTreeMap<ArcId, usize> = BTreeMap::new();
    for y in &neighbors {
        for &id in y.arcs() {
            let arc = g.arc(id).ok_or(Error::UnknownArc(id))?;
            if arc.deviation_cap.is_positive() && !var_of.contains_key(&id) {
                let var = lp.add_variable(Some(Rational::zero()), Some(arc.deviation_cap.clone()), Rational::zero());
                var_of.insert(id, var);
            }
        }
    }
    // Paths with the same uncertain arcs give parallel rows; keep the tightest.
    let mut rows: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for y in &neighbors {
        let mut vars: Vec<usize> = y.arcs().iter().filter_map(|id| var_of.get(id).copied()).collect();
        vars.sort_unstable();
        let nominal = arcs_cost(g, y.arcs(), Stage::Second(&Scenario::nominal()))?;
        rows.entry(vars)
            .and_modify(|c| {
                if nominal < *c {
                    *c = nominal.clone();
                }
            })
            .or_insert(nominal);
    }
    for (vars, nominal) in rows {
        let mut terms = vec![(t, Rational::from_integer(1.into()))];
        terms.extend(vars.into_iter().map(|v| (v, Rational::from_integer((-1).into()))));
        lp.add_constraint(terms, Relation::Le, nominal);
    }
    if !var_of.is_empty() {
        lp.add_constraint(
            var_of.values().map(|&v| (v, Rational::from_integer(1.into()))).collect(),
            Relation::Le,
            gamma.clone(),
        );
    }
    let solution = match lp_solve(&lp) {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::LpFailure("infeasible")),
        LpOutcome::Unbounded => return Err(Error::LpFailure("unbounded")),
    };
    let scenario = Scenario::from_deviations(var_of.iter().map(|(&id, &v)| (id, solution.point[v].clone())));
    let mut best: Option<(Rational, &Path)> = None;
    for y in &neighbors {
        let cost = arcs_cost(g, y.arcs(), Stage::Second(&scenario))?;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, y));
        }
    }
    let (cost, recovery) = best.expect("neighborhood is nonempty");
    debug_assert_eq!(cost, solution.value);
    Ok(WorstCase {
        scenario,
        value: solution.value,
        recovery: recovery.clone(),
    })
}

/// Worst case under a discrete budget: the best of all extreme scenarios
/// raising at most `Γ` uncertain arcs to their upper cost. Ties go to the
/// lexicographically smallest arc subset.
pub fn worst_discrete(inst: &Instance, x: &Path, opts: &AdversaryOptions) -> Result<WorstCase> {
    let Budget::Discrete(gamma) = inst.budget else {
        return Err(Error::BudgetMismatch("discrete adversary needs a discrete budget"));
    };
    let search = RecoverySearch::new(inst, x)?;
    extreme_scenarios(inst, &search, gamma, None, opts).map(exact)
}

/// Number of subsets of size at most `max_size` drawn from `n` items,
/// saturating at `usize::MAX`.
pub fn subset_count(n: usize, max_size: usize) -> usize {
    let mut total: usize = 0;
    let mut binom: u128 = 1;
    for i in 0..=max_size.min(n) {
        if i > 0 {
            binom = binom * (n - i + 1) as u128 / i as u128;
        }
        total = total.saturating_add(usize::try_from(binom).unwrap_or(usize::MAX));
    }
    total
}

/// Calls `visit` on every subset of `0..n` with at most `max_size`
/// elements, in lexicographic order of the sorted index sequences. Stops
/// early when `visit` returns `false`.
pub fn for_each_subset<F>(n: usize, max_size: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<bool>,
{
    let mut subset: Vec<usize> = Vec::with_capacity(max_size);
    if !visit(&subset)? {
        return Ok(());
    }
    loop {
        let extend_from = subset.last().map_or(0, |&l| l + 1);
        if subset.len() < max_size && extend_from < n {
            subset.push(extend_from);
        } else {
            loop {
                match subset.pop() {
                    None => return Ok(()),
                    Some(last) if last + 1 < n => {
                        subset.push(last + 1);
                        break;
                    }
                    Some(_) => {}
                }
            }
        }
        if !visit(&subset)? {
            return Ok(());
        }
    }
}

pub(crate) fn uncertain_arcs(inst: &Instance) -> Vec<&Arc> {
    inst.graph.arcs().iter().filter(|a| a.deviation_cap.is_positive()).collect()
}

pub(crate) fn raised_scenario(arcs: &[&Arc], subset: &[usize]) -> Scenario {
    Scenario::from_deviations(subset.iter().map(|&i| (arcs[i].id, arcs[i].deviation_cap.clone())))
}

fn extreme_scenarios(
    inst: &Instance,
    search: &RecoverySearch<'_>,
    gamma: usize,
    cutoff: Option<&Rational>,
    opts: &AdversaryOptions,
) -> Result<Bounded> {
    let uncertain = uncertain_arcs(inst);
    let max_size = gamma.min(uncertain.len());
    if subset_count(uncertain.len(), max_size) > opts.subset_cap {
        return Err(Error::SubsetOverflow { cap: opts.subset_cap });
    }
    let mut best: Option<WorstCase> = None;
    let mut stopped = false;
    for_each_subset(uncertain.len(), max_size, |subset| {
        let scenario = raised_scenario(&uncertain, subset);
        let found = search.best(&scenario)?.ok_or_else(no_recovery)?;
        if cutoff.is_some_and(|c| found.cost >= *c) {
            stopped = true;
            return Ok(false);
        }
        if best.as_ref().is_none_or(|b| found.cost > b.value) {
            best = Some(WorstCase {
                scenario,
                value: found.cost,
                recovery: found.path,
            });
        }
        Ok(true)
    })?;
    if stopped {
        return Ok(Bounded::Pruned);
    }
    Ok(Bounded::Exact(best.expect("the empty subset is always visited")))
}
