//! Exact linear programming: a dense two-phase tableau simplex over
//! rationals with Bland's anti-cycling rule.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Variable {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    pub point: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: Vec::new(),
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// Adds a variable and returns its index.
    pub fn add_variable(&mut self, lower: Option<Rational>, upper: Option<Rational>, objective: Rational) -> usize {
        self.variables.push(Variable { lower, upper });
        self.objective.push(objective);
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn objective_value(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }

    /// Whether `point` satisfies every bound and constraint exactly.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        if point.len() != self.variables.len() {
            return false;
        }
        let bounds_ok = self.variables.iter().zip(point).all(|(v, x)| {
            v.lower.as_ref().is_none_or(|l| x >= l) && v.upper.as_ref().is_none_or(|u| x <= u)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().map(|(j, a)| a * &point[*j]).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }
}

/// How an original variable is expressed through nonnegative columns.
enum Substitution {
    /// x = lower + y
    Shifted { column: usize, lower: Rational },
    /// x = upper - y
    Mirrored { column: usize, upper: Rational },
    /// x = y⁺ - y⁻
    Split { plus: usize, minus: usize },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    enterable: Vec<bool>,
}

enum Pivoting {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn set_objective(&mut self, cost: &[Rational]) {
        let mut reduced = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].is_zero() {
                continue;
            }
            for (r, a) in reduced.iter_mut().zip(row) {
                if !a.is_zero() {
                    *r -= &cost[b] * a;
                }
            }
        }
        self.reduced = reduced;
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let p = self.rows[pr][pc].clone();
        for a in self.rows[pr].iter_mut() {
            if !a.is_zero() {
                *a /= &p;
            }
        }
        self.rhs[pr] /= &p;
        let prow = self.rows[pr].clone();
        let prhs = self.rhs[pr].clone();
        for i in 0..self.rows.len() {
            if i == pr || self.rows[i][pc].is_zero() {
                continue;
            }
            let f = self.rows[i][pc].clone();
            for (a, b) in self.rows[i].iter_mut().zip(&prow) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.reduced[pc].clone();
        if !f.is_zero() {
            for (r, b) in self.reduced.iter_mut().zip(&prow) {
                if !b.is_zero() {
                    *r -= &f * b;
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Maximizes the current objective with Bland's rule.
    fn run(&mut self) -> Pivoting {
        loop {
            let entering = (0..self.reduced.len()).find(|&j| self.enterable[j] && self.reduced[j].is_positive());
            let Some(pc) = entering else {
                return Pivoting::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][pc];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((pr, _)) => self.pivot(pr, pc),
                None => return Pivoting::Unbounded,
            }
        }
    }
}

/// Solves `lp` exactly.
pub fn lp_solve(lp: &LinearProgram) -> LpOutcome {
    // Nonnegative columns for the original variables.
    let mut subs = Vec::with_capacity(lp.variables.len());
    let mut columns = 0usize;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for v in &lp.variables {
        let sub = match (&v.lower, &v.upper) {
            (Some(lower), upper) => {
                if let Some(upper) = upper {
                    bound_rows.push((columns, upper - lower));
                }
                Substitution::Shifted {
                    column: columns,
                    lower: lower.clone(),
                }
            }
            (None, Some(upper)) => Substitution::Mirrored {
                column: columns,
                upper: upper.clone(),
            },
            (None, None) => {
                columns += 1;
                Substitution::Split {
                    plus: columns - 1,
                    minus: columns,
                }
            }
        };
        columns += 1;
        subs.push(sub);
    }
    let structural = columns;

    // Rows over structural columns: (coefficients, relation, rhs).
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut coeffs = vec![Rational::zero(); structural];
        let mut rhs = c.rhs.clone();
        for (j, a) in &c.coeffs {
            match &subs[*j] {
                Substitution::Shifted { column, lower } => {
                    coeffs[*column] += a;
                    rhs -= a * lower;
                }
                Substitution::Mirrored { column, upper } => {
                    coeffs[*column] -= a;
                    rhs -= a * upper;
                }
                Substitution::Split { plus, minus } => {
                    coeffs[*plus] += a;
                    coeffs[*minus] -= a;
                }
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (column, width) in bound_rows {
        let mut coeffs = vec![Rational::zero(); structural];
        coeffs[column] = Rational::from_integer(1.into());
        rows.push((coeffs, Relation::Le, width));
    }

    let mut objective = vec![Rational::zero(); structural];
    for (j, c) in lp.objective.iter().enumerate() {
        let c = match lp.sense {
            Sense::Maximize => c.clone(),
            Sense::Minimize => -c,
        };
        match &subs[j] {
            Substitution::Shifted { column, .. } => objective[*column] += &c,
            Substitution::Mirrored { column, .. } => objective[*column] -= &c,
            Substitution::Split { plus, minus } => {
                objective[*plus] += &c;
                objective[*minus] -= &c;
            }
        }
    }

    // Slack and artificial columns.
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let total_before_art = structural + slack_count;
    let mut basis = vec![usize::MAX; rows.len()];
    let mut artificial_rows = Vec::new();
    let mut next_slack = structural;
    let mut tab_rows = Vec::with_capacity(rows.len());
    let mut tab_rhs = Vec::with_capacity(rows.len());
    for (i, (mut row, relation, mut rhs)) in rows.into_iter().enumerate() {
        row.resize(total_before_art, Rational::zero());
        let mut slack = match relation {
            Relation::Le => Some((next_slack, 1)),
            Relation::Ge => Some((next_slack, -1)),
            Relation::Eq => None,
        };
        if slack.is_some() {
            next_slack += 1;
        }
        if rhs.is_negative() {
            for a in row.iter_mut() {
                *a = -&*a;
            }
            rhs = -rhs;
            slack = slack.map(|(c, s)| (c, -s));
        }
        if let Some((c, s)) = slack {
            row[c] = Rational::from_integer(s.into());
            if s == 1 {
                basis[i] = c;
            }
        }
        if basis[i] == usize::MAX {
            artificial_rows.push(i);
        }
        tab_rows.push(row);
        tab_rhs.push(rhs);
    }
    let total = total_before_art + artificial_rows.len();
    for row in tab_rows.iter_mut() {
        row.resize(total, Rational::zero());
    }
    for (a, &i) in artificial_rows.iter().enumerate() {
        let col = total_before_art + a;
        tab_rows[i][col] = Rational::from_integer(1.into());
        basis[i] = col;
    }

    let mut tab = Tableau {
        rows: tab_rows,
        rhs: tab_rhs,
        basis,
        reduced: Vec::new(),
        enterable: vec![true; total],
    };

    if !artificial_rows.is_empty() {
        let mut phase1 = vec![Rational::zero(); total];
        for c in phase1.iter_mut().skip(total_before_art) {
            *c = Rational::from_integer((-1).into());
        }
        tab.set_objective(&phase1);
        // Phase one is bounded above by zero.
        let _ = tab.run();
        let infeasibility: Rational = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .filter(|(&b, _)| b >= total_before_art)
            .map(|(_, r)| r.clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= total_before_art {
                match (0..total_before_art).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for e in tab.enterable.iter_mut().skip(total_before_art) {
            *e = false;
        }
    }

    let mut phase2 = objective;
    phase2.resize(total, Rational::zero());
    tab.set_objective(&phase2);
    if let Pivoting::Unbounded = tab.run() {
        return LpOutcome::Unbounded;
    }

    let mut y = vec![Rational::zero(); total];
    for (&b, r) in tab.basis.iter().zip(&tab.rhs) {
        y[b] = r.clone();
    }
    let point: Vec<Rational> = subs
        .iter()
        .map(|s| match s {
            Substitution::Shifted { column, lower } => lower + &y[*column],
            Substitution::Mirrored { column, upper } => upper - &y[*column],
            Substitution::Split { plus, minus } => &y[*plus] - &y[*minus],
        })
        .collect();
    let value = lp.objective_value(&point);
    LpOutcome::Optimal(LpSolution { value, point })
}
