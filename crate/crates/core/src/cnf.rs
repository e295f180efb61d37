//! CNF formulas with at most three literals per clause.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A signed variable index in DIMACS convention: `3` is x3, `-3` its negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(i32);

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        let v = i32::try_from(var).expect("variable index fits in i32");
        Literal(if positive { v } else { -v })
    }

    pub fn from_dimacs(value: i32) -> Option<Self> {
        (value != 0).then_some(Literal(value))
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    /// One-based variable index.
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negated(self) -> Self {
        Literal(-self.0)
    }

    /// Truth value under an assignment indexed from zero.
    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var() - 1] == self.is_positive()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "~x{}", self.var())
        }
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<Literal>>,
}

pub const MAX_CLAUSE_LEN: usize = 3;

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (j, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::Precondition(format!("clause {} is empty", j + 1)));
            }
            if clause.len() > MAX_CLAUSE_LEN {
                return Err(Error::Precondition(format!(
                    "clause {} has {} literals, at most {MAX_CLAUSE_LEN} allowed",
                    j + 1,
                    clause.len()
                )));
            }
            if let Some(lit) = clause.iter().find(|l| l.var() > variable_count) {
                return Err(Error::Precondition(format!(
                    "clause {} mentions x{} but the formula has {variable_count} variables",
                    j + 1,
                    lit.var()
                )));
            }
        }
        Ok(CnfFormula {
            variable_count,
            clauses,
        })
    }

    /// Builds a formula from DIMACS-style signed integers.
    pub fn from_dimacs(variable_count: usize, clauses: &[&[i32]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&v| Literal::from_dimacs(v).ok_or_else(|| Error::Precondition("zero literal".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CnfFormula::new(variable_count, clauses)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Distinct literals of clause `j`, in first-occurrence order.
    pub fn literal_set(&self, j: usize) -> Vec<Literal> {
        let mut set: Vec<Literal> = Vec::with_capacity(MAX_CLAUSE_LEN);
        for &lit in &self.clauses[j] {
            if !set.contains(&lit) {
                set.push(lit);
            }
        }
        set
    }

    pub fn clause_satisfied(&self, j: usize, assignment: &[bool]) -> bool {
        self.clauses[j].iter().any(|l| l.holds(assignment))
    }

    pub fn satisfied_count(&self, assignment: &[bool]) -> usize {
        (0..self.clauses.len()).filter(|&j| self.clause_satisfied(j, assignment)).count()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, clause) in self.clauses.iter().enumerate() {
            if j > 0 {
                f.write_str(" & ")?;
            }
            f.write_str("(")?;
            for (i, lit) in clause.iter().enumerate() {
                if i > 0 {
                    f.write_str(" | ")?;
                }
                write!(f, "{lit}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}
