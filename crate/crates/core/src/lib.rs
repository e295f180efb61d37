//! Exact solver and verification toolkit for the recoverable robust shortest
//! path problem on acyclic digraphs under budgeted interval uncertainty.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: graphs, instances, paths, scenarios and their validation.
//! - [`recovery`]: neighborhood tests and the inner min-cost recovery DP.
//! - [`lp`] and [`adversary`]: exact simplex and worst-case scenarios.
//! - [`solver`]: the outer minimization with witnesses.
//! - [`reductions`]: Hamiltonian-path and MAX-3SAT instance generators.
//! - [`oracles`]: brute-force source solvers and reduction verifiers.
//! - [`io`]: instance documents, edge lists and DIMACS CNF.

pub mod adversary;
pub mod cnf;
pub mod error;
pub mod gen;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracles;
pub mod rational;
pub mod recovery;
pub mod reductions;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    Arc, ArcId, ArcRole, Budget, Digraph, Instance, NeighborhoodKind, Path, RecoveryRule, Scenario,
};
pub use rational::Rational;
pub use solver::{brute_solve, solve, SolveOptions, SolveResult};
