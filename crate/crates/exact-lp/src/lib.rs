//! Exact rational linear programming.
//!
//! Every number in this crate is an arbitrary-precision rational, so the
//! solver never rounds. Outcomes carry certificates: a primal witness for
//! feasible problems, a dual vector bounding the optimum from below, or a
//! Farkas multiplier vector proving infeasibility. [`certificate`] checks
//! them along a code path that shares nothing with the simplex itself.
//!
//! On top of [`solve`] sit row generation ([`solve_lazy`]) for systems with
//! far more constraints than are ever active, L1 minimisation over free
//! variables ([`min_l1`]) and depth-first branch-and-bound ([`ilp_min`]).

pub mod bnb;
pub mod certificate;
pub mod l1;
pub mod lazy;
pub mod problem;
pub mod rational;
pub mod simplex;
pub mod text;

pub use bnb::{ilp_min, BnbLimits, IlpOutcome, IlpStatus};
pub use l1::{ilp_min_l1, min_l1, L1Outcome};
pub use lazy::{solve_lazy, LazyOutcome, NoOracle, RowOracle};
pub use problem::{Constraint, LpOutcome, LpProblem, LpStatus, Relation, VarKind};
pub use rational::Rational;
pub use simplex::{Limits, Simplex};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("variable index {index} out of range for {count} variables")]
    Dimension { index: usize, count: usize },
    #[error("pivot limit of {0} exceeded")]
    PivotLimit(usize),
    #[error("row generation did not converge within {0} rounds")]
    RoundLimit(usize),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, LpError>;

/// Solves `problem` from scratch and re-checks the resulting certificate.
pub fn solve(problem: &LpProblem) -> Result<LpOutcome> {
    solve_with(problem, &Limits::default())
}

pub fn solve_with(problem: &LpProblem, limits: &Limits) -> Result<LpOutcome> {
    let mut simplex = Simplex::new(problem)?;
    simplex.optimize(limits)?;
    let outcome = simplex.outcome();
    certificate::check_outcome(problem, &outcome)?;
    Ok(outcome)
}
