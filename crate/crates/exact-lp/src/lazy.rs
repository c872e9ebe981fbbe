//! Row generation for systems whose rows are cheap to test but too many to
//! hand to the tableau at once.
//!
//! The base problem is solved, the oracle reports rows of the full system
//! violated by the current point, those rows are appended and the tableau
//! re-optimised from its current basis. A Farkas vector over the generated
//! subsystem is a certificate for the full system, and an optimum that the
//! oracle accepts is optimal for the full system.

use crate::certificate;
use crate::problem::{Constraint, LpOutcome, LpProblem, LpStatus};
use crate::simplex::{Limits, Simplex};
use crate::{LpError, Rational, Result};

pub trait RowOracle {
    /// Rows of the full system violated at `x`, each with a caller-chosen
    /// tag. An empty result means `x` satisfies every row.
    fn separate(&self, x: &[Rational]) -> Vec<(usize, Constraint)>;
}

/// The base problem is already the full system.
pub struct NoOracle;

impl RowOracle for NoOracle {
    fn separate(&self, _x: &[Rational]) -> Vec<(usize, Constraint)> {
        Vec::new()
    }
}

#[derive(Clone, Debug)]
pub struct LazyOutcome {
    /// Indexed over the base constraints followed by the generated ones.
    pub outcome: LpOutcome,
    /// The base problem with every generated row appended.
    pub problem: LpProblem,
    pub base_rows: usize,
    /// Oracle tags of the generated rows, in the order they were added.
    pub tags: Vec<usize>,
    pub rounds: usize,
}

impl LazyOutcome {
    /// Multipliers of the generated rows paired with their tags, dropping
    /// zeros. Useful for mapping a Farkas vector back to the full system.
    pub fn tagged(&self, multipliers: &[Rational]) -> Vec<(usize, Rational)> {
        use num_traits::Zero;
        self.tags
            .iter()
            .zip(&multipliers[self.base_rows..])
            .filter(|(_, y)| !y.is_zero())
            .map(|(t, y)| (*t, y.clone()))
            .collect()
    }
}

pub const DEFAULT_MAX_ROUNDS: usize = 100_000;

/// Re-optimises `simplex` until the oracle accepts the point or the
/// problem is proven infeasible. Generated tags are appended to `tags`.
pub fn optimize_lazy(
    simplex: &mut Simplex,
    oracle: &dyn RowOracle,
    limits: &Limits,
    tags: &mut Vec<usize>,
) -> Result<(LpStatus, usize)> {
    for round in 1..=DEFAULT_MAX_ROUNDS {
        let status = simplex.optimize(limits)?;
        if status == LpStatus::Infeasible {
            return Ok((status, round));
        }
        let cuts = oracle.separate(&simplex.primal());
        if cuts.is_empty() {
            return Ok((status, round));
        }
        for (tag, c) in cuts {
            simplex.add_constraint(c)?;
            tags.push(tag);
        }
    }
    Err(LpError::RoundLimit(DEFAULT_MAX_ROUNDS))
}

pub fn solve_lazy(
    problem: &LpProblem,
    oracle: &dyn RowOracle,
    limits: &Limits,
) -> Result<LazyOutcome> {
    let mut simplex = Simplex::new(problem)?;
    let mut tags = Vec::new();
    let (_, rounds) = optimize_lazy(&mut simplex, oracle, limits, &mut tags)?;
    let outcome = simplex.outcome();
    certificate::check_outcome(simplex.problem(), &outcome)?;
    Ok(LazyOutcome {
        outcome,
        problem: simplex.problem().clone(),
        base_rows: problem.constraints().len(),
        tags,
        rounds,
    })
}
