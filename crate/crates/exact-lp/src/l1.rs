//! Minimum L1 norm over a polyhedron, `min Σ|c_m|`.
//!
//! Each free variable is split as `c = c⁺ − c⁻` with both parts
//! nonnegative and unit cost. Constraint rows keep their index, so
//! multipliers reported for the split problem apply verbatim to the
//! original one.

use crate::bnb::{ilp_min, BnbLimits, IlpOutcome};
use crate::lazy::{solve_lazy, LazyOutcome, RowOracle};
use crate::problem::{Constraint, LpProblem, LpStatus, VarKind};
use crate::rational::int;
use crate::simplex::Limits;
use crate::{Rational, Result};
use num_traits::{Signed, Zero};

#[derive(Clone, Debug)]
pub struct L1Outcome {
    pub status: LpStatus,
    pub value: Option<Rational>,
    /// Optimal point in the original variables.
    pub coefficients: Option<Vec<Rational>>,
    /// The split problem as solved, with its certificate.
    pub lazy: LazyOutcome,
}

struct Split {
    /// Original variable -> (positive column, negative column if free).
    cols: Vec<(usize, Option<usize>)>,
    width: usize,
}

impl Split {
    fn new(problem: &LpProblem) -> Self {
        let mut cols = Vec::with_capacity(problem.num_vars());
        let mut width = 0;
        for k in problem.kinds() {
            match k {
                VarKind::Free => {
                    cols.push((width, Some(width + 1)));
                    width += 2;
                }
                VarKind::NonNeg => {
                    cols.push((width, None));
                    width += 1;
                }
            }
        }
        Split { cols, width }
    }

    fn row(&self, c: &Constraint) -> Constraint {
        let mut coeffs = Vec::with_capacity(2 * c.coeffs.len());
        for (v, a) in &c.coeffs {
            let (p, m) = self.cols[*v];
            coeffs.push((p, a.clone()));
            if let Some(m) = m {
                coeffs.push((m, -a));
            }
        }
        Constraint::new(coeffs, c.relation, c.rhs.clone())
    }

    fn problem(&self, original: &LpProblem) -> LpProblem {
        let mut p = LpProblem::new();
        for (name, (_, m)) in original.names().iter().zip(&self.cols) {
            p.add_var(format!("{name}+"), VarKind::NonNeg);
            if m.is_some() {
                p.add_var(format!("{name}-"), VarKind::NonNeg);
            }
        }
        p.set_objective((0..self.width).map(|i| (i, int(1))).collect())
            .expect("objective within range");
        for c in original.constraints() {
            p.add_constraint(self.row(c)).expect("row within range");
        }
        p
    }

    fn merge(&self, x: &[Rational]) -> Vec<Rational> {
        self.cols
            .iter()
            .map(|&(p, m)| match m {
                Some(m) => &x[p] - &x[m],
                None => x[p].clone(),
            })
            .collect()
    }

    fn spread(&self, c: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.width];
        for (v, &(p, m)) in c.iter().zip(&self.cols) {
            match m {
                Some(m) if v.is_negative() => x[m] = -v,
                _ => x[p] = v.clone(),
            }
        }
        x
    }
}

struct SplitOracle<'a> {
    split: &'a Split,
    inner: &'a dyn RowOracle,
}

impl RowOracle for SplitOracle<'_> {
    fn separate(&self, x: &[Rational]) -> Vec<(usize, Constraint)> {
        self.inner
            .separate(&self.split.merge(x))
            .into_iter()
            .map(|(t, c)| (t, self.split.row(&c)))
            .collect()
    }
}

/// Exact rational `min Σ|c|` subject to `problem`'s rows (its objective,
/// if any, is ignored) and the rows served by `oracle`.
pub fn min_l1(problem: &LpProblem, oracle: &dyn RowOracle, limits: &Limits) -> Result<L1Outcome> {
    let split = Split::new(problem);
    let lp = split.problem(problem);
    let lazy = solve_lazy(&lp, &SplitOracle { split: &split, inner: oracle }, limits)?;
    let coefficients = lazy.outcome.witness.as_ref().map(|x| split.merge(x));
    Ok(L1Outcome {
        status: lazy.outcome.status,
        value: lazy.outcome.value.clone(),
        coefficients,
        lazy,
    })
}

/// Integer `min Σ|c|`. The returned witness is in the original variables.
pub fn ilp_min_l1(
    problem: &LpProblem,
    oracle: &dyn RowOracle,
    incumbent: Option<&[Rational]>,
    limits: &BnbLimits,
) -> Result<IlpOutcome> {
    let split = Split::new(problem);
    let lp = split.problem(problem);
    let all: Vec<usize> = (0..split.width).collect();
    let seed = incumbent.map(|c| split.spread(c));
    let mut out = ilp_min(&lp, &all, &SplitOracle { split: &split, inner: oracle }, seed, limits)?;
    out.witness = out.witness.map(|x| split.merge(&x));
    Ok(out)
}
