//! Independent certificate checks.
//!
//! Nothing here touches the tableau: each check recombines the problem's
//! own rows with the multipliers it is handed, in exact arithmetic.

use num_traits::{Signed, Zero};

use crate::problem::{LpOutcome, LpProblem, LpStatus, Relation, VarKind};
use crate::rational::format;
use crate::{LpError, Rational, Result};

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(LpError::Certificate(msg.into()))
}

/// Every constraint and sign bound holds at `x`.
pub fn check_witness(problem: &LpProblem, x: &[Rational]) -> Result<()> {
    if x.len() != problem.num_vars() {
        return fail(format!("witness has {} entries, expected {}", x.len(), problem.num_vars()));
    }
    for (i, (v, k)) in x.iter().zip(problem.kinds()).enumerate() {
        if *k == VarKind::NonNeg && v.is_negative() {
            return fail(format!("variable {i} is negative"));
        }
    }
    for (i, c) in problem.constraints().iter().enumerate() {
        if !c.is_satisfied(x) {
            return fail(format!("constraint {i} violated: {c}"));
        }
    }
    Ok(())
}

/// Sign conditions on multipliers and `Σ λ·row` accumulated into a dense
/// coefficient vector plus right-hand side.
fn combine(problem: &LpProblem, lambda: &[Rational]) -> Result<(Vec<Rational>, Rational)> {
    let cs = problem.constraints();
    if lambda.len() != cs.len() {
        return fail(format!("{} multipliers for {} constraints", lambda.len(), cs.len()));
    }
    let mut g = vec![Rational::zero(); problem.num_vars()];
    let mut rhs = Rational::zero();
    for (i, (c, y)) in cs.iter().zip(lambda).enumerate() {
        if y.is_zero() {
            continue;
        }
        if c.relation != Relation::Eq && y.is_negative() {
            return fail(format!("negative multiplier on inequality {i}"));
        }
        let (row, b) = c.normalized();
        for (j, a) in row {
            g[j] += y * a;
        }
        rhs += y * b;
    }
    Ok((g, rhs))
}

/// `λ` proves infeasibility: the combined row is `≥ 0` on nonnegative
/// variables, zero on free ones, and its right-hand side is negative.
pub fn check_farkas(problem: &LpProblem, lambda: &[Rational]) -> Result<()> {
    let (g, rhs) = combine(problem, lambda)?;
    for (j, (gj, k)) in g.iter().zip(problem.kinds()).enumerate() {
        let ok = match k {
            VarKind::Free => gj.is_zero(),
            VarKind::NonNeg => !gj.is_negative(),
        };
        if !ok {
            return fail(format!("combined coefficient {} on variable {j}", format(gj)));
        }
    }
    if !rhs.is_negative() {
        return fail(format!("combined right-hand side {} is not negative", format(&rhs)));
    }
    Ok(())
}

/// Checks the dual vector `y` and returns the lower bound it proves on the
/// objective over the feasible region.
pub fn dual_bound(problem: &LpProblem, y: &[Rational]) -> Result<Rational> {
    let Some(obj) = problem.objective() else {
        return fail("dual bound requested for a feasibility problem");
    };
    let (mut g, rhs) = combine(problem, y)?;
    for (j, c) in obj {
        g[*j] += c;
    }
    for (j, (gj, k)) in g.iter().zip(problem.kinds()).enumerate() {
        let ok = match k {
            VarKind::Free => gj.is_zero(),
            VarKind::NonNeg => !gj.is_negative(),
        };
        if !ok {
            return fail(format!("dual reduced cost {} on variable {j}", format(gj)));
        }
    }
    Ok(-rhs)
}

/// Checks whatever certificate `outcome` carries for its status.
pub fn check_outcome(problem: &LpProblem, outcome: &LpOutcome) -> Result<()> {
    match outcome.status {
        LpStatus::Infeasible => match &outcome.farkas {
            Some(l) => check_farkas(problem, l),
            None => fail("infeasible outcome without Farkas multipliers"),
        },
        LpStatus::Feasible | LpStatus::Unbounded => match &outcome.witness {
            Some(x) => check_witness(problem, x),
            None => fail("feasible outcome without witness"),
        },
        LpStatus::Optimal => {
            let (Some(x), Some(v), Some(y)) = (&outcome.witness, &outcome.value, &outcome.dual)
            else {
                return fail("optimal outcome missing witness, value or dual");
            };
            check_witness(problem, x)?;
            let attained = problem.objective_value(x).unwrap_or_default();
            if attained != *v {
                return fail(format!("objective at witness is {}, reported {}", format(&attained), format(v)));
            }
            let bound = dual_bound(problem, y)?;
            if bound != *v {
                return fail(format!("dual bound {} differs from value {}", format(&bound), format(v)));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn bounds() -> LpProblem {
        let mut p = LpProblem::new();
        p.add_var("x", VarKind::Free);
        p.constrain(vec![(0, int(1))], Relation::Ge, int(1)).unwrap();
        p.constrain(vec![(0, int(1))], Relation::Le, int(0)).unwrap();
        p
    }

    #[test]
    fn farkas_accepts_and_rejects() {
        let p = bounds();
        check_farkas(&p, &[int(1), int(1)]).unwrap();
        check_farkas(&p, &[int(2), int(2)]).unwrap();
        assert!(check_farkas(&p, &[int(1), int(2)]).is_err());
        assert!(check_farkas(&p, &[int(-1), int(-1)]).is_err());
        assert!(check_farkas(&p, &[int(0), int(0)]).is_err());
        assert!(check_farkas(&p, &[int(1)]).is_err());
    }

    #[test]
    fn witness_rejects_violations() {
        let mut p = LpProblem::new();
        p.add_var("x", VarKind::NonNeg);
        p.constrain(vec![(0, int(1))], Relation::Le, int(3)).unwrap();
        check_witness(&p, &[int(3)]).unwrap();
        assert!(check_witness(&p, &[int(4)]).is_err());
        assert!(check_witness(&p, &[int(-1)]).is_err());
    }

    #[test]
    fn dual_bound_value() {
        // min x s.t. x >= 5: y = 1 on the (negated) row gives bound 5
        let mut p = LpProblem::new();
        p.add_var("x", VarKind::Free);
        p.set_objective(vec![(0, int(1))]).unwrap();
        p.constrain(vec![(0, int(1))], Relation::Ge, int(5)).unwrap();
        assert_eq!(dual_bound(&p, &[int(1)]).unwrap(), int(5));
        assert!(dual_bound(&p, &[int(2)]).is_err());
    }
}
