use std::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{self, Rational};
use crate::{LpError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Free,
    NonNeg,
}

/// `Σ coeffs · x  (relation)  rhs`, stored sparse with sorted, distinct,
/// nonzero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs: normalize_row(coeffs),
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(x), &self.rhs)
    }

    /// The `≤` form used by certificates: `Ge` rows are negated, `Le` and
    /// `Eq` rows are returned unchanged.
    pub fn normalized(&self) -> (Vec<(usize, Rational)>, Rational) {
        match self.relation {
            Relation::Ge => (
                self.coeffs.iter().map(|(i, a)| (*i, -a)).collect(),
                -self.rhs.clone(),
            ),
            Relation::Le | Relation::Eq => (self.coeffs.clone(), self.rhs.clone()),
        }
    }

    fn max_index(&self) -> Option<usize> {
        self.coeffs.last().map(|(i, _)| *i)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, a)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{} x{}", rational::format(a), i)?;
        }
        write!(f, " {} {}", self.relation.symbol(), rational::format(&self.rhs))
    }
}

pub(crate) fn normalize_row(mut coeffs: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    coeffs.sort_by_key(|(i, _)| *i);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
    for (i, a) in coeffs {
        match out.last_mut() {
            Some((j, b)) if *j == i => *b += a,
            _ => out.push((i, a)),
        }
    }
    out.retain(|(_, a)| !a.is_zero());
    out
}

pub(crate) fn dot(row: &[(usize, Rational)], x: &[Rational]) -> Rational {
    row.iter()
        .fold(Rational::zero(), |acc, (i, a)| acc + a * &x[*i])
}

/// A linear program over named variables. Minimisation only; a problem
/// without objective is a pure feasibility question.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpProblem {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    objective: Option<Vec<(usize, Rational)>>,
    constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind) -> usize {
        self.names.push(name.into());
        self.kinds.push(kind);
        self.names.len() - 1
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rational)>) -> Result<()> {
        let row = normalize_row(coeffs);
        self.check_row(&row)?;
        self.objective = Some(row);
        Ok(())
    }

    pub fn add_constraint(&mut self, constraint: Constraint) -> Result<usize> {
        if let Some(i) = constraint.max_index() {
            if i >= self.num_vars() {
                return Err(LpError::Dimension {
                    index: i,
                    count: self.num_vars(),
                });
            }
        }
        self.constraints.push(constraint);
        Ok(self.constraints.len() - 1)
    }

    pub fn constrain(
        &mut self,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<usize> {
        self.add_constraint(Constraint::new(coeffs, relation, rhs))
    }

    fn check_row(&self, row: &[(usize, Rational)]) -> Result<()> {
        match row.last() {
            Some((i, _)) if *i >= self.num_vars() => Err(LpError::Dimension {
                index: *i,
                count: self.num_vars(),
            }),
            _ => Ok(()),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn objective(&self) -> Option<&[(usize, Rational)]> {
        self.objective.as_deref()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective_value(&self, x: &[Rational]) -> Option<Rational> {
        self.objective.as_ref().map(|c| dot(c, x))
    }

    /// Largest absolute violation of any constraint or sign bound at `x`.
    pub fn max_violation(&self, x: &[Rational]) -> Rational {
        let mut worst = Rational::zero();
        for c in &self.constraints {
            let lhs = c.lhs(x);
            let v = match c.relation {
                Relation::Le => &lhs - &c.rhs,
                Relation::Ge => &c.rhs - &lhs,
                Relation::Eq => (&lhs - &c.rhs).abs(),
            };
            if v > worst {
                worst = v;
            }
        }
        for (v, k) in x.iter().zip(&self.kinds) {
            if *k == VarKind::NonNeg && v.is_negative() && -v > worst {
                worst = -v;
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
}

/// Result of a solve, indexed like the problem that produced it.
///
/// `farkas` and `dual` hold one multiplier per constraint, applied to the
/// constraint's [`Constraint::normalized`] form.
#[derive(Clone, Debug, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub witness: Option<Vec<Rational>>,
    pub value: Option<Rational>,
    pub farkas: Option<Vec<Rational>>,
    pub dual: Option<Vec<Rational>>,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(
            self.status,
            LpStatus::Optimal | LpStatus::Feasible | LpStatus::Unbounded
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rows_are_merged_and_pruned() {
        let c = Constraint::new(
            vec![(2, int(1)), (0, int(3)), (2, int(-1)), (0, int(1))],
            Relation::Le,
            int(0),
        );
        assert_eq!(c.coeffs, vec![(0, int(4))]);
    }

    #[test]
    fn out_of_range_rejected() {
        let mut p = LpProblem::new();
        p.add_var("x", VarKind::Free);
        let err = p
            .constrain(vec![(1, int(1))], Relation::Le, int(0))
            .unwrap_err();
        assert_eq!(err, LpError::Dimension { index: 1, count: 1 });
        assert!(p.set_objective(vec![(3, int(1))]).is_err());
    }
}
