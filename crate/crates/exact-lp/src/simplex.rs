//! Dense-tableau simplex over exact rationals.
//!
//! Every constraint is stored as one or two `≤` rows with their own slack
//! column, so the slack basis is always a valid starting point and rows can
//! be appended to a solved tableau. Free variables are split into a
//! positive and a negative column.
//!
//! A row is an integer vector over its own positive denominator, kept in
//! lowest terms. A pivot rewrites only the rows with a nonzero entry in the
//! pivot column, and individual entries are never normalised.
//!
//! Two loops drive the tableau:
//!
//! * the dual simplex restores primal feasibility while keeping reduced
//!   costs nonnegative (with zero costs it is a plain feasibility search);
//! * the primal simplex is only needed when the objective has negative
//!   reduced costs at a feasible basis.
//!
//! Both start with largest-violation choices and switch to least-index
//! choices (Bland's rule and its dual counterpart) after a run of
//! degenerate pivots, which rules out cycling. Results are a deterministic
//! function of the input problem and the order in which constraints were
//! added.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::problem::{LpOutcome, LpProblem, LpStatus, Relation, VarKind};
use crate::{Constraint, LpError, Rational, Result};

#[derive(Clone, Debug)]
pub struct Limits {
    /// Upper bound on pivots per call to [`Simplex::optimize`].
    pub max_pivots: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pivots: 2_000_000,
        }
    }
}

/// Degenerate pivots tolerated before switching to least-index rules.
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Unsolved,
    Optimal,
    Infeasible { row: usize },
    Unbounded,
}

/// `(a, b) / den` with `den > 0`.
#[derive(Clone, Debug)]
struct Row {
    a: Vec<BigInt>,
    b: BigInt,
    den: BigInt,
}

impl Row {
    fn value(&self, k: usize) -> Rational {
        Rational::new(self.a[k].clone(), self.den.clone())
    }

    fn rhs(&self) -> Rational {
        Rational::new(self.b.clone(), self.den.clone())
    }

    /// Positive denominator, common factor removed.
    fn reduce(&mut self) {
        if self.den.is_negative() {
            for x in self.a.iter_mut().chain([&mut self.b, &mut self.den]) {
                *x = -&*x;
            }
        }
        let mut g = self.den.clone();
        for x in self.a.iter().chain([&self.b]) {
            if g.is_one() {
                return;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if !g.is_one() {
            for x in self.a.iter_mut().chain([&mut self.b, &mut self.den]) {
                if !x.is_zero() {
                    *x = &*x / &g;
                }
            }
        }
    }

    /// `self − (self[j] / p[j]) · p` where `p[j] = p.den`, i.e. `p` has
    /// a unit entry in column `j`.
    fn eliminate(&mut self, p: &Row, nz: &[usize], j: usize) {
        let f = std::mem::take(&mut self.a[j]);
        if f.is_zero() {
            return;
        }
        if !p.den.is_one() {
            for x in self.a.iter_mut() {
                if !x.is_zero() {
                    *x *= &p.den;
                }
            }
            self.b *= &p.den;
            self.den *= &p.den;
        }
        for &k in nz {
            if k != j {
                self.a[k] -= &f * &p.a[k];
            }
        }
        self.b -= &f * &p.b;
        self.reduce();
    }
}

/// `x/y < u/v` for positive `y` and `v`.
fn frac_lt(x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) -> bool {
    x * v < u * y
}

#[derive(Clone, Debug)]
pub struct Simplex {
    problem: LpProblem,
    /// Original variable -> (positive column, negative column if free).
    var_cols: Vec<(usize, Option<usize>)>,
    n_struct: usize,
    /// Internal row -> (constraint index, stored negated).
    row_origin: Vec<(usize, bool)>,
    rows: Vec<Row>,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    /// Reduced costs; `b` holds minus the objective value.
    cost: Row,
    state: State,
    pivots: usize,
}

impl Simplex {
    pub fn new(problem: &LpProblem) -> Result<Self> {
        let mut var_cols = Vec::with_capacity(problem.num_vars());
        let mut n_struct = 0;
        for kind in problem.kinds() {
            match kind {
                VarKind::NonNeg => {
                    var_cols.push((n_struct, None));
                    n_struct += 1;
                }
                VarKind::Free => {
                    var_cols.push((n_struct, Some(n_struct + 1)));
                    n_struct += 2;
                }
            }
        }
        let mut cost = vec![Rational::zero(); n_struct];
        if let Some(obj) = problem.objective() {
            for (v, c) in obj {
                let (p, m) = var_cols[*v];
                cost[p] = c.clone();
                if let Some(m) = m {
                    cost[m] = -c;
                }
            }
        }
        let den = crate::rational::common_denominator(&cost);
        let cost = Row {
            a: cost.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect(),
            b: BigInt::zero(),
            den,
        };
        let mut s = Simplex {
            problem: LpProblem::new(),
            var_cols,
            n_struct,
            row_origin: Vec::new(),
            rows: Vec::new(),
            basis: Vec::new(),
            basic_row: vec![None; n_struct],
            cost,
            state: State::Unsolved,
            pivots: 0,
        };
        // Rebuild the problem variable by variable so that added constraints
        // go through one code path.
        for (name, kind) in problem.names().iter().zip(problem.kinds()) {
            s.problem.add_var(name.clone(), *kind);
        }
        if let Some(obj) = problem.objective() {
            s.problem.set_objective(obj.to_vec())?;
        }
        for c in problem.constraints() {
            s.add_constraint(c.clone())?;
        }
        s.state = State::Unsolved;
        Ok(s)
    }

    /// The original problem plus every constraint added since.
    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a constraint; the tableau is re-expressed in the current
    /// basis so a later [`optimize`](Self::optimize) warm-starts.
    pub fn add_constraint(&mut self, constraint: Constraint) -> Result<usize> {
        let idx = self.problem.add_constraint(constraint)?;
        let c = &self.problem.constraints()[idx];
        let rows: Vec<(bool, Vec<(usize, Rational)>, Rational)> = match c.relation {
            Relation::Le => vec![(false, c.coeffs.clone(), c.rhs.clone())],
            Relation::Ge => vec![(true, negate(&c.coeffs), -c.rhs.clone())],
            Relation::Eq => vec![
                (false, c.coeffs.clone(), c.rhs.clone()),
                (true, negate(&c.coeffs), -c.rhs.clone()),
            ],
        };
        for (negated, coeffs, rhs) in rows {
            self.push_row(idx, negated, &coeffs, rhs);
        }
        if !matches!(self.state, State::Infeasible { .. }) {
            self.state = State::Unsolved;
        }
        Ok(idx)
    }

    fn push_row(&mut self, origin: usize, negated: bool, coeffs: &[(usize, Rational)], rhs: Rational) {
        let slack = self.width();
        for row in &mut self.rows {
            row.a.push(BigInt::zero());
        }
        self.cost.a.push(BigInt::zero());
        self.basic_row.push(None);
        let den = crate::rational::common_denominator(coeffs.iter().map(|(_, a)| a).chain([&rhs]));
        let scaled = |v: &Rational| (v * Rational::from_integer(den.clone())).to_integer();
        let mut row = Row {
            a: vec![BigInt::zero(); slack + 1],
            b: scaled(&rhs),
            den: den.clone(),
        };
        for (v, a) in coeffs {
            let (p, m) = self.var_cols[*v];
            row.a[p] += scaled(a);
            if let Some(m) = m {
                row.a[m] -= scaled(a);
            }
        }
        row.a[slack] = den;
        for r in 0..self.rows.len() {
            let col = self.basis[r];
            if row.a[col].is_zero() {
                continue;
            }
            let p = &self.rows[r];
            let nz: Vec<usize> = (0..p.a.len()).filter(|&k| !p.a[k].is_zero()).collect();
            row.eliminate(p, &nz, col);
        }
        row.reduce();
        self.rows.push(row);
        self.basis.push(slack);
        self.basic_row[slack] = Some(self.rows.len() - 1);
        self.row_origin.push((origin, negated));
    }

    fn width(&self) -> usize {
        self.n_struct + self.rows.len()
    }

    fn pivot(&mut self, r: usize, j: usize) {
        {
            let p = &mut self.rows[r];
            p.den = p.a[j].clone();
            p.reduce();
        }
        let p = self.rows[r].clone();
        let nz: Vec<usize> = (0..p.a.len()).filter(|&k| !p.a[k].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                row.eliminate(&p, &nz, j);
            }
        }
        self.cost.eliminate(&p, &nz, j);
        let old = self.basis[r];
        self.basic_row[old] = None;
        self.basis[r] = j;
        self.basic_row[j] = Some(r);
        self.pivots += 1;
    }

    /// Dual simplex. Returns the index of a row proving infeasibility, if any.
    fn dual_phase(&mut self, use_costs: bool, budget: &mut usize) -> Result<Option<usize>> {
        let mut bland = false;
        let mut run = 0;
        loop {
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                let row = &self.rows[r];
                if !row.b.is_negative() {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(l) if bland => self.basis[r] < self.basis[l],
                    Some(l) => {
                        let o = &self.rows[l];
                        frac_lt(&row.b, &row.den, &o.b, &o.den)
                            || (!frac_lt(&o.b, &o.den, &row.b, &row.den) && self.basis[r] < self.basis[l])
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
            let Some(r) = leave else { return Ok(None) };
            let row = &self.rows[r];
            let mut enter: Option<usize> = None;
            for j in 0..self.width() {
                let a = &row.a[j];
                if !a.is_negative() || self.basic_row[j].is_some() {
                    continue;
                }
                if !use_costs {
                    enter = Some(j);
                    break;
                }
                // ratio cost_j / −a, compared within one row
                let better = match enter {
                    None => true,
                    Some(e) => frac_lt(&self.cost.a[j], &-a, &self.cost.a[e], &-&row.a[e]),
                };
                if better {
                    enter = Some(j);
                }
            }
            let Some(j) = enter else { return Ok(Some(r)) };
            self.spend(budget)?;
            let degenerate = !use_costs || self.cost.a[j].is_zero();
            run = if degenerate { run + 1 } else { 0 };
            bland |= run > DEGENERATE_RUN + if use_costs { 0 } else { self.width() };
            self.pivot(r, j);
        }
    }

    /// Primal simplex from a feasible basis. Returns `false` if unbounded.
    fn primal_phase(&mut self, budget: &mut usize) -> Result<bool> {
        let mut bland = false;
        let mut run = 0;
        loop {
            let candidates = (0..self.width())
                .filter(|&j| self.basic_row[j].is_none() && self.cost.a[j].is_negative());
            let enter = if bland {
                candidates.min()
            } else {
                candidates.min_by(|&x, &y| self.cost.a[x].cmp(&self.cost.a[y]).then(x.cmp(&y)))
            };
            let Some(j) = enter else { return Ok(true) };
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r].a[j];
                if !a.is_positive() {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let (b, bl, al) = (&self.rows[r].b, &self.rows[l].b, &self.rows[l].a[j]);
                        match (b * al).cmp(&(bl * a)) {
                            Ordering::Less => true,
                            Ordering::Equal => self.basis[r] < self.basis[l],
                            Ordering::Greater => false,
                        }
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
            let Some(r) = leave else { return Ok(false) };
            self.spend(budget)?;
            run = if self.rows[r].b.is_zero() { run + 1 } else { 0 };
            bland |= run > DEGENERATE_RUN;
            self.pivot(r, j);
        }
    }

    fn spend(&self, budget: &mut usize) -> Result<()> {
        if *budget == 0 {
            return Err(LpError::PivotLimit(self.pivots));
        }
        *budget -= 1;
        Ok(())
    }

    pub fn optimize(&mut self, limits: &Limits) -> Result<LpStatus> {
        let mut budget = limits.max_pivots;
        if let State::Infeasible { .. } = self.state {
            return Ok(LpStatus::Infeasible);
        }
        let has_objective = self.problem.objective().is_some();
        let dual_feasible = (0..self.width())
            .all(|j| self.basic_row[j].is_some() || !self.cost.a[j].is_negative());
        self.state = if has_objective && !dual_feasible {
            match self.dual_phase(false, &mut budget)? {
                Some(row) => State::Infeasible { row },
                None if self.primal_phase(&mut budget)? => State::Optimal,
                None => State::Unbounded,
            }
        } else {
            match self.dual_phase(has_objective, &mut budget)? {
                Some(row) => State::Infeasible { row },
                None => State::Optimal,
            }
        };
        Ok(self.status())
    }

    pub fn status(&self) -> LpStatus {
        match self.state {
            State::Unsolved => panic!("status queried before optimize"),
            State::Infeasible { .. } => LpStatus::Infeasible,
            State::Unbounded => LpStatus::Unbounded,
            State::Optimal if self.problem.objective().is_some() => LpStatus::Optimal,
            State::Optimal => LpStatus::Feasible,
        }
    }

    /// Current basic solution in terms of the original variables.
    pub fn primal(&self) -> Vec<Rational> {
        let col_value = |c: usize| match self.basic_row[c] {
            Some(r) => self.rows[r].rhs(),
            None => Rational::zero(),
        };
        self.var_cols
            .iter()
            .map(|&(p, m)| match m {
                Some(m) => col_value(p) - col_value(m),
                None => col_value(p),
            })
            .collect()
    }

    /// Folds per-internal-row multipliers into per-constraint multipliers.
    fn fold_rows(&self, per_row: impl Fn(usize) -> Rational) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.problem.constraints().len()];
        for (i, &(c, negated)) in self.row_origin.iter().enumerate() {
            let y = per_row(i);
            if y.is_zero() {
                continue;
            }
            if negated && self.problem.constraints()[c].relation == Relation::Eq {
                out[c] -= y;
            } else {
                out[c] += y;
            }
        }
        out
    }

    pub fn outcome(&self) -> LpOutcome {
        let status = self.status();
        let mut out = LpOutcome {
            status,
            witness: None,
            value: None,
            farkas: None,
            dual: None,
        };
        let n = self.n_struct;
        match self.state {
            State::Infeasible { row } => {
                out.farkas = Some(self.fold_rows(|i| self.rows[row].value(n + i)));
            }
            State::Optimal => {
                out.witness = Some(self.primal());
                if self.problem.objective().is_some() {
                    out.value = Some(-self.cost.rhs());
                    out.dual = Some(self.fold_rows(|i| self.cost.value(n + i)));
                }
            }
            State::Unbounded => out.witness = Some(self.primal()),
            State::Unsolved => unreachable!(),
        }
        out
    }
}

fn negate(row: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    row.iter().map(|(i, a)| (*i, -a)).collect()
}
