//! Depth-first branch-and-bound over exact LP relaxations.
//!
//! Each child adds one bound row to its parent's solved tableau, so the
//! dual simplex warm-starts. Only the most recent deferred siblings keep a
//! tableau; older ones are stored as their list of bound rows and rebuilt
//! from the solved root when popped. Branching picks the most fractional
//! integer variable (lowest index on ties) and explores the nearer rounding
//! first.

use num_traits::{One, Signed};

use crate::certificate;
use crate::lazy::{optimize_lazy, RowOracle};
use crate::problem::{Constraint, LpProblem, LpStatus, Relation};
use crate::rational::fractionality;
use crate::simplex::{Limits, Simplex};
use crate::{LpError, Rational, Result};

#[derive(Clone, Debug)]
pub struct BnbLimits {
    pub max_nodes: usize,
    /// Deferred siblings that keep their tableau; older ones are rebuilt.
    pub max_live: usize,
    pub lp: Limits,
}

impl Default for BnbLimits {
    fn default() -> Self {
        BnbLimits {
            max_nodes: 100_000,
            max_live: 64,
            lp: Limits::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IlpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node budget spent; `value`/`witness` hold the best incumbent, if any,
    /// and `lower_bound` the best proven bound.
    NodeLimit,
}

#[derive(Clone, Debug)]
pub struct IlpOutcome {
    pub status: IlpStatus,
    pub value: Option<Rational>,
    pub witness: Option<Vec<Rational>>,
    /// Root relaxation value.
    pub relaxation: Option<Rational>,
    pub lower_bound: Option<Rational>,
    pub nodes: usize,
}

struct Pending {
    tableau: Option<Simplex>,
    /// Branching rows from the root.
    path: Vec<Constraint>,
    /// Parent relaxation value.
    bound: Option<Rational>,
}

fn is_integral(x: &[Rational], vars: &[usize]) -> bool {
    vars.iter().all(|&i| x[i].is_integer())
}

fn accept(
    problem: &LpProblem,
    oracle: &dyn RowOracle,
    integer_vars: &[usize],
    x: &[Rational],
) -> Result<()> {
    certificate::check_witness(problem, x)?;
    if !oracle.separate(x).is_empty() {
        return Err(LpError::Certificate("incumbent violates generated rows".into()));
    }
    if !is_integral(x, integer_vars) {
        return Err(LpError::Certificate("incumbent is not integral".into()));
    }
    Ok(())
}

enum SearchEnd {
    /// Every node was solved or pruned.
    Exhausted,
    /// Stopped at the first integral point inside the cutoff.
    Hit,
    /// Node budget spent; the least bound among open nodes.
    Budget(Option<Rational>),
    Unbounded,
}

type Best = Option<(Rational, Vec<Rational>)>;

struct Search<'a> {
    problem: &'a LpProblem,
    integer_vars: &'a [usize],
    oracle: &'a dyn RowOracle,
    limits: &'a BnbLimits,
    /// Integer costs on integer variables only: objective values of
    /// integral points are integers and node bounds can be rounded up.
    integral_objective: bool,
    nodes: usize,
    scratch: Vec<usize>,
}

impl Search<'_> {
    fn objective(&self, x: &[Rational]) -> Rational {
        self.problem.objective_value(x).unwrap_or_default()
    }

    /// Whether no point below `bound` can beat `cutoff`.
    fn prunes(&self, bound: &Rational, cutoff: Option<&Rational>) -> bool {
        match cutoff {
            None => false,
            Some(v) if self.integral_objective => bound.ceil() >= *v,
            Some(v) => bound >= v,
        }
    }

    /// Depth-first search below the solved `root`, improving on `best` and
    /// on `cutoff` (an exclusive upper bound on accepted values).
    fn run(&mut self, root: &Simplex, best: &mut Best, cutoff: Option<Rational>, stop_first: bool) -> Result<SearchEnd> {
        let mut cutoff = match (cutoff, best.as_ref()) {
            (Some(c), Some((v, _))) => Some(c.min(v.clone())),
            (c, b) => c.or_else(|| b.map(|(v, _)| v.clone())),
        };
        let mut stack = vec![Pending {
            tableau: Some(root.clone()),
            path: Vec::new(),
            bound: None,
        }];
        while let Some(pending) = stack.pop() {
            if let Some(bound) = &pending.bound {
                if self.prunes(bound, cutoff.as_ref()) {
                    continue;
                }
            }
            if self.nodes >= self.limits.max_nodes {
                stack.push(pending);
                let open = stack
                    .iter()
                    .map(|p| p.bound.clone().unwrap_or_else(|| self.objective(&root.primal())))
                    .min();
                return Ok(SearchEnd::Budget(open));
            }
            let Pending { tableau, path, .. } = pending;
            let mut node = match tableau {
                Some(t) => t,
                None => {
                    let mut t = root.clone();
                    for c in &path {
                        t.add_constraint(c.clone())?;
                    }
                    t
                }
            };
            self.nodes += 1;
            let (status, _) = optimize_lazy(&mut node, self.oracle, &self.limits.lp, &mut self.scratch)?;
            match status {
                LpStatus::Infeasible => continue,
                LpStatus::Unbounded => return Ok(SearchEnd::Unbounded),
                LpStatus::Optimal | LpStatus::Feasible => {}
            }
            let x = node.primal();
            let bound = self.objective(&x);
            if self.prunes(&bound, cutoff.as_ref()) {
                continue;
            }
            let branch = self
                .integer_vars
                .iter()
                .map(|&i| (i, fractionality(&x[i])))
                .filter(|(_, f)| f.is_positive())
                .fold(None::<(usize, Rational)>, |acc, (i, f)| match acc {
                    Some((_, ref g)) if *g >= f => acc,
                    _ => Some((i, f)),
                });
            let Some((j, _)) = branch else {
                cutoff = Some(bound.clone());
                *best = Some((bound, x));
                if stop_first {
                    return Ok(SearchEnd::Hit);
                }
                continue;
            };
            let down = Constraint::new(vec![(j, Rational::one())], Relation::Le, x[j].floor());
            let up = Constraint::new(vec![(j, Rational::one())], Relation::Ge, x[j].ceil());
            let up_first = &x[j] - x[j].floor() >= Rational::new(One::one(), 2.into());
            let (first, second) = if up_first { (up, down) } else { (down, up) };
            let mut later = path.clone();
            later.push(second.clone());
            let mut sibling = None;
            if self.limits.max_live > 0 {
                if stack.iter().filter(|p| p.tableau.is_some()).count() >= self.limits.max_live {
                    if let Some(oldest) = stack.iter_mut().find(|p| p.tableau.is_some()) {
                        oldest.tableau = None;
                    }
                }
                let mut t = node.clone();
                t.add_constraint(second)?;
                sibling = Some(t);
            }
            stack.push(Pending {
                tableau: sibling,
                path: later,
                bound: Some(bound.clone()),
            });
            let mut path = path;
            path.push(first.clone());
            node.add_constraint(first)?;
            stack.push(Pending {
                tableau: Some(node),
                path,
                bound: Some(bound),
            });
        }
        Ok(SearchEnd::Exhausted)
    }
}

/// Minimises the problem's objective (zero if absent) with `integer_vars`
/// restricted to integers. `incumbent`, when given, must be a feasible
/// integral point and seeds the upper bound.
///
/// With an integral objective the search runs in stages: stage `t` only
/// explores nodes whose bound rounds up to at most `t`, starting from the
/// rounded root bound, so the first integral point found is optimal.
pub fn ilp_min(
    problem: &LpProblem,
    integer_vars: &[usize],
    oracle: &dyn RowOracle,
    incumbent: Option<Vec<Rational>>,
    limits: &BnbLimits,
) -> Result<IlpOutcome> {
    let integral_objective = problem.objective().map_or(true, |obj| {
        obj.iter()
            .all(|(i, c)| c.is_integer() && integer_vars.contains(i))
    });
    let mut search = Search {
        problem,
        integer_vars,
        oracle,
        limits,
        integral_objective,
        nodes: 0,
        scratch: Vec::new(),
    };
    let mut best: Best = None;
    if let Some(x) = incumbent {
        accept(problem, oracle, integer_vars, &x)?;
        best = Some((search.objective(&x), x));
    }
    let outcome = |status, best: Best, relaxation: Option<Rational>, lower_bound, nodes| {
        let (value, witness) = best.map(|(v, x)| (Some(v), Some(x))).unwrap_or((None, None));
        IlpOutcome {
            status,
            value,
            witness,
            relaxation,
            lower_bound,
            nodes,
        }
    };

    let mut root = Simplex::new(problem)?;
    search.nodes = 1;
    let (status, _) = optimize_lazy(&mut root, oracle, &limits.lp, &mut search.scratch)?;
    match status {
        LpStatus::Infeasible => return Ok(outcome(IlpStatus::Infeasible, None, None, None, 1)),
        LpStatus::Unbounded => return Ok(outcome(IlpStatus::Unbounded, None, None, None, 1)),
        LpStatus::Optimal | LpStatus::Feasible => {}
    }
    let x = root.primal();
    let relaxation = search.objective(&x);
    let relax = Some(relaxation.clone());
    if is_integral(&x, integer_vars) && best.as_ref().map_or(true, |(v, _)| relaxation < *v) {
        accept(problem, oracle, integer_vars, &x)?;
        let lb = relax.clone();
        return Ok(outcome(IlpStatus::Optimal, Some((relaxation, x)), relax, lb, 1));
    }

    let end = if integral_objective {
        if best.is_none() {
            // any integral point bounds the staged search
            match search.run(&root, &mut best, None, true)? {
                SearchEnd::Exhausted => {
                    return Ok(outcome(IlpStatus::Infeasible, None, relax, None, search.nodes))
                }
                SearchEnd::Budget(open) => {
                    return Ok(outcome(IlpStatus::NodeLimit, best, relax, open, search.nodes))
                }
                SearchEnd::Unbounded => {
                    return Ok(outcome(IlpStatus::Unbounded, None, relax, None, search.nodes))
                }
                SearchEnd::Hit => {}
            }
        }
        let mut target = relaxation.ceil();
        loop {
            let v = best.as_ref().map(|(v, _)| v.clone()).expect("incumbent");
            if target >= v {
                break SearchEnd::Exhausted;
            }
            match search.run(&root, &mut best, Some(&target + Rational::one()), true)? {
                SearchEnd::Hit => break SearchEnd::Exhausted,
                SearchEnd::Exhausted => target += Rational::one(),
                SearchEnd::Budget(_) => break SearchEnd::Budget(Some(target)),
                SearchEnd::Unbounded => break SearchEnd::Unbounded,
            }
        }
    } else {
        search.run(&root, &mut best, None, false)?
    };

    Ok(match end {
        SearchEnd::Exhausted | SearchEnd::Hit => match best {
            Some((v, x)) => {
                accept(problem, oracle, integer_vars, &x)?;
                outcome(IlpStatus::Optimal, Some((v.clone(), x)), relax, Some(v), search.nodes)
            }
            None => outcome(IlpStatus::Infeasible, None, relax, None, search.nodes),
        },
        SearchEnd::Budget(open) => {
            let lb = match (&open, &best) {
                (Some(o), Some((v, _))) => Some(o.clone().min(v.clone())),
                (o, _) => o.clone(),
            };
            outcome(IlpStatus::NodeLimit, best, relax, lb.or(Some(relaxation)), search.nodes)
        }
        SearchEnd::Unbounded => outcome(IlpStatus::Unbounded, None, relax, None, search.nodes),
    })
}
