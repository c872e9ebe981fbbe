//! Solver outcomes against exhaustive enumeration on small instances.

use exact_lp::certificate::check_outcome;
use exact_lp::rational::int;
use exact_lp::text::{parse_problem, write_problem};
use exact_lp::*;
use num_traits::Zero;
use proptest::prelude::*;

const BOX: i64 = 4;

/// Two nonnegative variables inside `[0, BOX]²` plus random `≤` rows.
fn problem(rows: &[(i64, i64, i64)], obj: (i64, i64)) -> LpProblem {
    let mut p = LpProblem::new();
    p.add_var("x", VarKind::NonNeg);
    p.add_var("y", VarKind::NonNeg);
    p.set_objective(vec![(0, int(obj.0)), (1, int(obj.1))]).unwrap();
    p.constrain(vec![(0, int(1))], Relation::Le, int(BOX)).unwrap();
    p.constrain(vec![(1, int(1))], Relation::Le, int(BOX)).unwrap();
    for &(a, b, c) in rows {
        p.constrain(vec![(0, int(a)), (1, int(b))], Relation::Le, int(c)).unwrap();
    }
    p
}

/// All lines `a x + b y = c` bounding the region, including the axes.
fn lines(rows: &[(i64, i64, i64)]) -> Vec<(i64, i64, i64)> {
    let mut l = vec![(1, 0, 0), (0, 1, 0), (1, 0, BOX), (0, 1, BOX)];
    l.extend_from_slice(rows);
    l
}

/// LP optimum by vertex enumeration; `None` if the region is empty.
fn vertex_optimum(rows: &[(i64, i64, i64)], obj: (i64, i64)) -> Option<Rational> {
    let p = problem(rows, obj);
    let l = lines(rows);
    let mut best: Option<Rational> = None;
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            let (a1, b1, c1) = l[i];
            let (a2, b2, c2) = l[j];
            let det = a1 * b2 - a2 * b1;
            if det == 0 {
                continue;
            }
            let x = Rational::new((c1 * b2 - c2 * b1).into(), det.into());
            let y = Rational::new((a1 * c2 - a2 * c1).into(), det.into());
            let pt = [x, y];
            if p.max_violation(&pt) > Rational::zero() {
                continue;
            }
            let v = p.objective_value(&pt).unwrap();
            if best.as_ref().map_or(true, |b| v < *b) {
                best = Some(v);
            }
        }
    }
    best
}

fn integer_optimum(rows: &[(i64, i64, i64)], obj: (i64, i64)) -> Option<i64> {
    let ok = |x: i64, y: i64| rows.iter().all(|&(a, b, c)| a * x + b * y <= c);
    (0..=BOX)
        .flat_map(|x| (0..=BOX).map(move |y| (x, y)))
        .filter(|&(x, y)| ok(x, y))
        .map(|(x, y)| obj.0 * x + obj.1 * y)
        .min()
}

/// Serves the rows of a fixed list lazily, one violated row at a time.
struct Rows(Vec<Constraint>);

impl RowOracle for Rows {
    fn separate(&self, x: &[Rational]) -> Vec<(usize, Constraint)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied(x))
            .take(1)
            .map(|(i, c)| (i, c.clone()))
            .collect()
    }
}

fn rows() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((-3i64..=3, -3i64..=3, -4i64..=8), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_matches_vertex_enumeration(rows in rows(), obj in (-3i64..=3, -3i64..=3)) {
        let p = problem(&rows, obj);
        let out = solve(&p).unwrap();
        check_outcome(&p, &out).unwrap();
        match vertex_optimum(&rows, obj) {
            None => prop_assert_eq!(out.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(out.status, LpStatus::Optimal);
                prop_assert_eq!(out.value.unwrap(), v);
            }
        }
    }

    #[test]
    fn ilp_matches_enumeration(rows in rows(), obj in (-3i64..=3, -3i64..=3)) {
        let p = problem(&rows, obj);
        let out = ilp_min(&p, &[0, 1], &NoOracle, None, &BnbLimits::default()).unwrap();
        match integer_optimum(&rows, obj) {
            None => prop_assert_eq!(out.status, IlpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(out.status, IlpStatus::Optimal);
                prop_assert_eq!(out.value.clone().unwrap(), int(v));
                let x = out.witness.unwrap();
                prop_assert!(p.max_violation(&x).is_zero());
                prop_assert!(x.iter().all(|v| v.is_integer()));
            }
        }
    }

    #[test]
    fn lazy_rows_give_the_same_optimum(rows in rows(), obj in (-3i64..=3, -3i64..=3)) {
        let full = problem(&rows, obj);
        let base = problem(&[], obj);
        let extra: Vec<Constraint> = full.constraints()[2..].to_vec();
        let direct = solve(&full).unwrap();
        let lazy = solve_lazy(&base, &Rows(extra), &Limits::default()).unwrap();
        prop_assert_eq!(direct.status, lazy.outcome.status);
        prop_assert_eq!(direct.value, lazy.outcome.value.clone());
        check_outcome(&lazy.problem, &lazy.outcome).unwrap();
    }

    #[test]
    fn l1_value_is_the_least_norm(rows in rows()) {
        // free variables: min |x| + |y| by enumeration over a fine grid is
        // not exact, so compare against the split LP solved directly
        let mut p = LpProblem::new();
        p.add_var("x", VarKind::Free);
        p.add_var("y", VarKind::Free);
        for &(a, b, c) in &rows {
            p.constrain(vec![(0, int(a)), (1, int(b))], Relation::Le, int(c)).unwrap();
        }
        let out = min_l1(&p, &NoOracle, &Limits::default()).unwrap();
        let mut split = LpProblem::new();
        for n in ["xp", "xm", "yp", "ym"] {
            split.add_var(n, VarKind::NonNeg);
        }
        split.set_objective((0..4).map(|i| (i, int(1))).collect()).unwrap();
        for &(a, b, c) in &rows {
            split
                .constrain(vec![(0, int(a)), (1, int(-a)), (2, int(b)), (3, int(-b))], Relation::Le, int(c))
                .unwrap();
        }
        let reference = solve(&split).unwrap();
        prop_assert_eq!(out.status, reference.status);
        prop_assert_eq!(out.value, reference.value);
    }

    #[test]
    fn text_round_trip(rows in rows(), obj in (-3i64..=3, -3i64..=3)) {
        let p = problem(&rows, obj);
        prop_assert_eq!(parse_problem(&write_problem(&p)).unwrap(), p);
    }
}
