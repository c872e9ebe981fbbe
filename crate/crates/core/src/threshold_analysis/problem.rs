//! Sign-representation constraint systems and their row oracle.
//!
//! A system has one column per monomial (feature) and one row per input:
//! `p(t) ≥ 0` where the function is 1 and `p(t) ≤ −1` where it is not.
//! Rows are served lazily to the simplex through [`RowOracle`].

use std::collections::HashSet;

use exact_lp::rational::{common_denominator, int};
use exact_lp::{Constraint, LpProblem, Rational, Relation, RowOracle, VarKind};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfun::{BoolFun, Convention};
use crate::polynomial::{tuple_monomial, Basis, IntPolynomial, UvAssignment, Var};
use crate::shape::GroupShape;
use crate::tuple_order::{OrderContext, TupleIndex};
use crate::{Error, Result};

/// Cap on stored row entries (rows × columns).
pub const MAX_ROW_ENTRIES: usize = 1 << 27;
/// Cap on columns of an `XY` system.
pub const MAX_COLUMNS: usize = 4096;
/// Rows handed to the simplex per oracle call.
pub const DEFAULT_BATCH: usize = 8;

/// How a column is evaluated at an input.
#[derive(Clone, Debug)]
pub enum Features {
    /// Multilinear monomials over the inputs, as bit masks.
    Xy { convention: Convention, masks: Vec<u64> },
    /// `Π_i u^i_{α_i}` for each tuple of the shape.
    Tuples { shape: GroupShape, tuples: Vec<TupleIndex> },
    /// `u_j = x_j − y_j` on a `2k`-input comparison, `j = 1..k`.
    Differences { k: usize },
    /// `u_j = L_j(x)` on `k` `±1` inputs, `j = 0..k−1`.
    LForms { k: usize },
}

impl Features {
    pub fn len(&self) -> usize {
        match self {
            Features::Xy { masks, .. } => masks.len(),
            Features::Tuples { tuples, .. } => tuples.len(),
            Features::Differences { k } | Features::LForms { k } => *k,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column values at input `t`.
    pub fn row(&self, t: usize) -> Vec<i64> {
        let bit = |p: usize| (t >> p & 1) as i64;
        match self {
            Features::Xy { convention, masks } => masks
                .iter()
                .map(|&m| match convention {
                    Convention::ZeroOne => i64::from(t as u64 & m == m),
                    Convention::PlusMinus => {
                        if (!(t as u64) & m).count_ones() % 2 == 0 {
                            1
                        } else {
                            -1
                        }
                    }
                })
                .collect(),
            Features::Tuples { shape, tuples } => {
                let a = UvAssignment::from_input(shape, t);
                tuples
                    .iter()
                    .map(|alpha| {
                        alpha
                            .coords()
                            .iter()
                            .enumerate()
                            .map(|(i, &v)| a.u(i + 1, v))
                            .product()
                    })
                    .collect()
            }
            Features::Differences { k } => (0..*k).map(|j| bit(j) - bit(k + j)).collect(),
            Features::LForms { k } => {
                let x = |j: usize| 2 * bit(j - 1) - 1;
                std::iter::once(x(1) + x(*k))
                    .chain((1..*k).map(|j| x(j) - x(j + 1)))
                    .collect()
            }
        }
    }

    /// The monomial each column stands for.
    pub fn monomial(&self, col: usize) -> Vec<Var> {
        match self {
            Features::Xy { masks, .. } => (0..64)
                .filter(|i| masks[col] >> i & 1 == 1)
                .map(Var::X)
                .collect(),
            Features::Tuples { tuples, .. } => tuple_monomial(&tuples[col]),
            Features::Differences { .. } => vec![Var::U { group: 1, index: col + 1 }],
            Features::LForms { .. } => vec![Var::U { group: 1, index: col }],
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            Features::Xy { .. } => Basis::Xy,
            _ => Basis::Uv,
        }
    }

    pub fn column_name(&self, col: usize) -> String {
        let m = self.monomial(col);
        if m.is_empty() {
            "one".to_string()
        } else {
            m.iter().map(Var::name).collect::<Vec<_>>().join("*")
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub input: usize,
    pub positive: bool,
    pub coeffs: Vec<i64>,
}

impl Row {
    /// The row as an LP constraint.
    pub fn constraint(&self) -> Constraint {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(i, &a)| (i, int(a)))
            .collect();
        if self.positive {
            Constraint::new(coeffs, Relation::Ge, int(0))
        } else {
            Constraint::new(coeffs, Relation::Le, int(-1))
        }
    }
}

/// All multilinear monomials of degree at most `d` on `n` inputs, by
/// degree then lexicographically.
pub fn xy_monomials(n: usize, d: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, left: usize, mask: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(mask);
            return;
        }
        for i in start..n {
            rec(i + 1, n, left - 1, mask | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    for size in 0..=d.min(n) {
        rec(0, n, size, 0, &mut out);
    }
    out
}

/// The system "`p` of the given feature space sign-represents `f`".
#[derive(Clone, Debug)]
pub struct RepresentationProblem {
    f: BoolFun,
    features: Features,
    degree: usize,
    rows: Vec<Row>,
    batch: usize,
}

impl RepresentationProblem {
    fn build(f: &BoolFun, features: Features, degree: usize, dedupe: bool) -> Result<Self> {
        let size = f.table_len();
        if size.saturating_mul(features.len().max(1)) > MAX_ROW_ENTRIES {
            return Err(Error::Cap(format!(
                "{size} rows x {} columns exceeds {MAX_ROW_ENTRIES}",
                features.len()
            )));
        }
        let all: Vec<Row> = (0..size)
            .into_par_iter()
            .map(|t| Row {
                input: t,
                positive: f.bit(t),
                coeffs: features.row(t),
            })
            .collect();
        let rows = if dedupe {
            let mut seen = HashSet::new();
            all.into_iter()
                .filter(|r| seen.insert((r.positive, r.coeffs.clone())))
                .collect()
        } else {
            all
        };
        Ok(RepresentationProblem {
            f: f.clone(),
            features,
            degree,
            rows,
            batch: DEFAULT_BATCH,
        })
    }

    /// Multilinear polynomials of degree at most `d` in the inputs of `f`.
    pub fn xy(f: &BoolFun, d: usize) -> Result<Self> {
        if f.n() > 64 {
            return Err(Error::Cap("more than 64 inputs".into()));
        }
        let masks = xy_monomials(f.n(), d);
        if masks.len() > MAX_COLUMNS {
            return Err(Error::Cap(format!("{} monomials exceeds {MAX_COLUMNS}", masks.len())));
        }
        let features = Features::Xy {
            convention: f.convention(),
            masks,
        };
        Self::build(f, features, d, false)
    }

    /// Polynomials `Σ_{α∈K} w_α Π_i u^i_{α_i}` for the hard function of
    /// `shape`. Inputs with equal `u` values share one row.
    pub fn symmetrized(f: &BoolFun, shape: &GroupShape) -> Result<Self> {
        if f.n() != shape.n() {
            return Err(Error::Input(format!("function has {} inputs, {shape} has {}", f.n(), shape.n())));
        }
        let tuples = OrderContext::new(shape).enumerate_ordered()?;
        let features = Features::Tuples {
            shape: shape.clone(),
            tuples,
        };
        Self::build(f, features, shape.d(), true)
    }

    /// `Σ w_j u_j` with `u_j = x_j − y_j` for a comparison on `2k` inputs.
    pub fn differences(f: &BoolFun) -> Result<Self> {
        if f.n() % 2 != 0 || f.convention() != Convention::ZeroOne {
            return Err(Error::Input("difference features need a 0/1 function on 2k inputs".into()));
        }
        Self::build(f, Features::Differences { k: f.n() / 2 }, 1, true)
    }

    /// `Σ w_j L_j(x)` for a `±1` function on `k` inputs.
    pub fn l_forms(f: &BoolFun) -> Result<Self> {
        if f.n() < 2 || f.convention() != Convention::PlusMinus {
            return Err(Error::Input("linear forms need a ±1 function on k >= 2 inputs".into()));
        }
        Self::build(f, Features::LForms { k: f.n() }, 1, true)
    }

    pub fn with_batch(mut self, batch: usize) -> Self {
        self.batch = batch.max(1);
        self
    }

    pub fn function(&self) -> &BoolFun {
        &self.f
    }

    pub fn features(&self) -> &Features {
        &self.features
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.features.len()
    }

    /// Free columns, no rows: everything comes from the oracle.
    pub fn lp_problem(&self) -> LpProblem {
        let mut p = LpProblem::new();
        for c in 0..self.num_columns() {
            p.add_var(self.features.column_name(c), VarKind::Free);
        }
        p
    }

    /// Integer column vector as a polynomial in the feature basis.
    pub fn polynomial(&self, coeffs: &[BigInt]) -> Result<IntPolynomial> {
        let mut p = IntPolynomial::new(self.features.basis());
        for (c, a) in coeffs.iter().enumerate() {
            p.add_term(self.features.monomial(c), a.clone())?;
        }
        Ok(p)
    }

    /// Column vector of a polynomial; fails on monomials outside the space.
    pub fn columns_of(&self, p: &IntPolynomial) -> Result<Vec<BigInt>> {
        let index: std::collections::HashMap<Vec<Var>, usize> = (0..self.num_columns())
            .map(|c| (self.features.monomial(c), c))
            .collect();
        let mut out = vec![BigInt::zero(); self.num_columns()];
        for (m, c) in p.terms() {
            let col = index
                .get(m)
                .ok_or_else(|| Error::Degree(format!("monomial {m:?} outside the system")))?;
            out[*col] = c.clone();
        }
        Ok(out)
    }

    /// First input (in index order) whose sign condition the integer
    /// vector `w` breaks, scanning every input rather than stored rows.
    pub fn first_violation(&self, w: &[BigInt]) -> Option<usize> {
        let f = &self.f;
        (0..f.table_len()).into_par_iter().find_first(|&t| {
            let row = self.features.row(t);
            let s: BigInt = row.iter().zip(w).map(|(&a, c)| c * a).sum();
            if f.bit(t) {
                s.is_negative()
            } else {
                !s.is_negative()
            }
        })
    }

    fn violations(&self, x: &[Rational]) -> Vec<(BigInt, usize)> {
        let den = common_denominator(x);
        let nums: Vec<BigInt> = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        let small: Option<Vec<i128>> = nums
            .iter()
            .map(|v| v.to_i64().map(i128::from))
            .collect::<Option<Vec<i128>>>()
            .filter(|_| den.bits() < 62);
        match small {
            Some(w) => {
                let d = den.to_i64().map(i128::from).expect("checked size");
                self.rows
                    .par_iter()
                    .enumerate()
                    .filter_map(|(i, r)| {
                        let s: i128 = r.coeffs.iter().zip(&w).map(|(&a, &c)| c * a as i128).sum();
                        let slack = if r.positive { s } else { -d - s };
                        (slack < 0).then(|| (BigInt::from(-slack), i))
                    })
                    .collect()
            }
            None => self
                .rows
                .par_iter()
                .enumerate()
                .filter_map(|(i, r)| {
                    let s: BigInt = r.coeffs.iter().zip(&nums).map(|(&a, c)| c * a).sum();
                    let slack = if r.positive { s } else { -&den - s };
                    slack.is_negative().then(|| (-slack, i))
                })
                .collect(),
        }
    }

    /// Builds a Farkas certificate over input rows from the multipliers
    /// of a lazily solved system, plus the base constraints of `base`.
    pub fn certificate(
        &self,
        base: &LpProblem,
        outcome: &exact_lp::LazyOutcome,
    ) -> Result<FarkasCertificate> {
        let farkas = outcome
            .outcome
            .farkas
            .as_ref()
            .ok_or_else(|| Error::Certificate("outcome carries no Farkas vector".into()))?;
        let extra = base
            .constraints()
            .iter()
            .zip(farkas)
            .filter(|(_, y)| !y.is_zero())
            .map(|(c, y)| (c.clone(), y.clone()))
            .collect();
        let rows = outcome
            .tagged(farkas)
            .into_iter()
            .map(|(tag, y)| (self.rows[tag].input, self.rows[tag].positive, y))
            .collect();
        Ok(FarkasCertificate { rows, extra })
    }

    /// Replays a certificate: rows are recomputed from the inputs, the
    /// multipliers must be nonnegative, the combination must vanish on
    /// every column and its right-hand side must be negative.
    pub fn verify(&self, cert: &FarkasCertificate) -> Result<()> {
        let cols = self.num_columns();
        let mut lhs = vec![Rational::zero(); cols];
        let mut rhs = Rational::zero();
        for (input, positive, y) in &cert.rows {
            if y.is_negative() {
                return Err(Error::Certificate("negative multiplier".into()));
            }
            if *input >= self.f.table_len() || self.f.bit(*input) != *positive {
                return Err(Error::Certificate(format!("row for input {input} has the wrong class")));
            }
            // normalised to ≤: positive rows read −p ≤ 0, negative p ≤ −1
            let sign = if *positive { -1 } else { 1 };
            for (c, a) in self.features.row(*input).into_iter().enumerate() {
                if a != 0 {
                    lhs[c] += y * int(sign * a);
                }
            }
            if !positive {
                rhs -= y;
            }
        }
        for (c, y) in &cert.extra {
            let (row, b) = c.normalized();
            match c.relation {
                Relation::Eq => {}
                _ if y.is_negative() => return Err(Error::Certificate("negative multiplier".into())),
                _ => {}
            }
            for (i, a) in row {
                if i >= cols {
                    return Err(Error::Certificate("extra row outside the system".into()));
                }
                lhs[i] += y * a;
            }
            rhs += y * b;
        }
        if lhs.iter().any(|v| !v.is_zero()) {
            return Err(Error::Certificate("combination does not cancel".into()));
        }
        if !rhs.is_negative() {
            return Err(Error::Certificate("combined right-hand side is not negative".into()));
        }
        Ok(())
    }
}

impl RowOracle for RepresentationProblem {
    fn separate(&self, x: &[Rational]) -> Vec<(usize, Constraint)> {
        let mut v = self.violations(x);
        v.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        v.into_iter()
            .take(self.batch)
            .map(|(_, i)| (i, self.rows[i].constraint()))
            .collect()
    }
}

/// Nonnegative multipliers on input rows (and on extra base rows) whose
/// combination reads `0 ≤ negative`.
#[derive(Clone, Debug, Serialize)]
pub struct FarkasCertificate {
    /// `(input, positive class, multiplier)`.
    #[serde(serialize_with = "ser_rows")]
    pub rows: Vec<(usize, bool, Rational)>,
    #[serde(serialize_with = "ser_extra")]
    pub extra: Vec<(Constraint, Rational)>,
}

fn ser_rows<S: serde::Serializer>(
    rows: &[(usize, bool, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for (t, pos, y) in rows {
        seq.serialize_element(&serde_json::json!({
            "input": t,
            "class": if *pos { "positive" } else { "negative" },
            "multiplier": y.to_string(),
        }))?;
    }
    seq.end()
}

fn ser_extra<S: serde::Serializer>(
    extra: &[(Constraint, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(extra.len()))?;
    for (c, y) in extra {
        seq.serialize_element(&serde_json::json!({
            "row": c.to_string(),
            "multiplier": y.to_string(),
        }))?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{make_g, make_gt, GVariant, MsbSide};
    use exact_lp::rational::clear_denominators;
    use exact_lp::{solve_lazy, Limits, LpStatus};

    #[test]
    fn monomial_counts() {
        assert_eq!(xy_monomials(10, 2).len(), 56);
        assert_eq!(xy_monomials(4, 0), vec![0]);
        assert_eq!(xy_monomials(3, 5).len(), 8);
    }

    #[test]
    fn gt_is_linearly_representable() {
        let f = make_gt(2, MsbSide::Last).unwrap();
        let sys = RepresentationProblem::xy(&f, 1).unwrap();
        let out = solve_lazy(&sys.lp_problem(), &sys, &Limits::default()).unwrap();
        assert!(out.outcome.is_feasible());
        let w = clear_denominators(out.outcome.witness.as_ref().unwrap());
        assert_eq!(sys.first_violation(&w), None);
    }

    #[test]
    fn xor_is_not_linear_and_certificate_replays() {
        let f = BoolFun::from_bits(2, Convention::ZeroOne, "xor", &[false, true, true, false]).unwrap();
        let sys = RepresentationProblem::xy(&f, 1).unwrap();
        let base = sys.lp_problem();
        let out = solve_lazy(&base, &sys, &Limits::default()).unwrap();
        assert_eq!(out.outcome.status, LpStatus::Infeasible);
        let cert = sys.certificate(&base, &out).unwrap();
        sys.verify(&cert).unwrap();
        let mut bad = cert.clone();
        bad.rows[0].2 = -bad.rows[0].2.clone();
        assert!(sys.verify(&bad).is_err());
    }

    #[test]
    fn feature_rows() {
        let g = make_g(3, GVariant::G1).unwrap();
        let sys = RepresentationProblem::l_forms(&g).unwrap();
        // x = (1,1,1): L₀ = 2, L₁ = L₂ = 0
        assert_eq!(sys.features().row(0b111), vec![2, 0, 0]);
        // x = (1,−1,−1): L₁ = 2
        assert_eq!(sys.features().row(0b001), vec![0, 2, 0]);
        let gt = make_gt(2, MsbSide::First).unwrap();
        let sys = RepresentationProblem::differences(&gt).unwrap();
        assert_eq!(sys.rows().len(), 9);
        assert_eq!(sys.features().row(0b0110), vec![-1, 1]);
    }
}
