//! Coefficient inequalities forced on every gate, certified by LP.
//!
//! For an integer target `Σ a_j w_j ≥ b` we adjoin its integer negation
//! `Σ a_j w_j ≤ b − 1` to the sign-representation rows. A replayed Farkas
//! refutation certifies the target for every integer gate; a feasible
//! point, scaled to integers, is a gate violating it.

use std::fmt;
use std::str::FromStr;

use exact_lp::rational::clear_denominators;
use exact_lp::{solve_lazy, Constraint, Limits, LpStatus, Relation};
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::problem::{FarkasCertificate, RepresentationProblem};
use super::Verdict;
use crate::boolfun::{make_g, make_gt, make_hard, GVariant, MsbSide};
use crate::shape::GroupShape;
use crate::tuple_order::{OrderContext, TupleIndex};
use crate::{Error, Result};

/// `Σ coeffs · w ≥ rhs` over the columns of a system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearInequality {
    pub label: String,
    #[serde(serialize_with = "ser_terms")]
    pub coeffs: Vec<(usize, BigInt)>,
    #[serde(serialize_with = "super::ser_bigint")]
    pub rhs: BigInt,
}

fn ser_terms<S: serde::Serializer>(t: &[(usize, BigInt)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for (i, a) in t {
        seq.serialize_element(&(i, a.to_string()))?;
    }
    seq.end()
}

impl LinearInequality {
    pub fn new(label: impl Into<String>, coeffs: Vec<(usize, BigInt)>, rhs: impl Into<BigInt>) -> Self {
        LinearInequality {
            label: label.into(),
            coeffs,
            rhs: rhs.into(),
        }
    }

    /// `w_hi − factor · w_lo ≥ rhs`.
    pub fn ratio(label: impl Into<String>, hi: usize, lo: usize, factor: BigInt, rhs: i64) -> Self {
        Self::new(label, vec![(hi, BigInt::one()), (lo, -factor)], rhs)
    }

    pub fn holds(&self, w: &[BigInt]) -> bool {
        self.lhs(w) >= self.rhs
    }

    pub fn lhs(&self, w: &[BigInt]) -> BigInt {
        self.coeffs.iter().map(|(i, a)| a * &w[*i]).sum()
    }

    /// `Σ a w ≤ b − 1`.
    fn negation(&self) -> Constraint {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(i, a)| (*i, exact_lp::Rational::from_integer(a.clone())))
            .collect();
        Constraint::new(
            coeffs,
            Relation::Le,
            exact_lp::Rational::from_integer(&self.rhs - 1),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityResult {
    pub inequality: LinearInequality,
    pub verdict: Verdict,
    /// Violating integer gate when the inequality fails.
    #[serde(serialize_with = "ser_witness")]
    pub witness: Option<Vec<BigInt>>,
    pub certificate: Option<FarkasCertificate>,
}

fn ser_witness<S: serde::Serializer>(w: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    w.as_ref()
        .map(|v| v.iter().map(BigInt::to_string).collect::<Vec<_>>())
        .serialize(s)
}

/// Decides whether every integer gate of `sys` satisfies `ineq`.
pub fn certify_inequality(
    sys: &RepresentationProblem,
    ineq: &LinearInequality,
    limits: &Limits,
) -> Result<InequalityResult> {
    if let Some((i, _)) = ineq.coeffs.iter().find(|(i, _)| *i >= sys.num_columns()) {
        return Err(Error::Input(format!("column {i} outside the system")));
    }
    let mut base = sys.lp_problem();
    base.add_constraint(ineq.negation())?;
    let out = solve_lazy(&base, sys, limits)?;
    match out.outcome.status {
        LpStatus::Infeasible => {
            let cert = sys.certificate(&base, &out)?;
            sys.verify(&cert)?;
            Ok(InequalityResult {
                inequality: ineq.clone(),
                verdict: Verdict::Certified,
                witness: None,
                certificate: Some(cert),
            })
        }
        LpStatus::Optimal | LpStatus::Feasible => {
            let w = clear_denominators(out.outcome.witness.as_ref().expect("witness"));
            if sys.first_violation(&w).is_some() || ineq.holds(&w) {
                return Err(Error::Certificate(format!(
                    "scaled point does not refute {}",
                    ineq.label
                )));
            }
            Ok(InequalityResult {
                inequality: ineq.clone(),
                verdict: Verdict::Violated,
                witness: Some(w),
                certificate: None,
            })
        }
        LpStatus::Unbounded => unreachable!("feasibility problem has no objective"),
    }
}

/// Families of inequalities on the coefficients of linear gates for the
/// comparison functions and the `g` functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientLemma {
    /// `GT₁`: `w_j ≥ 2^{j−2} w_1` for `j ≥ 2`, and `w_1 > 0`.
    GtExp,
    /// `GT₁`: `w_j ≥ w_{j−1}`.
    GtStep,
    /// `GT₀`: `w_{k−j+1} ≥ 2^{j−2} w_k` for `j ≥ 2`, and `w_k > 0`.
    Gt0Exp,
    /// `GT₀`: `w_{j−1} ≥ w_j`.
    Gt0Step,
    /// `g₁`: `w_j > 0` for all `j`.
    G1Pos,
    /// `g₁`: `w_j > w_{j−1}` for `2 ≤ j ≤ k−1`.
    G1Mono,
    /// `g₀`: `w_0 < 0`, `w_j > 0` for `j ≥ 1`, `w_{j−1} > w_j` for `2 ≤ j ≤ k−1`.
    G0All,
}

impl CoefficientLemma {
    pub const ALL: [CoefficientLemma; 7] = [
        CoefficientLemma::GtExp,
        CoefficientLemma::GtStep,
        CoefficientLemma::Gt0Exp,
        CoefficientLemma::Gt0Step,
        CoefficientLemma::G1Pos,
        CoefficientLemma::G1Mono,
        CoefficientLemma::G0All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoefficientLemma::GtExp => "gt_exp",
            CoefficientLemma::GtStep => "gt_step",
            CoefficientLemma::Gt0Exp => "gt0_exp",
            CoefficientLemma::Gt0Step => "gt0_step",
            CoefficientLemma::G1Pos => "g1_pos",
            CoefficientLemma::G1Mono => "g1_mono",
            CoefficientLemma::G0All => "g0_all",
        }
    }

    fn is_gt(self) -> bool {
        matches!(
            self,
            CoefficientLemma::GtExp | CoefficientLemma::GtStep | CoefficientLemma::Gt0Exp | CoefficientLemma::Gt0Step
        )
    }

    /// Linear gate system of the underlying function. Columns are
    /// `w_1..w_k` (comparisons) or `w_0..w_{k−1}` (`g`).
    pub fn system(self, k: usize) -> Result<RepresentationProblem> {
        match self {
            CoefficientLemma::GtExp | CoefficientLemma::GtStep => {
                RepresentationProblem::differences(&make_gt(k, MsbSide::Last)?)
            }
            CoefficientLemma::Gt0Exp | CoefficientLemma::Gt0Step => {
                RepresentationProblem::differences(&make_gt(k, MsbSide::First)?)
            }
            CoefficientLemma::G1Pos | CoefficientLemma::G1Mono => {
                RepresentationProblem::l_forms(&make_g(k, GVariant::G1)?)
            }
            CoefficientLemma::G0All => RepresentationProblem::l_forms(&make_g(k, GVariant::G0)?),
        }
    }

    pub fn inequalities(self, k: usize) -> Vec<LinearInequality> {
        let pow = |e: usize| BigInt::one() << e;
        let one = BigInt::one;
        // GT columns: w_j at j − 1; g columns: w_j at j
        let w = |j: usize| if self.is_gt() { j - 1 } else { j };
        let mut out = Vec::new();
        match self {
            CoefficientLemma::GtExp => {
                out.push(LinearInequality::new("w1 > 0", vec![(w(1), one())], 1));
                for j in 2..=k {
                    out.push(LinearInequality::ratio(format!("w{j} >= 2^{} w1", j - 2), w(j), w(1), pow(j - 2), 0));
                }
            }
            CoefficientLemma::GtStep => {
                for j in 2..=k {
                    out.push(LinearInequality::ratio(format!("w{j} >= w{}", j - 1), w(j), w(j - 1), one(), 0));
                }
            }
            CoefficientLemma::Gt0Exp => {
                out.push(LinearInequality::new(format!("w{k} > 0"), vec![(w(k), one())], 1));
                for j in 2..=k {
                    let hi = k - j + 1;
                    out.push(LinearInequality::ratio(format!("w{hi} >= 2^{} w{k}", j - 2), w(hi), w(k), pow(j - 2), 0));
                }
            }
            CoefficientLemma::Gt0Step => {
                for j in 2..=k {
                    out.push(LinearInequality::ratio(format!("w{} >= w{j}", j - 1), w(j - 1), w(j), one(), 0));
                }
            }
            CoefficientLemma::G1Pos => {
                for j in 0..k {
                    out.push(LinearInequality::new(format!("w{j} > 0"), vec![(w(j), one())], 1));
                }
            }
            CoefficientLemma::G1Mono => {
                for j in 2..k {
                    out.push(LinearInequality::ratio(format!("w{j} > w{}", j - 1), w(j), w(j - 1), one(), 1));
                }
            }
            CoefficientLemma::G0All => {
                out.push(LinearInequality::new("w0 < 0", vec![(w(0), -one())], 1));
                for j in 1..k {
                    out.push(LinearInequality::new(format!("w{j} > 0"), vec![(w(j), one())], 1));
                }
                for j in 2..k {
                    out.push(LinearInequality::ratio(format!("w{} > w{j}", j - 1), w(j - 1), w(j), one(), 1));
                }
            }
        }
        out
    }
}

impl fmt::Display for CoefficientLemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientLemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown lemma {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: CoefficientLemma,
    pub k: usize,
    pub verdict: Verdict,
    pub results: Vec<InequalityResult>,
}

/// Certifies each inequality of `lemma` at size `k`. The report is
/// `Certified` only if every inequality is.
pub fn certify_coefficient_lemma(lemma: CoefficientLemma, k: usize, limits: &Limits) -> Result<LemmaReport> {
    let sys = lemma.system(k)?;
    let results = lemma
        .inequalities(k)
        .iter()
        .map(|q| certify_inequality(&sys, q, limits))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if results.iter().all(|r| r.verdict == Verdict::Certified) {
        Verdict::Certified
    } else {
        Verdict::Violated
    };
    Ok(LemmaReport { lemma, k, verdict, results })
}

/// The chain inequality of the weight bound on symmetrized gates:
/// `w_β ≥ 2^e · w_α` for the level-1 chain start `α` and `w_α > 0`.
#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub shape: GroupShape,
    pub alpha: TupleIndex,
    pub beta: TupleIndex,
    pub exponent: u64,
    pub verdict: Verdict,
    pub results: Vec<InequalityResult>,
}

/// Level-1 chain pair `(α, β)` and exponent of `shape`.
pub fn chain_pair(shape: &GroupShape) -> Result<(TupleIndex, TupleIndex, u64)> {
    let ctx = OrderContext::new(shape);
    let alpha = ctx.chain_start(&[], 1)?;
    let beta = ctx.chain_target(&alpha, 1);
    Ok((alpha, beta, ctx.chain_exponent(1)))
}

pub fn certify_main_chain(shape: &GroupShape, limits: &Limits) -> Result<ChainReport> {
    let f = make_hard(shape)?;
    let sys = RepresentationProblem::symmetrized(&f, shape)?;
    let (alpha, beta, e) = chain_pair(shape)?;
    let tuples = OrderContext::new(shape).enumerate_ordered()?;
    let col = |t: &TupleIndex| tuples.iter().position(|s| s == t).expect("tuple in K");
    let (a, b) = (col(&alpha), col(&beta));
    let ineqs = [
        LinearInequality::new(format!("w{alpha} > 0"), vec![(a, BigInt::one())], 1),
        LinearInequality::ratio(format!("w{beta} >= 2^{e} w{alpha}"), b, a, BigInt::one() << e, 0),
    ];
    let results = ineqs
        .iter()
        .map(|q| certify_inequality(&sys, q, limits))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if results.iter().all(|r| r.verdict == Verdict::Certified) {
        Verdict::Certified
    } else {
        Verdict::Violated
    };
    Ok(ChainReport {
        shape: shape.clone(),
        alpha,
        beta,
        exponent: e,
        verdict,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn gt_lemmas_hold() {
        for k in 2..=5 {
            for lemma in [
                CoefficientLemma::GtExp,
                CoefficientLemma::GtStep,
                CoefficientLemma::Gt0Exp,
                CoefficientLemma::Gt0Step,
            ] {
                let r = certify_coefficient_lemma(lemma, k, &lim()).unwrap();
                assert_eq!(r.verdict, Verdict::Certified, "{lemma} k={k}");
            }
        }
    }

    #[test]
    fn g_lemmas_hold() {
        for k in [3, 4, 5] {
            for lemma in [CoefficientLemma::G1Pos, CoefficientLemma::G1Mono, CoefficientLemma::G0All] {
                let r = certify_coefficient_lemma(lemma, k, &lim()).unwrap();
                assert_eq!(r.verdict, Verdict::Certified, "{lemma} k={k}");
            }
        }
    }

    #[test]
    fn false_inequality_yields_a_violating_gate() {
        // u₁ + 2u₂ represents GT₂, so w₂ ≥ 2w₁ + 1 fails
        let sys = CoefficientLemma::GtExp.system(2).unwrap();
        let q = LinearInequality::ratio("w2 >= 2 w1 + 1", 1, 0, BigInt::from(2), 1);
        let r = certify_inequality(&sys, &q, &lim()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        let w = r.witness.unwrap();
        assert!(!q.holds(&w));
        assert_eq!(sys.first_violation(&w), None);
    }

    #[test]
    fn chain_on_small_weak_shapes() {
        for ks in [&[2, 3][..], &[3], &[4]] {
            let shape = GroupShape::weak(ks).unwrap();
            let r = certify_main_chain(&shape, &lim()).unwrap();
            assert_eq!(r.verdict, Verdict::Certified, "{shape}");
        }
        let (a, b, e) = chain_pair(&GroupShape::weak(&[2, 3]).unwrap()).unwrap();
        assert_eq!((a.to_string(), b.to_string(), e), ("(1,1)".into(), "(2,1)".into(), 2));
    }

    #[test]
    fn chain_on_strong_three_three() {
        let shape = GroupShape::strong(&[3, 3]).unwrap();
        let r = certify_main_chain(&shape, &lim()).unwrap();
        assert_eq!(r.verdict, Verdict::Certified);
        assert_eq!(r.exponent, 2);
    }

    #[test]
    fn lemma_names_round_trip() {
        for l in CoefficientLemma::ALL {
            assert_eq!(l.name().parse::<CoefficientLemma>().unwrap(), l);
        }
    }
}
