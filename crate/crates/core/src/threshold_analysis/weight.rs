//! Minimum integer weight `W(f, d)` and its LP relaxation.

use exact_lp::certificate::check_outcome;
use exact_lp::rational::clear_denominators;
use exact_lp::{ilp_min_l1, min_l1, BnbLimits, IlpStatus, LpStatus, Rational};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::check::{check_sign_representation, check_sign_representation_uv};
use super::problem::{FarkasCertificate, Features, RepresentationProblem};
use crate::boolfun::BoolFun;
use crate::polynomial::IntPolynomial;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Rational `min Σ|c|`: a certified lower bound on the integer weight.
    Lp,
    /// Integer `min Σ|c|` by branch and bound.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightStatus {
    Optimal,
    /// No polynomial of this degree sign-represents the function.
    Infeasible,
    /// Node budget spent before optimality was proven.
    Budget,
}

#[derive(Clone, Debug)]
pub struct WeightOptions {
    pub bnb: BnbLimits,
    /// Known gate, used to seed the search.
    pub incumbent: Option<IntPolynomial>,
}

impl Default for WeightOptions {
    fn default() -> Self {
        WeightOptions {
            bnb: BnbLimits::default(),
            incumbent: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightOutcome {
    pub mode: WeightMode,
    pub status: WeightStatus,
    /// Optimum (LP mode: rational; exact mode: integer). On a spent budget,
    /// the best gate found.
    #[serde(serialize_with = "super::ser_rational_opt")]
    pub value: Option<Rational>,
    /// Proven lower bound on the integer weight.
    #[serde(serialize_with = "super::ser_rational_opt")]
    pub lower_bound: Option<Rational>,
    /// Root LP value.
    #[serde(serialize_with = "super::ser_rational_opt")]
    pub relaxation: Option<Rational>,
    /// Integer gate: the exact optimum, or the LP optimum scaled to integers.
    #[serde(serialize_with = "super::ser_poly_opt")]
    pub gate: Option<IntPolynomial>,
    pub nodes: usize,
    pub certificate: Option<FarkasCertificate>,
}

/// `W(f, d)` over multilinear polynomials in the inputs of `f`.
pub fn min_weight(f: &BoolFun, d: usize, mode: WeightMode, opts: &WeightOptions) -> Result<WeightOutcome> {
    min_weight_in(&RepresentationProblem::xy(f, d)?, mode, opts)
}

/// Minimum weight over the columns of any representation system.
pub fn min_weight_in(
    sys: &RepresentationProblem,
    mode: WeightMode,
    opts: &WeightOptions,
) -> Result<WeightOutcome> {
    let base = sys.lp_problem();
    match mode {
        WeightMode::Lp => {
            let out = min_l1(&base, sys, &opts.bnb.lp)?;
            match out.status {
                LpStatus::Infeasible => infeasible(sys, &base, &out.lazy, WeightMode::Lp),
                LpStatus::Optimal => {
                    check_outcome(&out.lazy.problem, &out.lazy.outcome)?;
                    let x = out.coefficients.expect("optimal outcome has a point");
                    let gate = sys.polynomial(&clear_denominators(&x))?;
                    verify_gate(sys, &gate)?;
                    Ok(WeightOutcome {
                        mode,
                        status: WeightStatus::Optimal,
                        lower_bound: out.value.clone(),
                        relaxation: out.value.clone(),
                        value: out.value,
                        gate: Some(gate),
                        nodes: 0,
                        certificate: None,
                    })
                }
                s => Err(Error::Certificate(format!("unexpected LP status {s:?}"))),
            }
        }
        WeightMode::Exact => {
            let seed = opts
                .incumbent
                .as_ref()
                .map(|p| sys.columns_of(p))
                .transpose()?
                .map(|c| c.into_iter().map(Rational::from_integer).collect::<Vec<_>>());
            let out = ilp_min_l1(&base, sys, seed.as_deref(), &opts.bnb)?;
            let gate = match &out.witness {
                Some(x) => {
                    let g = sys.polynomial(&integers(x)?)?;
                    verify_gate(sys, &g)?;
                    Some(g)
                }
                None => None,
            };
            let status = match out.status {
                IlpStatus::Optimal => WeightStatus::Optimal,
                IlpStatus::NodeLimit => WeightStatus::Budget,
                IlpStatus::Infeasible => {
                    // rerun as an LP to obtain a replayable refutation
                    let lp = min_l1(&base, sys, &opts.bnb.lp)?;
                    return infeasible(sys, &base, &lp.lazy, WeightMode::Exact);
                }
                IlpStatus::Unbounded => unreachable!("weights are bounded below"),
            };
            Ok(WeightOutcome {
                mode,
                status,
                value: out.value,
                lower_bound: out.lower_bound,
                relaxation: out.relaxation,
                gate,
                nodes: out.nodes,
                certificate: None,
            })
        }
    }
}

fn integers(x: &[Rational]) -> Result<Vec<BigInt>> {
    x.iter()
        .map(|v| {
            v.is_integer()
                .then(|| v.to_integer())
                .ok_or_else(|| Error::Certificate("non-integral weight witness".into()))
        })
        .collect()
}

fn verify_gate(sys: &RepresentationProblem, gate: &IntPolynomial) -> Result<()> {
    let f = sys.function();
    let ok = match sys.features() {
        Features::Xy { .. } => check_sign_representation(gate, f)?.passed(),
        Features::Tuples { shape, .. } => check_sign_representation_uv(gate, f, shape)?.passed(),
        _ => sys.first_violation(&sys.columns_of(gate)?).is_none(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Certificate("weight witness fails the exhaustive check".into()))
    }
}

fn infeasible(
    sys: &RepresentationProblem,
    base: &exact_lp::LpProblem,
    lazy: &exact_lp::LazyOutcome,
    mode: WeightMode,
) -> Result<WeightOutcome> {
    let cert = sys.certificate(base, lazy)?;
    sys.verify(&cert)?;
    Ok(WeightOutcome {
        mode,
        status: WeightStatus::Infeasible,
        value: None,
        lower_bound: None,
        relaxation: None,
        gate: None,
        nodes: 0,
        certificate: Some(cert),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{make_gt, Convention, MsbSide};
    use exact_lp::rational::int;

    #[test]
    fn constant_one_has_weight_zero() {
        let f = BoolFun::from_fn(3, Convention::ZeroOne, "one", |_| true).unwrap();
        for mode in [WeightMode::Lp, WeightMode::Exact] {
            let w = min_weight(&f, 1, mode, &WeightOptions::default()).unwrap();
            assert_eq!(w.value, Some(int(0)));
        }
    }

    #[test]
    fn and_of_two() {
        // x₁ + x₂ − 2 ≥ 0 exactly on (1,1); no weight-3 gate works with
        // the ≤ −1 margin on the other inputs.
        let f = BoolFun::from_fn(2, Convention::ZeroOne, "and", |t| t == 3).unwrap();
        let w = min_weight(&f, 1, WeightMode::Exact, &WeightOptions::default()).unwrap();
        assert_eq!(w.status, WeightStatus::Optimal);
        assert_eq!(w.value, Some(int(4)));
        let lp = min_weight(&f, 1, WeightMode::Lp, &WeightOptions::default()).unwrap();
        assert!(lp.value.unwrap() <= int(4));
    }

    #[test]
    fn gt_two_exact_weight() {
        // x₁ + 2x₂ − y₁ − 2y₂ has weight 6 and represents GT₂
        let f = make_gt(2, MsbSide::Last).unwrap();
        let w = min_weight(&f, 1, WeightMode::Exact, &WeightOptions::default()).unwrap();
        assert_eq!(w.status, WeightStatus::Optimal);
        assert!(w.value.clone().unwrap() <= int(6));
        let g = w.gate.unwrap();
        assert_eq!(Rational::from_integer(g.weight()), w.value.unwrap());
    }

    #[test]
    fn degree_too_low_is_refuted() {
        let f = BoolFun::from_fn(2, Convention::ZeroOne, "xor", |t| t == 1 || t == 2).unwrap();
        let w = min_weight(&f, 1, WeightMode::Exact, &WeightOptions::default()).unwrap();
        assert_eq!(w.status, WeightStatus::Infeasible);
        assert!(w.certificate.is_some());
    }
}
