//! Exact sign degree by LP feasibility at increasing degree.

use exact_lp::rational::clear_denominators;
use exact_lp::{solve_lazy, Limits, LpStatus};
use serde::Serialize;

use super::check::check_sign_representation;
use super::problem::{FarkasCertificate, RepresentationProblem};
use crate::boolfun::BoolFun;
use crate::polynomial::IntPolynomial;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct DegreeStep {
    pub degree: usize,
    pub columns: usize,
    pub feasible: bool,
    /// Oracle rounds spent.
    pub rounds: usize,
    /// Replayed refutation when infeasible.
    pub certificate: Option<FarkasCertificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignDegreeReport {
    pub label: String,
    pub n: usize,
    /// `None` if no degree up to the cap sign-represents the function.
    pub degree: Option<usize>,
    #[serde(serialize_with = "super::ser_poly_opt")]
    pub gate: Option<IntPolynomial>,
    pub steps: Vec<DegreeStep>,
}

/// Smallest `d ≤ dmax` such that a degree-`d` polynomial sign-represents
/// `f`. Every lower degree comes with a replayed Farkas refutation and the
/// returned integer gate is checked on every input.
pub fn sign_degree(f: &BoolFun, dmax: usize, limits: &Limits) -> Result<SignDegreeReport> {
    let mut steps = Vec::new();
    for d in 0..=dmax.min(f.n()) {
        let sys = RepresentationProblem::xy(f, d)?;
        let base = sys.lp_problem();
        let out = solve_lazy(&base, &sys, limits)?;
        match out.outcome.status {
            LpStatus::Infeasible => {
                let cert = sys.certificate(&base, &out)?;
                sys.verify(&cert)?;
                steps.push(DegreeStep {
                    degree: d,
                    columns: sys.num_columns(),
                    feasible: false,
                    rounds: out.rounds,
                    certificate: Some(cert),
                });
            }
            LpStatus::Optimal | LpStatus::Feasible => {
                let x = out.outcome.witness.as_ref().expect("feasible outcome has a witness");
                let gate = sys.polynomial(&clear_denominators(x))?;
                if !check_sign_representation(&gate, f)?.passed() {
                    return Err(Error::Certificate(format!("degree-{d} witness fails the exhaustive check")));
                }
                steps.push(DegreeStep {
                    degree: d,
                    columns: sys.num_columns(),
                    feasible: true,
                    rounds: out.rounds,
                    certificate: None,
                });
                return Ok(SignDegreeReport {
                    label: f.label().to_string(),
                    n: f.n(),
                    degree: Some(d),
                    gate: Some(gate),
                    steps,
                });
            }
            LpStatus::Unbounded => unreachable!("feasibility problem has no objective"),
        }
    }
    Ok(SignDegreeReport {
        label: f.label().to_string(),
        n: f.n(),
        degree: None,
        gate: None,
        steps,
    })
}
