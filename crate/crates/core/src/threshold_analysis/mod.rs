//! Sign-representation checks, degree and weight computations.

mod bound;
mod check;
mod degree;
mod lemmas;
mod problem;
mod weight;

use std::fmt;

use exact_lp::Rational;
use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::polynomial::IntPolynomial;

pub use bound::{
    theorem_bound, verify_theorem_instance, verify_witness_gate, BoundReport, ChainCheck, Check, GateReport, TheoremBound,
};
pub use check::{check_sign_representation, check_sign_representation_uv, SignCheck, MAX_CHECK_INPUTS};
pub use degree::{sign_degree, DegreeStep, SignDegreeReport};
pub use lemmas::{
    certify_coefficient_lemma, certify_inequality, certify_main_chain, chain_pair, ChainReport,
    CoefficientLemma, InequalityResult, LemmaReport, LinearInequality,
};
pub use problem::{xy_monomials, FarkasCertificate, Features, RepresentationProblem, Row};
pub use weight::{min_weight, min_weight_in, WeightMode, WeightOptions, WeightOutcome, WeightStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Certified,
    Violated,
    /// Budget spent or instance too large; not a failure.
    Skipped,
    /// Outside the hypotheses under which the claim is made.
    NotAsserted,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Violated)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Certified => "CERTIFIED",
            Verdict::Violated => "VIOLATED",
            Verdict::Skipped => "SKIPPED",
            Verdict::NotAsserted => "NOT_ASSERTED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_bigint_opt<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(BigInt::to_string).serialize(s)
}

pub(crate) fn ser_rational_opt<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(exact_lp::rational::format).serialize(s)
}

pub(crate) fn ser_poly<S: Serializer>(v: &IntPolynomial, s: S) -> Result<S::Ok, S::Error> {
    v.to_json().serialize(s)
}

pub(crate) fn ser_poly_opt<S: Serializer>(v: &Option<IntPolynomial>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(IntPolynomial::to_json).serialize(s)
}
