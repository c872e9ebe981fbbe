//! The weight lower bound of the hard families, and per-instance reports.

use exact_lp::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use super::check::{check_sign_representation, check_sign_representation_uv, MAX_CHECK_INPUTS};
use super::lemmas::chain_pair;
use super::weight::{min_weight, WeightMode, WeightOptions, WeightOutcome, WeightStatus};
use super::Verdict;
use crate::boolfun::{make_hard, BoolFun};
use crate::polynomial::{symmetrize, to_uv, tuple_coefficient, witness_gate, IntPolynomial};
use crate::shape::{GroupShape, Variant};
use crate::tuple_order::TupleIndex;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremBound {
    /// `(k_d − 2)·Π m_i − d` (weak) or `… − d·⌈log₂ n⌉` (strong).
    pub exponent: i64,
    /// `2^exponent`, or 1 when the exponent is negative.
    #[serde(serialize_with = "super::ser_bigint")]
    pub value: BigInt,
    /// Whether the shape meets the theorem's hypotheses.
    pub asserted: bool,
    pub log_rounding: Option<&'static str>,
}

fn ceil_log2(n: usize) -> i64 {
    (usize::BITS - (n.max(1) - 1).leading_zeros()) as i64
}

pub fn theorem_bound(shape: &GroupShape) -> TheoremBound {
    let d = shape.d();
    let head = &shape.ks()[..d - 1];
    let (prod, penalty, rounding): (i64, i64, _) = match shape.variant() {
        Variant::Weak => (head.iter().map(|&k| k as i64).product(), d as i64, None),
        Variant::Strong => (
            head.iter().map(|&k| k as i64 - 1).product(),
            d as i64 * ceil_log2(shape.n()),
            Some("log base 2, rounded up"),
        ),
    };
    let exponent = (shape.last_k() as i64 - 2) * prod - penalty;
    let value = if exponent >= 0 {
        BigInt::one() << exponent as usize
    } else {
        BigInt::one()
    };
    TheoremBound {
        exponent,
        value,
        asserted: shape.satisfies_hypotheses(),
        log_rounding: rounding,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    fn new(name: &str, verdict: Verdict, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            verdict,
            detail: detail.into(),
        }
    }
}

/// Chain coefficients read off a symmetrized solver gate.
#[derive(Clone, Debug, Serialize)]
pub struct ChainCheck {
    pub alpha: TupleIndex,
    pub beta: TupleIndex,
    pub exponent: u64,
    #[serde(serialize_with = "super::ser_bigint")]
    pub w_alpha: BigInt,
    #[serde(serialize_with = "super::ser_bigint")]
    pub w_beta: BigInt,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub shape: GroupShape,
    pub label: String,
    pub n: usize,
    pub d: usize,
    pub mode: WeightMode,
    pub bound: TheoremBound,
    #[serde(serialize_with = "super::ser_rational_opt")]
    pub lp_lower_bound: Option<Rational>,
    #[serde(serialize_with = "super::ser_bigint_opt")]
    pub exact_weight: Option<BigInt>,
    pub weight: WeightOutcome,
    #[serde(serialize_with = "super::ser_bigint")]
    pub witness_weight: BigInt,
    pub chain: Option<ChainCheck>,
    pub checks: Vec<Check>,
}

impl BoundReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_failure())
    }

    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.verdict)
    }

    pub const CSV_HEADER: &'static str = "shape,n,d,bound,lp_lb,exact_w,witness_w,verdicts";

    pub fn csv_row(&self) -> String {
        let verdicts = self
            .checks
            .iter()
            .map(|c| format!("{}={}", c.name, c.verdict))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{},{},{}",
            self.shape.key(),
            self.n,
            self.d,
            self.bound.value,
            self.lp_lower_bound.as_ref().map(exact_lp::rational::format).unwrap_or_default(),
            self.exact_weight.as_ref().map(BigInt::to_string).unwrap_or_default(),
            self.witness_weight,
            verdicts
        )
    }
}

fn weak_gate_weight(shape: &GroupShape) -> BigInt {
    let k = shape.k_size();
    (BigInt::one() << shape.d()) * ((BigInt::one() << (k + 1)) - 2)
}

/// Runs the witness-gate checks, the weight computation and the chain
/// readout for one shape. Verdicts on claims outside the hypotheses are
/// `NOT_ASSERTED`.
#[derive(Clone, Debug, Serialize)]
pub struct GateReport {
    pub shape: GroupShape,
    #[serde(serialize_with = "super::ser_poly")]
    pub gate: IntPolynomial,
    #[serde(serialize_with = "super::ser_bigint")]
    pub weight: BigInt,
    /// Weight after the change to the `u/v` basis.
    #[serde(serialize_with = "super::ser_bigint")]
    pub uv_weight: BigInt,
    pub checks: Vec<Check>,
}

impl GateReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_failure())
    }

    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.verdict)
    }
}

/// Exhaustive check of the explicit gate of `shape`, its weight, the
/// basis-change bound and its symmetrized form.
pub fn verify_witness_gate(shape: &GroupShape) -> Result<GateReport> {
    let f = make_hard(shape)?;
    verify_witness_gate_of(shape, &f)
}

fn verify_witness_gate_of(shape: &GroupShape, f: &BoolFun) -> Result<GateReport> {
    let d = shape.d();
    let p = witness_gate(shape)?;
    let mut checks = Vec::new();
    let small = f.n() <= MAX_CHECK_INPUTS;

    checks.push(match small {
        true => Check::new(
            "witness_gate",
            Verdict::from_bool(check_sign_representation(&p, f)?.passed()),
            format!("{} inputs", f.table_len()),
        ),
        false => Check::new("witness_gate", Verdict::Skipped, "too many inputs"),
    });
    if shape.variant() == Variant::Weak {
        let want = weak_gate_weight(shape);
        checks.push(Check::new(
            "witness_weight_formula",
            Verdict::from_bool(p.weight() == want),
            format!("W = {}, formula {want}", p.weight()),
        ));
    }
    let puv = to_uv(&p, shape)?;
    let factor = match shape.variant() {
        Variant::Weak => BigInt::one() << d,
        Variant::Strong => BigInt::from(shape.n()).pow(d as u32),
    };
    checks.push(Check::new(
        "basis_change",
        Verdict::from_bool(puv.weight() <= &factor * p.weight()),
        format!("W(p') = {}, limit {}", puv.weight(), &factor * p.weight()),
    ));
    if small {
        let q = symmetrize(&puv, shape)?;
        checks.push(Check::new(
            "symmetrized_witness",
            Verdict::from_bool(check_sign_representation_uv(&q, f, shape)?.passed()),
            format!("{} tuple monomials", q.len()),
        ));
    }
    Ok(GateReport {
        shape: shape.clone(),
        weight: p.weight(),
        uv_weight: puv.weight(),
        gate: p,
        checks,
    })
}

/// Runs the witness-gate checks, the weight computation and the chain
/// readout for one shape. Verdicts on claims outside the hypotheses are
/// `NOT_ASSERTED`.
pub fn verify_theorem_instance(shape: &GroupShape, mode: WeightMode, opts: &WeightOptions) -> Result<BoundReport> {
    let f = make_hard(shape)?;
    let d = shape.d();
    let bound = theorem_bound(shape);
    let small = f.n() <= MAX_CHECK_INPUTS;
    let gate = verify_witness_gate_of(shape, &f)?;
    let gate_ok = gate.verdict("witness_gate") == Some(Verdict::Pass);
    let p = gate.gate;
    let mut checks = gate.checks;

    let mut opts = opts.clone();
    if mode == WeightMode::Exact && opts.incumbent.is_none() && gate_ok {
        opts.incumbent = Some(p.clone());
    }
    let weight = min_weight(&f, d, mode, &opts)?;
    let (lp_lower_bound, exact_weight) = match (mode, weight.status) {
        (WeightMode::Lp, WeightStatus::Optimal) => (weight.value.clone(), None),
        (WeightMode::Exact, WeightStatus::Optimal) => (
            weight.relaxation.clone(),
            weight.value.as_ref().map(|v| v.to_integer()),
        ),
        _ => (weight.relaxation.clone(), None),
    };
    checks.push(Check::new(
        "weight_solve",
        match weight.status {
            WeightStatus::Optimal => Verdict::Pass,
            WeightStatus::Budget => Verdict::Skipped,
            WeightStatus::Infeasible => Verdict::Fail,
        },
        format!("{:?} after {} nodes", weight.status, weight.nodes),
    ));

    let bound_check = if !bound.asserted {
        Check::new("theorem_bound", Verdict::NotAsserted, "hypotheses not met")
    } else if let Some(w) = &exact_weight {
        Check::new(
            "theorem_bound",
            Verdict::from_bool(&bound.value <= w),
            format!("bound {} vs W {w}", bound.value),
        )
    } else if let Some(lb) = &lp_lower_bound {
        let ceil = lb.ceil().to_integer();
        let verdict = if bound.value <= ceil { Verdict::Pass } else { Verdict::Skipped };
        Check::new("theorem_bound", verdict, format!("bound {} vs LP bound {lb}", bound.value))
    } else {
        Check::new("theorem_bound", Verdict::Skipped, "no weight available")
    };
    checks.push(bound_check);

    let chain = match &weight.gate {
        Some(g) if small => Some(chain_readout(shape, g)?),
        _ => None,
    };
    if let Some(c) = &chain {
        let verdict = if !bound.asserted {
            Verdict::NotAsserted
        } else {
            Verdict::from_bool(c.holds)
        };
        checks.push(Check::new(
            "chain",
            verdict,
            format!("w{} = {}, w{} = {}, factor 2^{}", c.alpha, c.w_alpha, c.beta, c.w_beta, c.exponent),
        ));
        let q = symmetrize(&to_uv(weight.gate.as_ref().expect("gate"), shape)?, shape)?;
        checks.push(Check::new(
            "symmetrized_solver_gate",
            Verdict::from_bool(check_sign_representation_uv(&q, &f, shape)?.passed()),
            format!("W(q) = {}", q.weight()),
        ));
    }

    Ok(BoundReport {
        shape: shape.clone(),
        label: shape.label(),
        n: shape.n(),
        d,
        mode,
        bound,
        lp_lower_bound,
        exact_weight,
        witness_weight: p.weight(),
        weight,
        chain,
        checks,
    })
}

fn chain_readout(shape: &GroupShape, gate: &IntPolynomial) -> Result<ChainCheck> {
    let q = symmetrize(&to_uv(gate, shape)?, shape)?;
    let (alpha, beta, exponent) = chain_pair(shape)?;
    let w_alpha = tuple_coefficient(&q, &alpha);
    let w_beta = tuple_coefficient(&q, &beta);
    let holds = w_alpha.is_positive() && w_beta >= (&w_alpha << exponent as usize);
    Ok(ChainCheck {
        alpha,
        beta,
        exponent,
        w_alpha,
        w_beta,
        holds,
    })
}
