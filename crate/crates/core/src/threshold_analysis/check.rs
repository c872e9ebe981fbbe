//! Exhaustive sign-representation checks.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfun::{BoolFun, Convention};
use crate::polynomial::{Basis, IntPolynomial, UvAssignment, Var};
use crate::shape::GroupShape;
use crate::{Error, Result};

/// Largest input count checked exhaustively.
pub const MAX_CHECK_INPUTS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SignCheck {
    Pass,
    Counterexample {
        input: usize,
        assignment: Vec<i64>,
        expected: i64,
        #[serde(serialize_with = "crate::threshold_analysis::ser_bigint")]
        value: BigInt,
    },
}

impl SignCheck {
    pub fn passed(&self) -> bool {
        matches!(self, SignCheck::Pass)
    }
}

enum Coeffs {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

impl Coeffs {
    /// Small arithmetic when `Σ|c| · bound` stays far from overflow.
    fn new(p: &IntPolynomial, bound: u64) -> Self {
        let fits = p.weight().bits() + 64 - u64::from(bound.leading_zeros()) < 120;
        let small = fits
            .then(|| p.terms().map(|(_, c)| c.to_i128()).collect::<Option<Vec<_>>>())
            .flatten();
        match small {
            Some(v) => Coeffs::Small(v),
            None => Coeffs::Big(p.terms().map(|(_, c)| c.clone()).collect()),
        }
    }

    fn dot(&self, vals: impl Iterator<Item = i64>) -> BigInt {
        match self {
            Coeffs::Small(c) => BigInt::from(c.iter().zip(vals).map(|(c, v)| c * v as i128).sum::<i128>()),
            Coeffs::Big(c) => c.iter().zip(vals).filter(|(_, v)| *v != 0).map(|(c, v)| c * v).sum(),
        }
    }

    fn sign_ok(&self, vals: impl Iterator<Item = i64>, positive: bool) -> bool {
        match self {
            Coeffs::Small(c) => {
                let s: i128 = c.iter().zip(vals).map(|(c, v)| c * v as i128).sum();
                (s >= 0) == positive
            }
            Coeffs::Big(_) => !self.dot(vals).is_negative() == positive,
        }
    }
}

fn scan(
    f: &BoolFun,
    coeffs: &Coeffs,
    values: impl Fn(usize) -> Vec<i64> + Sync,
) -> SignCheck {
    let bad = (0..f.table_len())
        .into_par_iter()
        .find_first(|&t| !coeffs.sign_ok(values(t).into_iter(), f.bit(t)));
    match bad {
        None => SignCheck::Pass,
        Some(t) => SignCheck::Counterexample {
            input: t,
            assignment: (0..f.n()).map(|i| f.input_value(t, i)).collect(),
            expected: f.value_at(t),
            value: coeffs.dot(values(t).into_iter()),
        },
    }
}

fn guard(f: &BoolFun) -> Result<()> {
    if f.n() > MAX_CHECK_INPUTS {
        return Err(Error::Cap(format!("{} inputs exceeds {MAX_CHECK_INPUTS}", f.n())));
    }
    Ok(())
}

/// Whether `sgn(p(x)) = f(x)` on every input, with `sgn(0) = 1`. `p` is
/// in the inputs of `f`, read in `f`'s alphabet. Returns the first failing
/// input in index order.
pub fn check_sign_representation(p: &IntPolynomial, f: &BoolFun) -> Result<SignCheck> {
    guard(f)?;
    if p.basis() != Basis::Xy {
        return Err(Error::Basis("expected an XY polynomial; use the UV check with a shape".into()));
    }
    let mut masks = Vec::with_capacity(p.len());
    for (m, _) in p.terms() {
        let mut mask = 0u64;
        for v in m {
            let Var::X(i) = v else { unreachable!() };
            if *i >= f.n() {
                return Err(Error::Input(format!("variable z{i} beyond {} inputs", f.n())));
            }
            mask |= 1 << i;
        }
        masks.push(mask);
    }
    let coeffs = Coeffs::new(p, 1);
    let conv = f.convention();
    Ok(scan(f, &coeffs, |t| {
        masks
            .iter()
            .map(|&m| match conv {
                Convention::ZeroOne => i64::from(t as u64 & m == m),
                Convention::PlusMinus => 1 - 2 * i64::from((!(t as u64) & m).count_ones() % 2 == 1),
            })
            .collect()
    }))
}

/// As [`check_sign_representation`] for a `UV` polynomial, evaluated
/// through the substitution of `shape` at each input.
pub fn check_sign_representation_uv(
    p: &IntPolynomial,
    f: &BoolFun,
    shape: &GroupShape,
) -> Result<SignCheck> {
    guard(f)?;
    if p.basis() != Basis::Uv {
        return Err(Error::Basis("expected a UV polynomial".into()));
    }
    if f.n() != shape.n() {
        return Err(Error::Input(format!("function has {} inputs, {shape} has {}", f.n(), shape.n())));
    }
    let probe = UvAssignment::from_input(shape, 0);
    for (m, _) in p.terms() {
        if let Some(v) = m.iter().find(|v| probe.get(**v).is_none()) {
            return Err(Error::Input(format!("{v} is not defined for {shape}")));
        }
    }
    let monos: Vec<Vec<Var>> = p.terms().map(|(m, _)| m.to_vec()).collect();
    let bound = 2u64.saturating_pow(p.degree() as u32);
    let coeffs = Coeffs::new(p, bound);
    Ok(scan(f, &coeffs, |t| {
        let a = UvAssignment::from_input(shape, t);
        monos
            .iter()
            .map(|m| m.iter().map(|v| a.get(*v).expect("checked")).product())
            .collect()
    }))
}
