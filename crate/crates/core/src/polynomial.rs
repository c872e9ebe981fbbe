//! Sparse integer polynomials over input variables (`XY`) or the derived
//! `u`/`v` variables (`UV`), with the constructions that move between them.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::shape::{GroupShape, Variant};
use crate::tuple_order::{Order, OrderContext, TupleIndex};
use crate::{Error, Result};

/// Cap on `|K|` for explicit gates; coefficients grow like `2^{|K|}`.
pub const MAX_GATE_TUPLES: usize = 1 << 16;
/// Default cap on the number of monomials produced by an expansion.
pub const DEFAULT_MONOMIAL_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Input variable by position in the shape's layout.
    X(usize),
    /// `u^group_index`.
    U { group: usize, index: usize },
    /// `v^group_index`.
    V { group: usize, index: usize },
}

impl Var {
    pub fn name(&self) -> String {
        match self {
            Var::X(t) => format!("z{t}"),
            Var::U { group, index } => format!("u{group}_{index}"),
            Var::V { group, index } => format!("v{group}_{index}"),
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        let (head, rest) = s.split_at(1.min(s.len()));
        let pair = || {
            let (g, j) = rest.split_once('_')?;
            Some((g.parse().ok()?, j.parse().ok()?))
        };
        match head {
            "z" => rest.parse().ok().map(Var::X),
            "u" => pair().map(|(group, index)| Var::U { group, index }),
            "v" => pair().map(|(group, index)| Var::V { group, index }),
            _ => None,
        }
    }

    fn basis(&self) -> Basis {
        match self {
            Var::X(_) => Basis::Xy,
            _ => Basis::Uv,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Xy,
    Uv,
}

/// `XY` monomials are sets of distinct inputs. `UV` monomials are
/// multisets, since `x·y` on one position expands to `(v² − u²)/4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    basis: Basis,
    terms: BTreeMap<Vec<Var>, BigInt>,
}

impl IntPolynomial {
    pub fn new(basis: Basis) -> Self {
        IntPolynomial {
            basis,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Adds `coeff · Π vars` to the polynomial.
    pub fn add_term(&mut self, mut vars: Vec<Var>, coeff: BigInt) -> Result<()> {
        if let Some(v) = vars.iter().find(|v| v.basis() != self.basis) {
            return Err(Error::Basis(format!("{v} in a {:?} polynomial", self.basis)));
        }
        vars.sort_unstable();
        if self.basis == Basis::Xy && vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Basis("repeated input variable in a multilinear monomial".into()));
        }
        self.add_sorted(vars, coeff);
        Ok(())
    }

    fn add_sorted(&mut self, vars: Vec<Var>, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(vars) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Var], &BigInt)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, vars: &[Var]) -> BigInt {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    /// `W(p)`: sum of absolute values of coefficients.
    pub fn weight(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, k: &BigInt) -> IntPolynomial {
        let mut out = IntPolynomial::new(self.basis);
        if !k.is_zero() {
            out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        }
        out
    }

    /// Value at an `XY` point; `values[t]` is input `t`.
    pub fn eval_xy(&self, values: &[i64]) -> Result<BigInt> {
        if self.basis != Basis::Xy {
            return Err(Error::Basis("UV polynomial evaluated at an input point".into()));
        }
        let mut sum = BigInt::zero();
        for (m, c) in &self.terms {
            let mut prod = 1i64;
            for v in m {
                let Var::X(t) = v else { unreachable!() };
                let x = *values
                    .get(*t)
                    .ok_or_else(|| Error::Input(format!("no value for input {t}")))?;
                prod *= x;
                if prod == 0 {
                    break;
                }
            }
            if prod != 0 {
                sum += c * prod;
            }
        }
        Ok(sum)
    }

    pub fn eval_uv(&self, a: &UvAssignment) -> Result<BigInt> {
        if self.basis != Basis::Uv {
            return Err(Error::Basis("XY polynomial evaluated at a UV point".into()));
        }
        let mut sum = BigInt::zero();
        for (m, c) in &self.terms {
            let mut prod = BigInt::one();
            for v in m {
                let x = a.get(*v).ok_or_else(|| Error::Input(format!("no value for {v}")))?;
                if x == 0 {
                    prod = BigInt::zero();
                    break;
                }
                prod *= x;
            }
            sum += c * prod;
        }
        Ok(sum)
    }

    /// JSON list of `{vars, coeff}` with decimal coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                vars: m.iter().map(Var::name).collect(),
                coeff: c.to_string(),
            })
            .collect();
        serde_json::to_value(list).expect("plain record")
    }

    /// Inverse of [`to_json`](Self::to_json). The basis is read off the
    /// variable names; an empty list is an `XY` polynomial.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let list: Vec<TermJson> = serde_json::from_value(v.clone())?;
        let mut vars_of = Vec::with_capacity(list.len());
        for t in &list {
            let vars: Option<Vec<Var>> = t.vars.iter().map(|s| Var::parse(s)).collect();
            let vars = vars.ok_or_else(|| Error::Input(format!("bad variable in {:?}", t.vars)))?;
            let coeff: BigInt = t
                .coeff
                .parse()
                .map_err(|_| Error::Input(format!("bad coefficient {:?}", t.coeff)))?;
            vars_of.push((vars, coeff));
        }
        let basis = vars_of
            .iter()
            .flat_map(|(v, _)| v.first())
            .map(Var::basis)
            .next()
            .unwrap_or(Basis::Xy);
        let mut p = IntPolynomial::new(basis);
        for (vars, coeff) in vars_of {
            p.add_term(vars, coeff)?;
        }
        Ok(p)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            write!(f, "{sep}{sign}{}", c.abs())?;
            for v in m {
                write!(f, "*{v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    vars: Vec<String>,
    coeff: String,
}

/// Values of the derived variables at one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UvAssignment {
    /// `u[g-1][index]`, indexed by the coordinate label.
    u: Vec<Vec<i64>>,
    /// `v[g-1][index]`; empty for strong groups other than the last.
    v: Vec<Vec<i64>>,
}

impl UvAssignment {
    /// Derived values at input index `t` of the shape's hard function.
    pub fn from_input(shape: &GroupShape, t: usize) -> Self {
        let bit = |p: usize| (t >> p & 1) as i64;
        let pm = |p: usize| 2 * bit(p) - 1;
        let d = shape.d();
        let mut u = Vec::with_capacity(d);
        let mut v = Vec::with_capacity(d);
        for g in 1..=d {
            let k = shape.ks()[g - 1];
            if shape.uses_l_forms(g) {
                let x = |j: usize| pm(shape.x_pos(g, j));
                let mut row = vec![x(1) + x(k)];
                row.extend((1..k).map(|j| x(j) - x(j + 1)));
                u.push(row);
                v.push(Vec::new());
            } else {
                let val = |p: usize| match shape.variant() {
                    Variant::Weak => bit(p),
                    Variant::Strong => pm(p),
                };
                let mut ur = vec![0];
                let mut vr = vec![0];
                for j in 1..=k {
                    let (x, y) = (val(shape.x_pos(g, j)), val(shape.y_pos(g, j)));
                    ur.push(x - y);
                    vr.push(x + y);
                }
                u.push(ur);
                v.push(vr);
            }
        }
        UvAssignment { u, v }
    }

    pub fn get(&self, var: Var) -> Option<i64> {
        let pick = |rows: &Vec<Vec<i64>>, g: usize, j: usize| -> Option<i64> {
            rows.get(g.checked_sub(1)?)?.get(j).copied()
        };
        match var {
            Var::X(_) => None,
            Var::U { group, index } => pick(&self.u, group, index),
            Var::V { group, index } => pick(&self.v, group, index),
        }
    }

    pub fn u(&self, group: usize, index: usize) -> i64 {
        self.u[group - 1][index]
    }
}

fn signed_terms(
    out: &mut IntPolynomial,
    factors: &[Vec<(Var, i64)>],
    coeff: &BigInt,
    cap: usize,
) -> Result<()> {
    let mut partial: Vec<(Vec<Var>, i64)> = vec![(Vec::new(), 1)];
    for f in factors {
        let mut next = Vec::with_capacity(partial.len() * f.len());
        for (m, c) in &partial {
            for (v, a) in f {
                let mut m2 = m.clone();
                m2.push(*v);
                next.push((m2, c * a));
            }
        }
        partial = next;
    }
    for (mut m, c) in partial {
        m.sort_unstable();
        out.add_sorted(m, coeff * c);
        if out.len() > cap {
            return Err(Error::Cap(format!("expansion exceeds {cap} monomials")));
        }
    }
    Ok(())
}

/// `Σ_j 2^j t_j` over the ascending enumeration of `K`, with `t_j` the
/// product attached to the `j`-th tuple.
pub fn witness_gate(shape: &GroupShape) -> Result<IntPolynomial> {
    if shape.k_size() > MAX_GATE_TUPLES {
        return Err(Error::Cap(format!(
            "|K| = {} exceeds the gate cap {MAX_GATE_TUPLES}",
            shape.k_size()
        )));
    }
    let ctx = OrderContext::new(shape);
    let d = shape.d();
    let mut p = IntPolynomial::new(Basis::Xy);
    let mut coeff = BigInt::one();
    for alpha in ctx.enumerate_ordered()? {
        coeff <<= 1;
        let orders = ctx.orders_unchecked(alpha.coords());
        let mut factors = Vec::with_capacity(d);
        let mut sign = 1i64;
        for l in 1..=d {
            let a = alpha.get(l);
            if shape.uses_l_forms(l) {
                let k = shape.ks()[l - 1];
                let x = |j: usize| Var::X(shape.x_pos(l, j));
                factors.push(if a == 0 {
                    vec![(x(1), 1), (x(k), 1)]
                } else {
                    vec![(x(a), 1), (x(a + 1), -1)]
                });
                if a == 0 && orders[l - 1] == Order::Zero {
                    sign = -sign;
                }
            } else {
                factors.push(vec![
                    (Var::X(shape.x_pos(l, a)), 1),
                    (Var::X(shape.y_pos(l, a)), -1),
                ]);
            }
        }
        signed_terms(&mut p, &factors, &(&coeff * sign), usize::MAX)?;
    }
    Ok(p)
}

/// The substitution row of an input variable, over denominator 2.
fn substitution(shape: &GroupShape, pos: usize) -> Vec<(Var, i64)> {
    let (is_y, g, j) = shape.role(pos);
    if shape.uses_l_forms(g) {
        let k = shape.ks()[g - 1];
        (0..k)
            .map(|m| {
                let s = if m == 0 || m >= j { 1 } else { -1 };
                (Var::U { group: g, index: m }, s)
            })
            .collect()
    } else {
        let su = if is_y { -1 } else { 1 };
        vec![(Var::U { group: g, index: j }, su), (Var::V { group: g, index: j }, 1)]
    }
}

/// Rewrites an `XY` polynomial of degree at most `d` in the `u`/`v`
/// variables, scaled by `2^d` so that coefficients stay integral.
pub fn to_uv(p: &IntPolynomial, shape: &GroupShape) -> Result<IntPolynomial> {
    to_uv_capped(p, shape, DEFAULT_MONOMIAL_CAP)
}

pub fn to_uv_capped(p: &IntPolynomial, shape: &GroupShape, cap: usize) -> Result<IntPolynomial> {
    if p.basis() != Basis::Xy {
        return Err(Error::Basis("to_uv expects an XY polynomial".into()));
    }
    let d = shape.d();
    if p.degree() > d {
        return Err(Error::Degree(format!("degree {} exceeds d = {d}", p.degree())));
    }
    let mut out = IntPolynomial::new(Basis::Uv);
    for (m, c) in p.terms() {
        let mut factors = Vec::with_capacity(m.len());
        for v in m {
            let Var::X(pos) = v else { unreachable!() };
            if *pos >= shape.n() {
                return Err(Error::Input(format!("input {pos} outside {}", shape)));
            }
            factors.push(substitution(shape, *pos));
        }
        let scaled = c << (d - m.len());
        signed_terms(&mut out, &factors, &scaled, cap)?;
    }
    Ok(out)
}

/// Keeps the monomials made of exactly one `u` variable from each group
/// and nothing else.
pub fn symmetrize(p: &IntPolynomial, shape: &GroupShape) -> Result<IntPolynomial> {
    if p.basis() != Basis::Uv {
        return Err(Error::Basis("symmetrize expects a UV polynomial".into()));
    }
    let d = shape.d();
    let mut out = IntPolynomial::new(Basis::Uv);
    for (m, c) in p.terms() {
        let ok = m.len() == d
            && m.iter().enumerate().all(|(i, v)| matches!(v, Var::U { group, .. } if *group == i + 1));
        if ok {
            out.terms.insert(m.to_vec(), c.clone());
        }
    }
    Ok(out)
}

/// The monomial `Π_i u^i_{α_i}`.
pub fn tuple_monomial(alpha: &TupleIndex) -> Vec<Var> {
    alpha
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &a)| Var::U { group: i + 1, index: a })
        .collect()
}

/// `w_α` of a symmetrized polynomial.
pub fn tuple_coefficient(q: &IntPolynomial, alpha: &TupleIndex) -> BigInt {
    q.coefficient(&tuple_monomial(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::make_hard;
    use proptest::prelude::*;

    fn x(t: usize) -> Var {
        Var::X(t)
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn input_values(shape: &GroupShape, t: usize) -> Vec<i64> {
        (0..shape.n())
            .map(|i| {
                let b = (t >> i & 1) as i64;
                match shape.variant() {
                    Variant::Weak => b,
                    Variant::Strong => 2 * b - 1,
                }
            })
            .collect()
    }

    #[test]
    fn gate_for_two_bits() {
        // 2(x₁−y₁) + 4(x₂−y₂)
        let shape = GroupShape::weak(&[2]).unwrap();
        let p = witness_gate(&shape).unwrap();
        let mut expect = IntPolynomial::new(Basis::Xy);
        expect.add_term(vec![x(0)], big(2)).unwrap();
        expect.add_term(vec![x(2)], big(-2)).unwrap();
        expect.add_term(vec![x(1)], big(4)).unwrap();
        expect.add_term(vec![x(3)], big(-4)).unwrap();
        assert_eq!(p, expect);
        assert_eq!(p.weight(), big(12));
    }

    #[test]
    fn gate_weight_formula() {
        for ks in [vec![2, 2], vec![2, 3], vec![2, 2, 3], vec![4, 3], vec![1], vec![3, 1, 2]] {
            let shape = GroupShape::weak(&ks).unwrap();
            let p = witness_gate(&shape).unwrap();
            let d = shape.d() as u32;
            let expect = (BigInt::one() << (shape.k_size() + 1)) - 2;
            assert_eq!(p.weight(), expect << d, "{shape}");
            assert_eq!(p.degree(), shape.d());
        }
        let p = witness_gate(&GroupShape::weak(&[2, 2]).unwrap()).unwrap();
        assert_eq!(p.weight(), big(120));
    }

    #[test]
    fn gate_at_single_input() {
        let p = witness_gate(&GroupShape::weak(&[1]).unwrap()).unwrap();
        assert_eq!(p.eval_xy(&[1, 0]).unwrap(), big(2));
        assert_eq!(p.eval_xy(&[1, 1]).unwrap(), big(0));
        assert_eq!(IntPolynomial::new(Basis::Xy).eval_xy(&[]).unwrap(), big(0));
    }

    #[test]
    fn gate_dominance_matches_scan() {
        // The top nonzero product decides the sign, so the gate's sign is
        // the hard function's value.
        for shape in [
            GroupShape::weak(&[2, 3]).unwrap(),
            GroupShape::strong(&[3, 3]).unwrap(),
        ] {
            let p = witness_gate(&shape).unwrap();
            let f = make_hard(&shape).unwrap();
            for t in 0..f.table_len() {
                let v = p.eval_xy(&input_values(&shape, t)).unwrap();
                assert_eq!(!v.is_negative(), f.bit(t), "{shape} input {t}");
            }
        }
    }

    #[test]
    fn uv_of_single_difference() {
        let shape = GroupShape::weak(&[1]).unwrap();
        let mut p = IntPolynomial::new(Basis::Xy);
        p.add_term(vec![x(0)], big(1)).unwrap();
        p.add_term(vec![x(1)], big(-1)).unwrap();
        let q = to_uv(&p, &shape).unwrap();
        let mut expect = IntPolynomial::new(Basis::Uv);
        expect.add_term(vec![Var::U { group: 1, index: 1 }], big(2)).unwrap();
        assert_eq!(q, expect);
        assert!(q.weight() <= big(2) * p.weight());
    }

    #[test]
    fn uv_of_strong_first_variable() {
        // x¹₁ with k₁ = 3: (u₀ + u₁ + u₂)/2, times 2^d = 4
        let shape = GroupShape::strong(&[3, 3]).unwrap();
        let mut p = IntPolynomial::new(Basis::Xy);
        p.add_term(vec![x(0)], big(1)).unwrap();
        let q = to_uv(&p, &shape).unwrap();
        assert_eq!(q.len(), 3);
        for j in 0..3 {
            assert_eq!(q.coefficient(&[Var::U { group: 1, index: j }]), big(2));
        }
        assert!(q.weight() <= big(shape.n().pow(2) as i64) * p.weight());
    }

    #[test]
    fn uv_of_product_on_one_position() {
        // x·y = (v² − u²)/4, times 2 for d = 1
        let shape = GroupShape::weak(&[1]).unwrap();
        let mut p = IntPolynomial::new(Basis::Xy);
        p.add_term(vec![x(0), x(1)], big(1)).unwrap();
        assert!(to_uv(&p, &shape).is_err());
        let shape2 = GroupShape::weak(&[1, 1]).unwrap();
        let mut p2 = IntPolynomial::new(Basis::Xy);
        p2.add_term(vec![x(0), x(2)], big(1)).unwrap();
        let q = to_uv(&p2, &shape2).unwrap();
        let u = Var::U { group: 1, index: 1 };
        let v = Var::V { group: 1, index: 1 };
        assert_eq!(q.coefficient(&[v, v]), big(1));
        assert_eq!(q.coefficient(&[u, u]), big(-1));
    }

    #[test]
    fn symmetrize_filters() {
        let shape = GroupShape::weak(&[1, 1]).unwrap();
        let u = |g| Var::U { group: g, index: 1 };
        let v = |g| Var::V { group: g, index: 1 };
        let mut p = IntPolynomial::new(Basis::Uv);
        p.add_term(vec![u(1), u(2)], big(3)).unwrap();
        p.add_term(vec![u(1), v(2)], big(5)).unwrap();
        p.add_term(vec![v(1), v(2)], big(7)).unwrap();
        p.add_term(vec![u(1), u(1)], big(11)).unwrap();
        let q = symmetrize(&p, &shape).unwrap();
        let mut expect = IntPolynomial::new(Basis::Uv);
        expect.add_term(vec![u(1), u(2)], big(3)).unwrap();
        assert_eq!(q, expect);
    }

    #[test]
    fn basis_checks() {
        let mut p = IntPolynomial::new(Basis::Xy);
        assert!(p.add_term(vec![Var::U { group: 1, index: 1 }], big(1)).is_err());
        assert!(p.add_term(vec![x(0), x(0)], big(1)).is_err());
        let shape = GroupShape::weak(&[1]).unwrap();
        assert!(p.eval_uv(&UvAssignment::from_input(&shape, 0)).is_err());
        assert!(symmetrize(&p, &shape).is_err());
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut p = IntPolynomial::new(Basis::Xy);
        p.add_term(vec![x(1), x(0)], big(3)).unwrap();
        p.add_term(vec![x(2)], big(1)).unwrap();
        p.add_term(vec![x(0), x(1)], big(-3)).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.weight(), big(1));
    }

    #[test]
    fn json_round_trip() {
        let shape = GroupShape::strong(&[3, 3]).unwrap();
        let p = witness_gate(&shape).unwrap();
        assert_eq!(IntPolynomial::from_json(&p.to_json()).unwrap(), p);
        let q = to_uv(&p, &shape).unwrap();
        assert_eq!(IntPolynomial::from_json(&q.to_json()).unwrap(), q);
        assert_eq!(Var::parse("u3_0"), Some(Var::U { group: 3, index: 0 }));
        assert_eq!(Var::parse("w1"), None);
    }

    #[test]
    fn uv_assignment_ranges() {
        let weak = GroupShape::weak(&[2, 3]).unwrap();
        for t in 0..1 << weak.n() {
            let a = UvAssignment::from_input(&weak, t);
            for g in 1..=2 {
                for j in 1..=weak.ks()[g - 1] {
                    let u = a.get(Var::U { group: g, index: j }).unwrap();
                    let v = a.get(Var::V { group: g, index: j }).unwrap();
                    assert!((-1..=1).contains(&u) && (0..=2).contains(&v));
                    assert_eq!((u - v).rem_euclid(2), 0);
                }
            }
        }
        let strong = GroupShape::strong(&[5, 3]).unwrap();
        for t in 0..1 << strong.n() {
            let a = UvAssignment::from_input(&strong, t);
            for j in 0..5 {
                assert!([-2, 0, 2].contains(&a.u(1, j)));
            }
            assert_eq!(a.get(Var::V { group: 1, index: 0 }), None);
        }
    }

    fn shapes() -> Vec<GroupShape> {
        vec![
            GroupShape::weak(&[2, 3]).unwrap(),
            GroupShape::weak(&[1, 2, 2]).unwrap(),
            GroupShape::strong(&[3, 3]).unwrap(),
            GroupShape::strong(&[3, 2, 2]).unwrap(),
        ]
    }

    fn arb_poly(shape: GroupShape) -> impl Strategy<Value = (GroupShape, IntPolynomial)> {
        let n = shape.n();
        let d = shape.d();
        prop::collection::vec(
            (prop::collection::btree_set(0..n, 0..=d), -50i64..50),
            0..12,
        )
        .prop_map(move |terms| {
            let mut p = IntPolynomial::new(Basis::Xy);
            for (vars, c) in terms {
                p.add_term(vars.into_iter().map(Var::X).collect(), BigInt::from(c)).unwrap();
            }
            (shape.clone(), p)
        })
    }

    proptest! {
        #[test]
        fn uv_substitution_is_exact(
            (shape, p) in prop::sample::select(shapes()).prop_flat_map(arb_poly),
            seed in 0usize..1 << 16,
        ) {
            let q = to_uv(&p, &shape).unwrap();
            let t = seed % (1 << shape.n());
            let lhs = q.eval_uv(&UvAssignment::from_input(&shape, t)).unwrap();
            let rhs = p.eval_xy(&input_values(&shape, t)).unwrap() << shape.d();
            prop_assert_eq!(lhs, rhs);
            let factor = match shape.variant() {
                Variant::Weak => BigInt::one() << shape.d(),
                Variant::Strong => BigInt::from(shape.n().pow(shape.d() as u32)),
            };
            prop_assert!(q.weight() <= factor * p.weight());
            let s = symmetrize(&q, &shape).unwrap();
            prop_assert!(s.weight() <= q.weight());
            prop_assert!(s.degree() == 0 || s.degree() == shape.d());
        }
    }
}
