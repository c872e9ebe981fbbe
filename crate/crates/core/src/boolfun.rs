//! Truth tables for the comparison functions, the `g` building blocks and
//! the composite hard functions.
//!
//! Input `t` assigns bit `i` of `t` to variable `i` (least significant
//! variable first). Under `PlusMinus`, bit 1 reads as `+1` and bit 0 as
//! `−1`, for inputs and outputs alike.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::shape::{GroupShape, Variant};
use crate::tuple_order::{Order, OrderContext};
use crate::{Error, Result};

/// Largest input count accepted when building a table.
pub const MAX_INPUTS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    ZeroOne,
    PlusMinus,
}

impl Convention {
    /// Value of an input or output bit.
    pub fn value(self, bit: bool) -> i64 {
        match (self, bit) {
            (_, true) => 1,
            (Convention::ZeroOne, false) => 0,
            (Convention::PlusMinus, false) => -1,
        }
    }

    pub fn bit(self, value: i64) -> Option<bool> {
        match (self, value) {
            (_, 1) => Some(true),
            (Convention::ZeroOne, 0) | (Convention::PlusMinus, -1) => Some(false),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsbSide {
    /// `x_k` most significant (GT₁).
    Last,
    /// `x₁` most significant (GT₀).
    First,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GVariant {
    G1,
    G0,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolFun {
    n: usize,
    convention: Convention,
    table: Vec<u64>,
    label: String,
}

fn words(n: usize) -> usize {
    ((1usize << n) + 63) / 64
}

impl BoolFun {
    /// Builds a table by evaluating `f` on every input index.
    pub fn from_fn(
        n: usize,
        convention: Convention,
        label: impl Into<String>,
        f: impl Fn(usize) -> bool + Sync,
    ) -> Result<Self> {
        if n > MAX_INPUTS {
            return Err(Error::Cap(format!("{n} inputs exceeds {MAX_INPUTS}")));
        }
        let size = 1usize << n;
        let table: Vec<u64> = (0..words(n))
            .into_par_iter()
            .map(|w| {
                let mut word = 0u64;
                for b in 0..64 {
                    let t = w * 64 + b;
                    if t < size && f(t) {
                        word |= 1 << b;
                    }
                }
                word
            })
            .collect();
        Ok(BoolFun {
            n,
            convention,
            table,
            label: label.into(),
        })
    }

    pub fn from_bits(n: usize, convention: Convention, label: impl Into<String>, bits: &[bool]) -> Result<Self> {
        if bits.len() != 1usize << n.min(MAX_INPUTS) || n > MAX_INPUTS {
            return Err(Error::Input(format!("table of length {} for {n} inputs", bits.len())));
        }
        Self::from_fn(n, convention, label, |t| bits[t])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn table_len(&self) -> usize {
        1 << self.n
    }

    /// Output bit at input index `t`.
    pub fn bit(&self, t: usize) -> bool {
        self.table[t / 64] >> (t % 64) & 1 == 1
    }

    /// Output value at input index `t` under the function's convention.
    pub fn value_at(&self, t: usize) -> i64 {
        self.convention.value(self.bit(t))
    }

    /// Value of variable `i` in input `t`.
    pub fn input_value(&self, t: usize, i: usize) -> i64 {
        self.convention.value(t >> i & 1 == 1)
    }

    /// Input index of an assignment given as values in the convention.
    pub fn index_of(&self, assignment: &[i64]) -> Result<usize> {
        if assignment.len() != self.n {
            return Err(Error::Input(format!(
                "assignment has {} values, expected {}",
                assignment.len(),
                self.n
            )));
        }
        assignment.iter().enumerate().try_fold(0usize, |acc, (i, &v)| {
            match self.convention.bit(v) {
                Some(b) => Ok(acc | usize::from(b) << i),
                None => Err(Error::Input(format!("value {v} outside the {:?} alphabet", self.convention))),
            }
        })
    }

    pub fn eval(&self, assignment: &[i64]) -> Result<i64> {
        Ok(self.value_at(self.index_of(assignment)?))
    }

    pub fn ones(&self) -> usize {
        self.table.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_constant(&self) -> Option<bool> {
        match self.ones() {
            0 => Some(false),
            c if c == self.table_len() => Some(true),
            _ => None,
        }
    }

    /// Little-endian packed table in hexadecimal: byte `i` holds outputs
    /// `8i..8i+7`, lowest input in the lowest bit.
    pub fn table_hex(&self) -> String {
        let bytes = (self.table_len() + 7) / 8;
        let mut s = String::with_capacity(2 * bytes);
        for i in 0..bytes {
            let byte = (self.table[i / 8] >> (8 * (i % 8))) & 0xff;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BoolFunJson {
            n: self.n,
            convention: self.convention,
            label: self.label.clone(),
            table_hex: self.table_hex(),
        })
        .expect("plain record")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rec: BoolFunJson = serde_json::from_value(v.clone())?;
        if rec.n > MAX_INPUTS {
            return Err(Error::Cap(format!("{} inputs exceeds {MAX_INPUTS}", rec.n)));
        }
        let size = 1usize << rec.n;
        let bytes = (size + 7) / 8;
        if rec.table_hex.len() != 2 * bytes {
            return Err(Error::Input(format!(
                "table_hex has {} digits, expected {}",
                rec.table_hex.len(),
                2 * bytes
            )));
        }
        let mut table = vec![0u64; words(rec.n)];
        for i in 0..bytes {
            let byte = u64::from_str_radix(&rec.table_hex[2 * i..2 * i + 2], 16)
                .map_err(|_| Error::Input("table_hex is not hexadecimal".into()))?;
            table[i / 8] |= byte << (8 * (i % 8));
        }
        if size < 64 && table[0] >> size != 0 {
            return Err(Error::Input("table_hex sets bits beyond 2^n".into()));
        }
        Ok(BoolFun {
            n: rec.n,
            convention: rec.convention,
            table,
            label: rec.label,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct BoolFunJson {
    n: usize,
    convention: Convention,
    label: String,
    table_hex: String,
}

impl Serialize for BoolFun {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoolFunJson {
            n: self.n,
            convention: self.convention,
            label: self.label.clone(),
            table_hex: self.table_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoolFun {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        BoolFun::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// `x ≥ y` on two `k`-bit integers; variables `x₁…x_k, y₁…y_k`.
pub fn make_gt(k: usize, msb: MsbSide) -> Result<BoolFun> {
    if k == 0 {
        return Err(Error::InvalidShape("comparison needs k >= 1".into()));
    }
    if 2 * k > MAX_INPUTS {
        return Err(Error::Cap(format!("{} inputs exceeds {MAX_INPUTS}", 2 * k)));
    }
    let mask = (1usize << k) - 1;
    let reverse = |v: usize| (0..k).fold(0, |acc, i| acc | (v >> i & 1) << (k - 1 - i));
    let label = match msb {
        MsbSide::Last => format!("gt1(k={k})"),
        MsbSide::First => format!("gt0(k={k})"),
    };
    BoolFun::from_fn(2 * k, Convention::ZeroOne, label, |t| {
        let (x, y) = (t & mask, t >> k);
        match msb {
            MsbSide::Last => x >= y,
            MsbSide::First => reverse(x) >= reverse(y),
        }
    })
}

/// The `±1` building blocks on `k ≥ 2` variables.
pub fn make_g(k: usize, variant: GVariant) -> Result<BoolFun> {
    if k < 2 {
        return Err(Error::InvalidShape("g needs k >= 2".into()));
    }
    if k > MAX_INPUTS {
        return Err(Error::Cap(format!("{k} inputs exceeds {MAX_INPUTS}")));
    }
    let all = (1usize << k) - 1;
    let label = match variant {
        GVariant::G1 => format!("g1(k={k})"),
        GVariant::G0 => format!("g0(k={k})"),
    };
    BoolFun::from_fn(k, Convention::PlusMinus, label, move |t| {
        let equal = t == 0 || t == all;
        match variant {
            // −x_k when mixed, x_k when constant
            GVariant::G1 => (t >> (k - 1) & 1 == 1) == equal,
            // x₁ when mixed, −x₁ when constant
            GVariant::G0 => (t & 1 == 1) != equal,
        }
    })
}

/// Signs along the enumeration in decreasing order, with the data needed
/// to evaluate each product quickly.
struct Scan {
    /// Per tuple: per coordinate (input offset of the group, value), and
    /// the fixed sign `(−1)^{c₁+…+c_{d−1}}`.
    tuples: Vec<(Vec<usize>, bool)>,
}

fn scan_plan(shape: &GroupShape) -> Result<Scan> {
    let ctx = OrderContext::new(shape);
    let mut order = ctx.enumerate_ordered()?;
    order.reverse();
    let d = shape.d();
    let tuples = order
        .into_iter()
        .map(|a| {
            let orders = ctx.orders_unchecked(a.coords());
            let negated = (1..d)
                .filter(|&l| shape.uses_l_forms(l) && a.get(l) == 0 && orders[l - 1] == Order::Zero)
                .count()
                % 2
                == 1;
            (a.coords().to_vec(), negated)
        })
        .collect();
    Ok(Scan { tuples })
}

/// Sign of the linear form `L_j` on the `±1` group starting at `offset`.
fn l_form(t: usize, offset: usize, k: usize, j: usize) -> i8 {
    let x = |i: usize| if t >> (offset + i - 1) & 1 == 1 { 1i8 } else { -1 };
    let v = if j == 0 { x(1) + x(k) } else { x(j) - x(j + 1) };
    v.signum()
}

/// The composite hard function of `shape`, by direct scan of `K` from the
/// top for the first nonzero product.
pub fn make_hard(shape: &GroupShape) -> Result<BoolFun> {
    let n = shape.n();
    if n > MAX_INPUTS {
        return Err(Error::Cap(format!("{n} inputs exceeds {MAX_INPUTS}")));
    }
    let plan = scan_plan(shape)?;
    let d = shape.d();
    let x_off: Vec<usize> = (1..=d).map(|g| shape.x_pos(g, 1)).collect();
    let y_off: Vec<usize> = match shape.variant() {
        Variant::Weak => (1..=d).map(|g| shape.y_pos(g, 1)).collect(),
        Variant::Strong => vec![shape.y_pos(d, 1); d],
    };
    let ks = shape.ks().to_vec();
    let convention = match shape.variant() {
        Variant::Weak => Convention::ZeroOne,
        Variant::Strong => Convention::PlusMinus,
    };
    let strong = shape.variant() == Variant::Strong;
    let label = format!("hard {}", shape.label());
    BoolFun::from_fn(n, convention, label, |t| {
        let bit = |p: usize| (t >> p & 1) as i8;
        for (alpha, negated) in &plan.tuples {
            let mut sign = if *negated { -1i8 } else { 1 };
            for (l, &a) in alpha.iter().enumerate() {
                let s = if strong && l + 1 < d {
                    l_form(t, x_off[l], ks[l], a)
                } else {
                    bit(x_off[l] + a - 1) - bit(y_off[l] + a - 1)
                };
                sign *= s;
                if sign == 0 {
                    break;
                }
            }
            if sign != 0 {
                return sign > 0;
            }
        }
        true
    })
}
