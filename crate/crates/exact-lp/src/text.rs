//! Plain-text LP format for debugging and replay.
//!
//! ```text
//! # comment
//! var c0 free
//! var c1 nonneg
//! minimize 1 c0 3/2 c1
//! st 1 c0 -1 c1 >= 1/2
//! ```
//!
//! Terms are `coefficient name` pairs; coefficients are exact rationals.

use std::collections::HashMap;
use std::fmt::Write;

use crate::problem::{Constraint, LpProblem, Relation, VarKind};
use crate::rational::{format, parse};
use crate::{LpError, Rational, Result};

pub fn write_problem(p: &LpProblem) -> String {
    let mut out = String::new();
    for (name, kind) in p.names().iter().zip(p.kinds()) {
        let k = match kind {
            VarKind::Free => "free",
            VarKind::NonNeg => "nonneg",
        };
        writeln!(out, "var {name} {k}").unwrap();
    }
    let terms = |row: &[(usize, Rational)]| {
        row.iter()
            .map(|(i, a)| format!("{} {}", format(a), p.names()[*i]))
            .collect::<Vec<_>>()
            .join(" ")
    };
    if let Some(obj) = p.objective() {
        writeln!(out, "minimize {}", terms(obj)).unwrap();
    }
    for c in p.constraints() {
        let lhs = terms(&c.coeffs);
        let sep = if lhs.is_empty() { "" } else { " " };
        writeln!(out, "st {lhs}{sep}{} {}", c.relation.symbol(), format(&c.rhs)).unwrap();
    }
    out
}

pub fn parse_problem(src: &str) -> Result<LpProblem> {
    let mut p = LpProblem::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (n, raw) in src.lines().enumerate() {
        let line_no = n + 1;
        let err = |msg: &str| LpError::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "var" => {
                let [name, kind] = rest[..] else {
                    return Err(err("expected `var <name> free|nonneg`"));
                };
                let kind = match kind {
                    "free" => VarKind::Free,
                    "nonneg" => VarKind::NonNeg,
                    _ => return Err(err("unknown variable kind")),
                };
                if index.contains_key(name) {
                    return Err(err("duplicate variable"));
                }
                index.insert(name.to_string(), p.add_var(name, kind));
            }
            "minimize" => {
                let row = parse_terms(&rest, &index).map_err(|m| err(&m))?;
                p.set_objective(row)?;
            }
            "st" => {
                if rest.len() < 2 {
                    return Err(err("constraint needs a relation and right-hand side"));
                }
                let (terms, tail) = rest.split_at(rest.len() - 2);
                let relation = match tail[0] {
                    "<=" => Relation::Le,
                    ">=" => Relation::Ge,
                    "=" => Relation::Eq,
                    _ => return Err(err("unknown relation")),
                };
                let rhs = parse(tail[1]).ok_or_else(|| err("bad right-hand side"))?;
                let row = parse_terms(terms, &index).map_err(|m| err(&m))?;
                p.add_constraint(Constraint::new(row, relation, rhs))?;
            }
            _ => return Err(err("unknown directive")),
        }
    }
    Ok(p)
}

fn parse_terms(
    tokens: &[&str],
    index: &HashMap<String, usize>,
) -> std::result::Result<Vec<(usize, Rational)>, String> {
    if tokens.len() % 2 != 0 {
        return Err("terms must be coefficient/name pairs".into());
    }
    tokens
        .chunks(2)
        .map(|pair| {
            let a = parse(pair[0]).ok_or_else(|| format!("bad coefficient {}", pair[0]))?;
            let i = *index
                .get(pair[1])
                .ok_or_else(|| format!("unknown variable {}", pair[1]))?;
            Ok((i, a))
        })
        .collect()
}
