//! Experiment specifications and the built-in presets.

use ptf_core::threshold_analysis::CoefficientLemma;
use ptf_core::{GroupShape, Variant};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    VerifyGate,
    Signdeg,
    MinweightLp,
    MinweightExact,
    /// The chain inequality on symmetrized gates of the shape.
    Lemmas,
    Theorem,
    /// Bound exponent only; no solving.
    Bound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Largest input count attempted.
    pub n_cap: usize,
    /// Largest monomial count of a weight or degree system.
    pub column_cap: usize,
    /// Branch-and-bound node budget.
    pub nodes: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            n_cap: 16,
            column_cap: 2048,
            nodes: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaJob {
    pub lemma: CoefficientLemma,
    pub ks: Vec<usize>,
}

/// Comparison of `(k − 1)^{n/k}` over `k` for a fixed `n` divisible by
/// every `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentTable {
    pub n: usize,
    pub ks: Vec<usize>,
    /// The `k` expected to give the largest value.
    pub expect_max: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub variant: Variant,
    #[serde(default)]
    pub shapes: Vec<Vec<usize>>,
    #[serde(default)]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub lemmas: Vec<LemmaJob>,
    #[serde(default)]
    pub exponent_table: Option<ExponentTable>,
    #[serde(default)]
    pub budgets: Budgets,
}

impl ExperimentSpec {
    pub fn new(name: &str, variant: Variant) -> Self {
        ExperimentSpec {
            name: name.into(),
            variant,
            shapes: Vec::new(),
            modes: Vec::new(),
            lemmas: Vec::new(),
            exponent_table: None,
            budgets: Budgets::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.budgets;
        if b.n_cap == 0 || b.column_cap == 0 || b.nodes == 0 {
            return Err(Error::Spec("budgets must be positive".into()));
        }
        for ks in &self.shapes {
            GroupShape::new(self.variant, ks.clone())?;
        }
        if let Some(t) = &self.exponent_table {
            if t.ks.iter().any(|&k| k < 2 || t.n % k != 0) || !t.ks.contains(&t.expect_max) {
                return Err(Error::Spec("exponent table needs k >= 2 dividing n".into()));
            }
        }
        Ok(())
    }

    pub fn shapes(&self) -> Result<Vec<GroupShape>> {
        self.shapes
            .iter()
            .map(|ks| Ok(GroupShape::new(self.variant, ks.clone())?))
            .collect()
    }
}

pub const PRESETS: [&str; 6] = ["weak-2-3", "strong-3-3", "gt-lemmas-k6", "g-lemmas", "k5-optimal", "weak-small"];

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    use CoefficientLemma::*;
    let mut s;
    match name {
        "weak-2-3" => {
            s = ExperimentSpec::new(name, Variant::Weak);
            s.shapes = vec![vec![2, 3]];
            s.modes = vec![
                Mode::VerifyGate,
                Mode::Signdeg,
                Mode::MinweightLp,
                Mode::MinweightExact,
                Mode::Lemmas,
                Mode::Theorem,
            ];
        }
        "strong-3-3" => {
            s = ExperimentSpec::new(name, Variant::Strong);
            s.shapes = vec![vec![3, 3]];
            s.modes = vec![Mode::VerifyGate, Mode::Signdeg];
        }
        "gt-lemmas-k6" => {
            s = ExperimentSpec::new(name, Variant::Weak);
            s.lemmas = [GtExp, GtStep, Gt0Exp, Gt0Step]
                .map(|lemma| LemmaJob { lemma, ks: (2..=6).collect() })
                .to_vec();
        }
        "g-lemmas" => {
            s = ExperimentSpec::new(name, Variant::Strong);
            s.lemmas = [G1Pos, G1Mono, G0All]
                .map(|lemma| LemmaJob { lemma, ks: vec![3, 4, 5, 6, 7] })
                .to_vec();
        }
        "k5-optimal" => {
            s = ExperimentSpec::new(name, Variant::Strong);
            s.shapes = vec![vec![3, 3, 3], vec![5, 3], vec![5, 5, 3], vec![7, 3]];
            s.modes = vec![Mode::Bound];
            s.exponent_table = Some(ExponentTable {
                n: 420,
                ks: vec![2, 3, 4, 5, 6, 7],
                expect_max: 5,
            });
        }
        "weak-small" => {
            s = ExperimentSpec::new(name, Variant::Weak);
            s.shapes = vec![vec![2, 3], vec![2, 2, 3], vec![4, 3], vec![3, 3], vec![2, 2, 2]];
            s.modes = vec![Mode::VerifyGate, Mode::Bound];
        }
        _ => {
            return Err(Error::Spec(format!(
                "unknown preset {name:?}; known: {}",
                PRESETS.join(", ")
            )))
        }
    }
    s.validate()?;
    Ok(s)
}
