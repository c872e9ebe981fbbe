//! Group shapes `(k₁, …, k_d)` and the variable layout they induce.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which family a shape belongs to.
///
/// `Weak` splits `2Σkᵢ` zero/one variables into groups `x¹…x^d, y¹…y^d`
/// and compares them pairwise. `Strong` has `±1` groups `x¹…x^{d−1}` of
/// size `kᵢ` read through linear forms, followed by `x^d, y^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Weak,
    Strong,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Weak => "weak",
            Variant::Strong => "strong",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Variant::Weak),
            "strong" => Ok(Variant::Strong),
            _ => Err(Error::InvalidShape(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupShape {
    ks: Vec<usize>,
    variant: Variant,
}

impl GroupShape {
    pub fn new(variant: Variant, ks: Vec<usize>) -> Result<Self> {
        if ks.is_empty() {
            return Err(Error::InvalidShape("at least one group is required".into()));
        }
        let min = match variant {
            Variant::Weak => 1,
            Variant::Strong => 2,
        };
        if let Some(k) = ks.iter().find(|&&k| k < min) {
            return Err(Error::InvalidShape(format!(
                "{} shapes need every group size >= {min}, got {k}",
                variant.name()
            )));
        }
        Ok(GroupShape { ks, variant })
    }

    pub fn weak(ks: &[usize]) -> Result<Self> {
        Self::new(Variant::Weak, ks.to_vec())
    }

    pub fn strong(ks: &[usize]) -> Result<Self> {
        Self::new(Variant::Strong, ks.to_vec())
    }

    pub fn ks(&self) -> &[usize] {
        &self.ks
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn d(&self) -> usize {
        self.ks.len()
    }

    pub fn last_k(&self) -> usize {
        self.ks[self.d() - 1]
    }

    pub fn n(&self) -> usize {
        let sum: usize = self.ks.iter().sum();
        match self.variant {
            Variant::Weak => 2 * sum,
            Variant::Strong => sum + self.last_k(),
        }
    }

    /// `|K|`; every coordinate ranges over exactly `kᵢ` values.
    pub fn k_size(&self) -> usize {
        self.ks.iter().product()
    }

    /// Coordinate values for 1-based coordinate `l`, smallest label first.
    pub fn coord_range(&self, l: usize) -> std::ops::RangeInclusive<usize> {
        let k = self.ks[l - 1];
        if self.uses_l_forms(l) {
            0..=k - 1
        } else {
            1..=k
        }
    }

    /// Strong coordinates before the last index linear forms `L₀…L_{k−1}`.
    pub fn uses_l_forms(&self, l: usize) -> bool {
        self.variant == Variant::Strong && l < self.d()
    }

    /// Whether the lower-bound theorem for this family applies.
    pub fn satisfies_hypotheses(&self) -> bool {
        let (head, last) = self.ks.split_at(self.d() - 1);
        last[0] >= 3
            && match self.variant {
                Variant::Weak => head.iter().all(|&k| k >= 2 && k % 2 == 0),
                Variant::Strong => head.iter().all(|&k| k >= 3 && k % 2 == 1),
            }
    }

    fn offset(&self, group: usize) -> usize {
        self.ks[..group - 1].iter().sum()
    }

    /// Input position of `x^group_j` (both 1-based).
    pub fn x_pos(&self, group: usize, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.ks[group - 1]);
        self.offset(group) + j - 1
    }

    /// Input position of `y^group_j`. Strong shapes only have `y^d`.
    pub fn y_pos(&self, group: usize, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.ks[group - 1]);
        match self.variant {
            Variant::Weak => self.ks.iter().sum::<usize>() + self.offset(group) + j - 1,
            Variant::Strong => {
                assert_eq!(group, self.d(), "strong shapes only pair the last group");
                self.ks.iter().sum::<usize>() + j - 1
            }
        }
    }

    /// Inverse of the layout: position -> (is_y, group, j).
    pub fn role(&self, pos: usize) -> (bool, usize, usize) {
        let sum: usize = self.ks.iter().sum();
        let (is_y, mut rest) = if pos >= sum { (true, pos - sum) } else { (false, pos) };
        if is_y && self.variant == Variant::Strong {
            return (true, self.d(), rest + 1);
        }
        for (g, &k) in self.ks.iter().enumerate() {
            if rest < k {
                return (is_y, g + 1, rest + 1);
            }
            rest -= k;
        }
        panic!("position {pos} outside a shape with {} inputs", self.n())
    }

    pub fn label(&self) -> String {
        let ks: Vec<String> = self.ks.iter().map(|k| k.to_string()).collect();
        let mut s = format!("{}({})", self.variant.name(), ks.join(","));
        if !self.satisfies_hypotheses() {
            s.push_str(" [outside theorem hypotheses]");
        }
        s
    }

    /// `k1-k2-…`, used in file names and CSV keys.
    pub fn key(&self) -> String {
        let ks: Vec<String> = self.ks.iter().map(|k| k.to_string()).collect();
        format!("{}-{}", self.variant.name(), ks.join("-"))
    }
}

impl fmt::Display for GroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `"2,3"` into group sizes.
pub fn parse_ks(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidShape(format!("bad group size {t:?}")))
        })
        .collect()
}
