//! Configurations of new k-systems and the counts that select them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::pointset::PointSet;

/// The thirteen shapes the new k-systems of one iteration can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConfigTag {
    #[serde(rename = "1a")]
    C1a,
    #[serde(rename = "1b")]
    C1b,
    #[serde(rename = "1c")]
    C1c,
    #[serde(rename = "1d")]
    C1d,
    #[serde(rename = "2a")]
    C2a,
    #[serde(rename = "2b")]
    C2b,
    #[serde(rename = "3a")]
    C3a,
    #[serde(rename = "3b")]
    C3b,
    #[serde(rename = "3c")]
    C3c,
    #[serde(rename = "3d")]
    C3d,
    #[serde(rename = "4a")]
    C4a,
    #[serde(rename = "4b")]
    C4b,
    #[serde(rename = "4c")]
    C4c,
}

impl ConfigTag {
    pub const ALL: [ConfigTag; 13] = [
        ConfigTag::C1a,
        ConfigTag::C1b,
        ConfigTag::C1c,
        ConfigTag::C1d,
        ConfigTag::C2a,
        ConfigTag::C2b,
        ConfigTag::C3a,
        ConfigTag::C3b,
        ConfigTag::C3c,
        ConfigTag::C3d,
        ConfigTag::C4a,
        ConfigTag::C4b,
        ConfigTag::C4c,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConfigTag::C1a => "1a",
            ConfigTag::C1b => "1b",
            ConfigTag::C1c => "1c",
            ConfigTag::C1d => "1d",
            ConfigTag::C2a => "2a",
            ConfigTag::C2b => "2b",
            ConfigTag::C3a => "3a",
            ConfigTag::C3b => "3b",
            ConfigTag::C3c => "3c",
            ConfigTag::C3d => "3d",
            ConfigTag::C4a => "4a",
            ConfigTag::C4b => "4b",
            ConfigTag::C4c => "4c",
        }
    }

    /// The counting case a configuration of this type produces.
    pub fn case(self) -> Case {
        match self {
            ConfigTag::C1a | ConfigTag::C1b | ConfigTag::C1c | ConfigTag::C1d => Case::One,
            ConfigTag::C2a | ConfigTag::C2b => Case::Two,
            ConfigTag::C3a | ConfigTag::C3b | ConfigTag::C3c | ConfigTag::C3d => Case::Three,
            ConfigTag::C4a | ConfigTag::C4b | ConfigTag::C4c => Case::Four,
        }
    }

    /// Classify new systems by how many of each kind there are and by how
    /// many new points are left outside them.
    pub fn classify(upper: usize, paired: usize, lower: usize, rest: usize) -> ConfigTag {
        match (upper > 0, paired > 0, lower > 0) {
            (false, false, false) => ConfigTag::C1c,
            (true, false, false) if rest == 0 => ConfigTag::C1a,
            (true, false, false) => ConfigTag::C3a,
            (false, true, false) => ConfigTag::C1b,
            (false, false, true) if rest == 0 => ConfigTag::C1d,
            (false, false, true) => ConfigTag::C3d,
            (true, false, true) => match (rest == 0, lower == 1) {
                (true, true) => ConfigTag::C2a,
                (true, false) => ConfigTag::C2b,
                (false, true) => ConfigTag::C4a,
                (false, false) => ConfigTag::C4b,
            },
            (true, true, false) => ConfigTag::C3b,
            (false, true, true) => ConfigTag::C3c,
            (true, true, true) => ConfigTag::C4c,
        }
    }
}

impl fmt::Display for ConfigTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfigTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConfigTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown configuration {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    One,
    Two,
    Three,
    Four,
}

/// Number of new open k-sets per new quotient space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseCounts {
    pub k: usize,
    pub s: usize,
    pub mu1: usize,
    pub mu2: usize,
    pub mu3: usize,
    pub case: Case,
    /// `(input index, new open k-sets)` for every new space.
    pub per_space: Vec<(usize, usize)>,
}

impl CaseCounts {
    pub(crate) fn from_counts(k: usize, per_space: Vec<(usize, usize)>) -> crate::Result<Self> {
        let min = per_space.iter().map(|&(_, c)| c).min().unwrap_or(0);
        let max = per_space.iter().map(|&(_, c)| c).max().unwrap_or(0);
        if max > min + 2 {
            return Err(crate::Error::InconsistentCounts { k, min, max });
        }
        let mu = |d: usize| per_space.iter().filter(|&&(_, c)| c == min + d).count();
        let (mu1, mu2, mu3) = (mu(0), mu(1), mu(2));
        let case = match (mu2 > 0, mu3 > 0) {
            (false, false) => Case::One,
            (false, true) => Case::Two,
            (true, false) => Case::Three,
            (true, true) => Case::Four,
        };
        Ok(CaseCounts {
            k,
            s: min,
            mu1,
            mu2,
            mu3,
            case,
            per_space,
        })
    }

    /// Sorted list of the counts alone.
    pub fn multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.per_space.iter().map(|&(_, c)| c).collect();
        v.sort_unstable();
        v
    }
}

/// One new k-system: old part `a` and fresh points `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SystemBlock {
    pub a: PointSet,
    pub r: PointSet,
}

/// Where the covering set `n*` of the top point is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NPlacement {
    /// Settled at an earlier iteration.
    Earlier,
    /// Still open after this iteration.
    Unsettled,
    /// `n* = D ∪ {n}` for a set `D` of old points (the one old lower system
    /// that is not a union of smaller ones).
    OldLower(PointSet),
    /// `n* = A R ∪ {n}`, pairing with the given upper system.
    PairedWith(SystemBlock),
    /// `n` is equivalent to the new points of the given lower system.
    JoinsLower(SystemBlock),
}

/// The new k-systems of one iteration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Configuration {
    pub k: usize,
    pub tag: ConfigTag,
    pub upper_systems: Vec<SystemBlock>,
    pub paired_systems: Vec<SystemBlock>,
    pub lower_systems: Vec<SystemBlock>,
    pub n_placement: NPlacement,
    /// New points not covered by this iteration's systems.
    pub rest: usize,
}

impl Configuration {
    pub fn new_points(&self) -> PointSet {
        self.upper_systems
            .iter()
            .chain(&self.paired_systems)
            .chain(&self.lower_systems)
            .fold(PointSet::EMPTY, |acc, b| acc | b.r)
    }

    /// Predicted new open k-set count of every new space, sorted.
    pub fn predicted_counts(&self) -> Vec<usize> {
        let u = self.upper_systems.len() + self.paired_systems.len();
        let mut v = Vec::new();
        for b in &self.upper_systems {
            v.extend(std::iter::repeat_n(u - 1, b.r.len()));
        }
        for b in &self.paired_systems {
            v.extend(std::iter::repeat_n(u, b.r.len()));
        }
        for b in &self.lower_systems {
            v.extend(std::iter::repeat_n(u + 1, b.r.len()));
        }
        v.extend(std::iter::repeat_n(u, self.rest));
        v.sort_unstable();
        v
    }
}

/// Quantities the selection rules read off the quotient spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscriminationReport {
    pub k: usize,
    /// New points in each space with `s + 1` new open k-sets.
    pub p: Vec<usize>,
    /// New points in each space with `s` new open k-sets.
    pub p_prime: Vec<usize>,
    /// New points shown by the spaces with `s + 2` new open k-sets (union
    /// over those spaces of their count).
    pub q: usize,
    /// `q - mu3`.
    pub mu: usize,
    /// `C(s, 2)`.
    pub expected_doublets: usize,
}
