//! Structural facts every finite space satisfies with respect to its
//! distinguished top point `n`, checked literally on a labeled space.

use std::fmt;

use serde::Serialize;

use crate::clans::check_observations;
use crate::pointset::PointSet;
use crate::space::FiniteSpace;
use crate::trace::{old_points, trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Property {
    UnionOfSmaller,
    NewSetCounts,
    UpperOldPart,
    LowerPairOldParts,
    LowerOldPart,
    PairedOldParts,
    UnderPaired,
    Observations,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::UnionOfSmaller,
        Property::NewSetCounts,
        Property::UpperOldPart,
        Property::LowerPairOldParts,
        Property::LowerOldPart,
        Property::PairedOldParts,
        Property::UnderPaired,
        Property::Observations,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::UnionOfSmaller => "union of smaller systems",
            Property::NewSetCounts => "new set counts",
            Property::UpperOldPart => "upper old part",
            Property::LowerPairOldParts => "lower pair old parts",
            Property::LowerOldPart => "lower old part",
            Property::PairedOldParts => "paired old parts",
            Property::UnderPaired => "under paired",
            Property::Observations => "observations",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: Property,
    pub k: usize,
    pub detail: String,
}

/// A new k-system split into its old part `A` and new part `R`.
#[derive(Debug, Clone, Copy)]
struct NewSystem {
    set: PointSet,
    a: PointSet,
    r: PointSet,
}

fn new_systems(space: &FiniteSpace, k: usize) -> Vec<NewSystem> {
    let n = space.n();
    let old = old_points(space, k);
    space
        .opens()
        .iter()
        .filter(|o| o.without(n).len() == k)
        .map(|&set| {
            let body = set.without(n);
            NewSystem {
                set,
                a: body & old,
                r: body - old,
            }
        })
        .filter(|s| !s.r.is_empty())
        .collect()
}

fn paired(space: &FiniteSpace, set: PointSet) -> bool {
    let n = space.n();
    space.is_open(set.without(n)) && space.is_open(set.with(n))
}

pub fn union_of_smaller(space: &FiniteSpace) -> Vec<Violation> {
    let n = space.n();
    let n_star = space.cover(n);
    let mut out = Vec::new();
    for k in 1..n {
        let old = old_points(space, k);
        for &p in space.opens().iter().filter(|o| o.without(n).len() == k) {
            if !p.without(n).is_subset(old) || p == n_star {
                continue;
            }
            let union = space
                .opens()
                .iter()
                .filter(|q| q.is_subset(p) && q.without(n).len() < k)
                .fold(PointSet::EMPTY, |acc, &q| acc | q);
            if union != p {
                out.push(Violation {
                    property: Property::UnionOfSmaller,
                    k,
                    detail: format!("{p:?} is not a union of smaller systems"),
                });
            }
        }
    }
    out
}

pub fn new_set_counts(space: &FiniteSpace) -> Vec<Violation> {
    let mut out = Vec::new();
    for step in trace(space) {
        let counts: Vec<usize> = step.new_counts.iter().map(|&(_, c)| c).collect();
        if let (Some(lo), Some(hi)) = (counts.iter().min(), counts.iter().max()) {
            if hi - lo > 2 {
                out.push(Violation {
                    property: Property::NewSetCounts,
                    k: step.k,
                    detail: format!("new counts {counts:?} spread by more than 2"),
                });
            }
        }
        for &(i, c) in &step.new_counts {
            if c != step.predicted_count(i) {
                out.push(Violation {
                    property: Property::NewSetCounts,
                    k: step.k,
                    detail: format!("Q^{i} has {c} new sets, expected {}", step.predicted_count(i)),
                });
            }
        }
    }
    out
}

pub fn upper_old_part(space: &FiniteSpace) -> Vec<Violation> {
    let n = space.n();
    let mut out = Vec::new();
    for k in 1..n {
        for s in new_systems(space, k) {
            if !s.set.contains(n) && !space.is_open(s.a) {
                out.push(Violation {
                    property: Property::UpperOldPart,
                    k,
                    detail: format!("{:?} is upper but {:?} is not open", s.set, s.a),
                });
            }
        }
    }
    out
}

pub fn lower_pair_old_parts(space: &FiniteSpace) -> Vec<Violation> {
    let n = space.n();
    let mut out = Vec::new();
    for k in 1..n {
        let lower: Vec<NewSystem> = new_systems(space, k)
            .into_iter()
            .filter(|s| s.set.contains(n))
            .collect();
        for (i, x) in lower.iter().enumerate() {
            for y in &lower[i + 1..] {
                for a in [x.a, y.a] {
                    if !space.is_open(a.with(n)) {
                        out.push(Violation {
                            property: Property::LowerPairOldParts,
                            k,
                            detail: format!("{:?} and {:?} are lower but {:?} is not open", x.set, y.set, a.with(n)),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn lower_old_part(space: &FiniteSpace) -> Vec<Violation> {
    let n = space.n();
    let mut out = Vec::new();
    for k in 1..n {
        for s in new_systems(space, k) {
            if s.set.contains(n) && !space.is_open(s.a) && !space.is_open(s.a.with(n)) {
                out.push(Violation {
                    property: Property::LowerOldPart,
                    k,
                    detail: format!("neither {:?} nor {:?} is open", s.a, s.a.with(n)),
                });
            }
        }
    }
    out
}

pub fn paired_old_parts(space: &FiniteSpace) -> Vec<Violation> {
    let n = space.n();
    let mut out = Vec::new();
    for k in 1..n {
        let pairs: Vec<NewSystem> = new_systems(space, k)
            .into_iter()
            .filter(|s| !s.set.contains(n) && paired(space, s.set))
            .collect();
        for (i, x) in pairs.iter().enumerate() {
            for y in &pairs[i + 1..] {
                if x.r == y.r {
                    continue;
                }
                for a in [x.a, x.a.with(n), y.a, y.a.with(n)] {
                    if !space.is_open(a) {
                        out.push(Violation {
                            property: Property::PairedOldParts,
                            k,
                            detail: format!("{:?} and {:?} are paired but {a:?} is not open", x.set, y.set),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn under_paired(space: &FiniteSpace) -> Vec<Violation> {
    let n = space.n();
    let mut out = Vec::new();
    let uppers: Vec<PointSet> = space
        .opens()
        .iter()
        .copied()
        .filter(|&x| !x.contains(n) && space.is_open(x.with(n)))
        .collect();
    for &yn in space.opens().iter().filter(|o| o.contains(n)) {
        let y = yn.without(n);
        if uppers.iter().any(|&x| y.is_proper_subset(x)) && !space.is_open(y) {
            out.push(Violation {
                property: Property::UnderPaired,
                k: y.len(),
                detail: format!("{yn:?} lies under a paired system but {y:?} is not open"),
            });
        }
    }
    out
}

pub fn observations(space: &FiniteSpace) -> Vec<Violation> {
    let report = check_observations(space);
    if report.all_pass() {
        return Vec::new();
    }
    vec![Violation {
        property: Property::Observations,
        k: 0,
        detail: format!("{report:?}"),
    }]
}

pub fn check(space: &FiniteSpace, property: Property) -> Vec<Violation> {
    if space.n() < 2 {
        return Vec::new();
    }
    match property {
        Property::UnionOfSmaller => union_of_smaller(space),
        Property::NewSetCounts => new_set_counts(space),
        Property::UpperOldPart => upper_old_part(space),
        Property::LowerPairOldParts => lower_pair_old_parts(space),
        Property::LowerOldPart => lower_old_part(space),
        Property::PairedOldParts => paired_old_parts(space),
        Property::UnderPaired => under_paired(space),
        Property::Observations => observations(space),
    }
}

pub fn check_all(space: &FiniteSpace) -> Vec<Violation> {
    Property::ALL
        .iter()
        .flat_map(|&p| check(space, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    #[test]
    fn top_cover_is_exempt() {
        // 1* = {1}, 2* = {2}, n* = {1,2,n}.
        let t = FiniteSpace::generated_by(3, [ps(&[1]), ps(&[2]), ps(&[1, 2, 3])]).unwrap();
        assert!(union_of_smaller(&t).is_empty());
    }

    #[test]
    fn examples_hold() {
        let spaces = [
            FiniteSpace::new(4, [ps(&[1]), ps(&[2]), ps(&[1, 2]), ps(&[1, 2, 3])]).unwrap(),
            FiniteSpace::generated_by(5, [ps(&[1, 2, 5]), ps(&[1, 2, 3, 5])]).unwrap(),
            FiniteSpace::generated_by(7, [ps(&[1, 2]), ps(&[1, 2, 7]), ps(&[3, 4]), ps(&[3, 4, 7]), ps(&[7])])
                .unwrap(),
            FiniteSpace::discrete(4),
            FiniteSpace::indiscrete(4),
        ];
        for t in &spaces {
            assert_eq!(check_all(t), Vec::new(), "{t:?}");
        }
    }

    #[test]
    fn every_small_space_passes() {
        use crate::oracle::{enumerate_topologies, EnumerationMode};
        for n in 1..=4 {
            for t in enumerate_topologies(n, EnumerationMode::Labeled).unwrap() {
                assert_eq!(check_all(&t), Vec::new(), "{t:?}");
            }
        }
    }
}
