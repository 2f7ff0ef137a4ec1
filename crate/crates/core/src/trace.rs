//! The iterations a labeled space goes through when it is rebuilt from its
//! quotients: which points age at each `k`, the shape of the new systems and
//! the new open k-set count seen in each new quotient space.

use serde::Serialize;

use crate::pointset::PointSet;
use crate::quotient::identify;
use crate::reconstruct::{ConfigTag, SystemBlock};
use crate::space::FiniteSpace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub k: usize,
    pub tag: ConfigTag,
    pub upper: Vec<SystemBlock>,
    pub paired: Vec<SystemBlock>,
    pub lower: Vec<SystemBlock>,
    /// Points whose covering set has more than `k` points other than `n`.
    pub rest: usize,
    /// `(i, new open k-sets of Q^i)` for every point `i` not yet old.
    pub new_counts: Vec<(usize, usize)>,
}

/// `|p* - {n}|`.
pub fn level(space: &FiniteSpace, p: usize) -> usize {
    space.cover(p).without(space.n()).len()
}

/// Points other than `n` whose level is below `k`.
pub fn old_points(space: &FiniteSpace, k: usize) -> PointSet {
    (1..space.n())
        .filter(|&p| level(space, p) < k)
        .collect()
}

pub fn trace(space: &FiniteSpace) -> Vec<TraceStep> {
    let n = space.n();
    let mut steps = Vec::new();
    for k in 1..n {
        let old = old_points(space, k);
        let mut covers: Vec<PointSet> = (1..n)
            .filter(|&p| level(space, p) == k)
            .map(|p| space.cover(p))
            .collect();
        covers.sort();
        covers.dedup();
        let (mut upper, mut paired, mut lower) = (Vec::new(), Vec::new(), Vec::new());
        for c in covers {
            let body = c.without(n);
            let block = SystemBlock {
                a: body & old,
                r: body - old,
            };
            if c.contains(n) {
                lower.push(block);
            } else if space.is_open(c.with(n)) {
                paired.push(block);
            } else {
                upper.push(block);
            }
        }
        let rest = (1..n).filter(|&p| level(space, p) > k).count();
        // T shows up in every quotient, so it counts as paired for the tag.
        let whole = lower.iter().filter(|b| (b.a | b.r).len() == n - 1).count();
        let old_upper = space
            .opens()
            .iter()
            .filter(|u| u.len() == k && !u.contains(n) && u.is_subset(old))
            .count();
        let new_counts = (1..n)
            .filter(|&i| !old.contains(i))
            .map(|i| {
                let q = identify(space, i).expect("1 <= i < n").space;
                (i, q.open_sets_of_size(k).len() - old_upper)
            })
            .collect();
        steps.push(TraceStep {
            k,
            tag: ConfigTag::classify(upper.len(), paired.len() + whole, lower.len() - whole, rest),
            upper,
            paired,
            lower,
            rest,
            new_counts,
        });
    }
    steps
}

impl TraceStep {
    /// The count each new space should show given the systems' kinds.
    pub fn predicted_count(&self, i: usize) -> usize {
        let u = self.upper.len() + self.paired.len();
        if self.upper.iter().any(|b| b.r.contains(i)) {
            u - 1
        } else if self.lower.iter().any(|b| b.r.contains(i)) {
            u + 1
        } else {
            u
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    #[test]
    fn four_point_trace() {
        let t = FiniteSpace::new(4, [ps(&[1]), ps(&[2]), ps(&[1, 2]), ps(&[1, 2, 3])]).unwrap();
        let steps = trace(&t);
        let tags: Vec<ConfigTag> = steps.iter().map(|s| s.tag).collect();
        assert_eq!(tags, vec![ConfigTag::C3a, ConfigTag::C1c, ConfigTag::C1b]);
        let mut counts: Vec<usize> = steps[0].new_counts.iter().map(|&(_, c)| c).collect();
        counts.sort();
        assert_eq!(counts, vec![1, 1, 2]);
    }

    #[test]
    fn seven_point_traces() {
        let t1 = FiniteSpace::generated_by(7, [ps(&[1, 2]), ps(&[3, 4]), ps(&[5, 6])]).unwrap();
        let tags: Vec<ConfigTag> = trace(&t1).iter().take(2).map(|s| s.tag).collect();
        assert_eq!(tags, vec![ConfigTag::C1c, ConfigTag::C1a]);
        let t2 =
            FiniteSpace::generated_by(7, [ps(&[1, 2]), ps(&[1, 2, 7]), ps(&[3, 4]), ps(&[3, 4, 7])])
                .unwrap();
        let tags: Vec<ConfigTag> = trace(&t2).iter().take(2).map(|s| s.tag).collect();
        // {5} and {6} are not in any new 2-system, so 1b leaves them aside.
        assert_eq!(tags[0], ConfigTag::C1c);
        assert!(matches!(tags[1], ConfigTag::C1b));
    }
}
