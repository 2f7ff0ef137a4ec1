//! Partial-family embedding: does some relabeling carry a predicted family of
//! small open sets exactly onto the small open sets of a given space, while
//! sending every predicted larger set to an open set?

use crate::pointset::PointSet;
use crate::space::FiniteSpace;

/// Predicted open sets of one quotient space after iteration `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Prediction {
    /// Every open set with at most `k` points.
    pub exact: Vec<PointSet>,
    /// Sets with more than `k` points already known to be open.
    pub extra: Vec<PointSet>,
}

pub(crate) fn embeds(pred: &Prediction, target: &FiniteSpace, k: usize) -> bool {
    let small: Vec<PointSet> = target
        .opens()
        .iter()
        .copied()
        .take_while(|o| o.len() <= k)
        .collect();
    if small.len() != pred.exact.len() {
        return false;
    }
    let mut hist_a = vec![0usize; k + 1];
    let mut hist_b = vec![0usize; k + 1];
    for s in &pred.exact {
        if s.len() > k {
            return false;
        }
        hist_a[s.len()] += 1;
    }
    for s in &small {
        hist_b[s.len()] += 1;
    }
    if hist_a != hist_b {
        return false;
    }

    let m = target.n();
    let involved = pred
        .exact
        .iter()
        .chain(pred.extra.iter())
        .fold(PointSet::EMPTY, |acc, &s| acc | s);
    let signature = |sets: &[PointSet], p: usize| {
        let mut v: Vec<usize> = sets.iter().filter(|s| s.contains(p)).map(|s| s.len()).collect();
        v.sort_unstable();
        v
    };
    let target_sig: Vec<Vec<usize>> = (1..=m).map(|q| signature(&small, q)).collect();

    let mut order: Vec<usize> = involved.points().collect();
    let weight = |p: usize| {
        pred.exact.iter().filter(|s| s.contains(p)).count() * 4
            + pred.extra.iter().filter(|s| s.contains(p)).count()
    };
    order.sort_by_key(|&p| std::cmp::Reverse(weight(p)));
    let pred_sig: Vec<Vec<usize>> = order.iter().map(|&p| signature(&pred.exact, p)).collect();

    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    for sig in &pred_sig {
        let c: Vec<usize> = (1..=m).filter(|&q| &target_sig[q - 1] == sig).collect();
        if c.is_empty() {
            return false;
        }
        candidates.push(c);
    }

    // Sets checked once their last point (in `order`) is mapped.
    let position = |p: usize| order.iter().position(|&x| x == p).unwrap();
    let mut checks: Vec<Vec<(PointSet, bool)>> = vec![Vec::new(); order.len()];
    for &s in &pred.exact {
        if let Some(last) = s.points().map(position).max() {
            checks[last].push((s, true));
        }
    }
    for &s in &pred.extra {
        if let Some(last) = s.points().map(position).max() {
            checks[last].push((s, false));
        }
    }

    let mut ctx = Search {
        order: &order,
        candidates: &candidates,
        checks: &checks,
        small: &small,
        target,
        map: vec![0; m + 1],
        used: PointSet::EMPTY,
    };
    ctx.extend(0)
}

struct Search<'a> {
    order: &'a [usize],
    candidates: &'a [Vec<usize>],
    checks: &'a [Vec<(PointSet, bool)>],
    small: &'a [PointSet],
    target: &'a FiniteSpace,
    map: Vec<usize>,
    used: PointSet,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let p = self.order[depth];
        for &q in &self.candidates[depth] {
            if self.used.contains(q) {
                continue;
            }
            self.map[p] = q;
            self.used = self.used.with(q);
            let ok = self.checks[depth].iter().all(|&(s, exact)| {
                let image = s.points().fold(PointSet::EMPTY, |acc, x| acc.with(self.map[x]));
                if exact {
                    self.small.binary_search(&image).is_ok()
                } else {
                    self.target.is_open(image)
                }
            });
            if ok && self.extend(depth + 1) {
                return true;
            }
            self.used = self.used.without(q);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    #[test]
    fn relabeled_chain_embeds() {
        let target = FiniteSpace::new(3, [ps(&[2]), ps(&[2, 3])]).unwrap();
        let pred = Prediction {
            exact: vec![PointSet::EMPTY, ps(&[1])],
            extra: vec![ps(&[1, 3])],
        };
        assert!(embeds(&pred, &target, 1));
        let bad = Prediction {
            exact: vec![PointSet::EMPTY, ps(&[1])],
            extra: vec![ps(&[1, 3]), ps(&[1, 2])],
        };
        assert!(!embeds(&bad, &target, 1));
    }

    #[test]
    fn counts_must_agree() {
        let target = FiniteSpace::discrete(2);
        let pred = Prediction {
            exact: vec![PointSet::EMPTY, ps(&[1])],
            extra: vec![],
        };
        assert!(!embeds(&pred, &target, 1));
        let pred = Prediction {
            exact: vec![PointSet::EMPTY, ps(&[1]), ps(&[2])],
            extra: vec![],
        };
        assert!(embeds(&pred, &target, 1));
    }
}
