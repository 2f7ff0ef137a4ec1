use std::collections::HashSet;

use serde::Serialize;

use super::config::Configuration;
use crate::pointset::PointSet;
use crate::space::{FiniteSpace, Purity, SystemAge, SystemClassification, SystemKind};

/// A partial solution after iterations `0..k`.
///
/// Points `1..next_label` are placed: their covering sets are known and each
/// has been matched with one member of the input family. Every other point
/// of `1..n-1` is still new.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ReconstructionState {
    pub n: usize,
    /// Next iteration to run.
    pub k: usize,
    /// `covers[p - 1]` is the covering set of placed point `p`.
    pub covers: Vec<PointSet>,
    /// `levels[p - 1] = |p* - {n}|`.
    pub levels: Vec<usize>,
    /// Covering set of `n`, once settled.
    pub n_star: Option<PointSet>,
    /// Old points `X_{k-1}`: every placed point.
    pub x_prev: PointSet,
    /// Points placed by the last iteration.
    pub y_k: PointSet,
    /// `old_assignment[p - 1]` is the index of the input space playing `Q^p`.
    pub old_assignment: Vec<usize>,
    pub next_label: usize,
    /// Configuration chosen at each iteration `1..k`.
    pub history: Vec<Configuration>,
}

impl ReconstructionState {
    pub(crate) fn root(n: usize, n_star_point: bool) -> Self {
        ReconstructionState {
            n,
            k: 1,
            covers: Vec::new(),
            levels: Vec::new(),
            n_star: n_star_point.then(|| PointSet::singleton(n)),
            x_prev: PointSet::EMPTY,
            y_k: PointSet::EMPTY,
            old_assignment: Vec::new(),
            next_label: 1,
            history: Vec::new(),
        }
    }

    /// Number of points already placed (and of old spaces).
    pub fn t_k(&self) -> usize {
        self.next_label - 1
    }

    pub fn placed(&self) -> PointSet {
        PointSet::full(self.t_k())
    }

    pub fn is_complete(&self) -> bool {
        self.t_k() + 1 == self.n && self.n_star.is_some()
    }

    /// Every set that is open in all solutions extending this state: the
    /// unions of the known covering sets.
    pub fn known_opens(&self) -> Vec<PointSet> {
        let mut gens: Vec<PointSet> = self.covers.clone();
        gens.extend(self.n_star);
        gens.sort();
        gens.dedup();
        let mut seen: HashSet<PointSet> = HashSet::new();
        seen.insert(PointSet::EMPTY);
        let mut all = vec![PointSet::EMPTY];
        for g in gens {
            let len = all.len();
            for i in 0..len {
                let u = all[i] | g;
                if seen.insert(u) {
                    all.push(u);
                }
            }
        }
        all.sort();
        all
    }

    /// The known systems, classified relative to each other.
    pub fn systems(&self) -> Vec<SystemClassification> {
        let n = self.n;
        let known = self.known_opens();
        let mut out = Vec::new();
        for &set in known.iter().filter(|s| !s.is_empty()) {
            let body = set.without(n);
            let k = body.len();
            let old_points = self
                .covers
                .iter()
                .zip(&self.levels)
                .enumerate()
                .filter(|&(_, (_, &lvl))| lvl < k)
                .fold(PointSet::EMPTY, |acc, (i, _)| acc.with(i + 1));
            let partner = if set.contains(n) { body } else { set.with(n) };
            let new_part = body - old_points;
            let old_part = body & old_points;
            out.push(SystemClassification {
                set,
                k,
                kind: if set.contains(n) {
                    SystemKind::Lower
                } else {
                    SystemKind::Upper
                },
                paired: known.binary_search(&partner).is_ok(),
                age: if new_part.is_empty() {
                    SystemAge::Old
                } else {
                    SystemAge::New
                },
                purity: if old_part.is_empty() {
                    Purity::Clean
                } else {
                    Purity::Mixed
                },
                old_part,
                new_part,
            });
        }
        out
    }

    /// The assembled space, once every point is placed.
    pub fn to_space(&self) -> Option<FiniteSpace> {
        if !self.is_complete() {
            return None;
        }
        let mut covers = self.covers.clone();
        covers.push(self.n_star?);
        FiniteSpace::from_covers(self.n, &covers).ok()
    }
}
