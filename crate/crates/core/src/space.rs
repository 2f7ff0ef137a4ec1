//! Finite topological spaces on the points `1..=n`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::{PointSet, MAX_POINTS};

/// A topology on `{1, ..., n}`.
///
/// Open sets are kept sorted by `(size, numeric value)` and include the empty
/// set and the full set explicitly. The covering set of every point is cached
/// alongside.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    n: usize,
    opens: Vec<PointSet>,
    covers: Vec<PointSet>,
}

/// One closure-axiom violation with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    MissingEmpty,
    MissingFull,
    OutOfRange(u64),
    MissingUnion { a: u64, b: u64, union: u64 },
    MissingIntersection { a: u64, b: u64, intersection: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |bits: &u64| PointSet::from_bits(*bits);
        match self {
            Violation::MissingEmpty => write!(f, "empty set missing"),
            Violation::MissingFull => write!(f, "full set missing"),
            Violation::OutOfRange(x) => write!(f, "{} uses labels out of range", s(x)),
            Violation::MissingUnion { a, b, union } => {
                write!(f, "union {} of {} and {} missing", s(union), s(a), s(b))
            }
            Violation::MissingIntersection { a, b, intersection } => write!(
                f,
                "intersection {} of {} and {} missing",
                s(intersection),
                s(a),
                s(b)
            ),
        }
    }
}

/// Result of [`validate`]: empty when the family is a topology.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Check the topology axioms for `opens` on `n` points, reporting every
/// violation. The family is taken literally: the empty and full sets must be
/// present.
pub fn validate(n: usize, opens: &[PointSet]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if n > MAX_POINTS {
        report
            .violations
            .push(Violation::OutOfRange(PointSet::full(MAX_POINTS).bits()));
        return report;
    }
    let full = PointSet::full(n);
    let mut seen = BTreeSet::new();
    let mut sets = Vec::new();
    for &o in opens {
        if !o.is_subset(full) {
            report.violations.push(Violation::OutOfRange(o.bits()));
        } else if seen.insert(o) {
            sets.push(o);
        }
    }
    sets.sort();
    let present: HashSet<PointSet> = sets.iter().copied().collect();
    if !present.contains(&PointSet::EMPTY) {
        report.violations.push(Violation::MissingEmpty);
    }
    if !present.contains(&full) {
        report.violations.push(Violation::MissingFull);
    }
    for (i, &a) in sets.iter().enumerate() {
        for &b in &sets[i + 1..] {
            let u = a | b;
            if !present.contains(&u) {
                report.violations.push(Violation::MissingUnion {
                    a: a.bits(),
                    b: b.bits(),
                    union: u.bits(),
                });
            }
            let x = a & b;
            if !present.contains(&x) {
                report.violations.push(Violation::MissingIntersection {
                    a: a.bits(),
                    b: b.bits(),
                    intersection: x.bits(),
                });
            }
        }
    }
    report
}

impl FiniteSpace {
    /// Build a space from its open sets. The empty and full sets are added if
    /// absent; every other closure failure is an error.
    pub fn new<I: IntoIterator<Item = PointSet>>(n: usize, opens: I) -> Result<Self> {
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints(n));
        }
        let full = PointSet::full(n);
        let mut sets: Vec<PointSet> = opens.into_iter().collect();
        if let Some(bad) = sets.iter().find(|s| !s.is_subset(full)) {
            return Err(Error::OutOfRange { set: *bad, n });
        }
        sets.push(PointSet::EMPTY);
        sets.push(full);
        sets.sort();
        sets.dedup();
        let report = validate(n, &sets);
        if !report.is_ok() {
            return Err(Error::NotATopology(report));
        }
        Ok(Self::from_sorted_unchecked(n, sets))
    }

    /// Build from sorted, deduplicated open sets already known to form a
    /// topology.
    pub(crate) fn from_sorted_unchecked(n: usize, opens: Vec<PointSet>) -> Self {
        let covers = compute_covers(n, &opens);
        FiniteSpace { n, opens, covers }
    }

    /// Build the topology whose minimal neighbourhoods are `covers[p - 1]`.
    pub fn from_covers(n: usize, covers: &[PointSet]) -> Result<Self> {
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints(n));
        }
        if covers.len() != n {
            return Err(Error::BadCover(covers.len().min(n) + 1));
        }
        for (i, &c) in covers.iter().enumerate() {
            let p = i + 1;
            if !c.contains(p) || !c.is_subset(PointSet::full(n)) {
                return Err(Error::BadCover(p));
            }
            if c.points().any(|q| !covers[q - 1].is_subset(c)) {
                return Err(Error::BadCover(p));
            }
        }
        Ok(Self::from_covers_unchecked(n, covers))
    }

    pub(crate) fn from_covers_unchecked(n: usize, covers: &[PointSet]) -> Self {
        let mut all: HashSet<PointSet> = HashSet::new();
        all.insert(PointSet::EMPTY);
        let mut frontier = vec![PointSet::EMPTY];
        while let Some(u) = frontier.pop() {
            for &c in covers {
                let v = u | c;
                if all.insert(v) {
                    frontier.push(v);
                }
            }
        }
        let mut opens: Vec<PointSet> = all.into_iter().collect();
        opens.sort();
        FiniteSpace {
            n,
            opens,
            covers: covers.to_vec(),
        }
    }

    /// The smallest topology on `n` points containing every set in `sets`.
    pub fn generated_by<I: IntoIterator<Item = PointSet>>(n: usize, sets: I) -> Result<Self> {
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints(n));
        }
        let full = PointSet::full(n);
        let sets: Vec<PointSet> = sets.into_iter().collect();
        if let Some(bad) = sets.iter().find(|s| !s.is_subset(full)) {
            return Err(Error::OutOfRange { set: *bad, n });
        }
        let covers: Vec<PointSet> = (1..=n)
            .map(|p| {
                sets.iter()
                    .filter(|s| s.contains(p))
                    .fold(full, |acc, &s| acc & s)
            })
            .collect();
        Ok(Self::from_covers_unchecked(n, &covers))
    }

    pub fn discrete(n: usize) -> Self {
        let covers: Vec<PointSet> = (1..=n).map(PointSet::singleton).collect();
        Self::from_covers_unchecked(n, &covers)
    }

    pub fn indiscrete(n: usize) -> Self {
        let full = PointSet::full(n);
        let mut opens = vec![PointSet::EMPTY];
        if n > 0 {
            opens.push(full);
        }
        FiniteSpace {
            n,
            opens,
            covers: vec![full; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.n)
    }

    /// Open sets in `(size, value)` order.
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    /// Covering sets indexed by `point - 1`.
    pub fn covers(&self) -> &[PointSet] {
        &self.covers
    }

    /// The smallest open set containing `p`.
    pub fn cover(&self, p: usize) -> PointSet {
        self.covers[p - 1]
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        set.is_subset(self.full()) && set.points().all(|p| self.covers[p - 1].is_subset(set))
    }

    pub fn covering_table(&self) -> CoveringTable {
        CoveringTable {
            n: self.n,
            cover: self.covers.clone(),
        }
    }

    /// Open sets with exactly `m` points, sorted.
    pub fn open_sets_of_size(&self, m: usize) -> Vec<PointSet> {
        self.opens.iter().copied().filter(|o| o.len() == m).collect()
    }

    /// Relabel points: point `p` becomes `perm[p - 1]`.
    pub fn permuted(&self, perm: &[usize]) -> FiniteSpace {
        let mut covers = vec![PointSet::EMPTY; self.n];
        for p in 1..=self.n {
            covers[perm[p - 1] - 1] = self.covers[p - 1].map(perm);
        }
        let mut opens: Vec<PointSet> = self.opens.iter().map(|o| o.map(perm)).collect();
        opens.sort();
        FiniteSpace {
            n: self.n,
            opens,
            covers,
        }
    }

    /// Classify an open set as an m-system relative to the systems already
    /// known, which must all have a smaller `k`.
    pub fn classify_system(
        &self,
        set: PointSet,
        known: &[SystemClassification],
    ) -> Result<SystemClassification> {
        if !self.is_open(set) {
            return Err(Error::NotOpen(set));
        }
        let n = self.n;
        let body = set.without(n);
        let k = body.len();
        let old_points = known
            .iter()
            .filter(|s| s.k < k)
            .fold(PointSet::EMPTY, |acc, s| acc | s.set.without(n));
        let old_part = body & old_points;
        let new_part = body - old_points;
        let kind = if set.contains(n) {
            SystemKind::Lower
        } else {
            SystemKind::Upper
        };
        let partner = if set.contains(n) { body } else { set.with(n) };
        let paired = n > 0 && self.is_open(partner);
        Ok(SystemClassification {
            set,
            k,
            kind,
            paired,
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
        })
    }
}

fn compute_covers(n: usize, opens: &[PointSet]) -> Vec<PointSet> {
    let full = PointSet::full(n);
    (1..=n)
        .map(|p| {
            opens
                .iter()
                .filter(|o| o.contains(p))
                .fold(full, |acc, &o| acc & o)
        })
        .collect()
}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteSpace(n={}, opens=[", self.n)?;
        for (i, o) in self.opens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str("])")
    }
}

/// Covering sets of every point of a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringTable {
    pub n: usize,
    pub cover: Vec<PointSet>,
}

impl CoveringTable {
    pub fn cover(&self, p: usize) -> PointSet {
        self.cover[p - 1]
    }

    /// Rebuild the topology as all sets containing the cover of each member.
    pub fn regenerate(&self) -> Result<FiniteSpace> {
        FiniteSpace::from_covers(self.n, &self.cover)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemAge {
    Old,
    New,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Purity {
    Clean,
    Mixed,
}

/// An open set viewed as a k-system: `k = |set - {n}|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemClassification {
    pub set: PointSet,
    pub k: usize,
    pub kind: SystemKind,
    /// Both the set and its partner with `n` toggled are open.
    pub paired: bool,
    pub age: SystemAge,
    pub purity: Purity,
    /// Points other than `n` already seen in smaller systems.
    pub old_part: PointSet,
    /// Points other than `n` seen here for the first time.
    pub new_part: PointSet,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    fn space(n: usize, opens: &[&[usize]]) -> FiniteSpace {
        FiniteSpace::new(n, opens.iter().map(|o| ps(o))).unwrap()
    }

    #[test]
    fn validate_accepts_doublet() {
        let opens = [PointSet::EMPTY, ps(&[1, 2]), PointSet::full(5)];
        assert!(validate(5, &opens).is_ok());
    }

    #[test]
    fn validate_reports_missing_union() {
        let opens = [
            PointSet::EMPTY,
            ps(&[1, 2, 3]),
            ps(&[4, 5, 6]),
            PointSet::full(7),
        ];
        let report = validate(7, &opens);
        assert_eq!(
            report.violations,
            vec![Violation::MissingUnion {
                a: ps(&[1, 2, 3]).bits(),
                b: ps(&[4, 5, 6]).bits(),
                union: ps(&[1, 2, 3, 4, 5, 6]).bits(),
            }]
        );
    }

    #[test]
    fn validate_one_point_and_missing_axioms() {
        assert!(validate(1, &[PointSet::EMPTY, ps(&[1])]).is_ok());
        let r = validate(2, &[ps(&[1])]);
        assert!(r.violations.contains(&Violation::MissingEmpty));
        assert!(r.violations.contains(&Violation::MissingFull));
        let r = validate(2, &[PointSet::EMPTY, ps(&[1, 2]), ps(&[3])]);
        assert!(matches!(r.violations[0], Violation::OutOfRange(_)));
    }

    #[test]
    fn new_rejects_non_topology() {
        let err = FiniteSpace::new(3, [ps(&[1]), ps(&[2])]).unwrap_err();
        assert!(matches!(err, Error::NotATopology(_)));
        assert!(FiniteSpace::new(65, []).is_err());
    }

    #[test]
    fn covering_sets_four_points() {
        let t = space(4, &[&[1], &[2], &[1, 2], &[1, 2, 3]]);
        assert_eq!(t.cover(3), ps(&[1, 2, 3]));
        assert_eq!(t.cover(4), ps(&[1, 2, 3, 4]));
        assert_eq!(t.cover(1), ps(&[1]));
    }

    #[test]
    fn covering_sets_clan_example() {
        // 1*={1}, 2*={2}, 3*=4*={1,2,3,4}, 5*={1,5}, 6*=7*={2,6,7}, 8*=T
        let covers = vec![
            ps(&[1]),
            ps(&[2]),
            ps(&[1, 2, 3, 4]),
            ps(&[1, 2, 3, 4]),
            ps(&[1, 5]),
            ps(&[2, 6, 7]),
            ps(&[2, 6, 7]),
            PointSet::full(8),
        ];
        let t = FiniteSpace::from_covers(8, &covers).unwrap();
        assert_eq!(t.cover(6), ps(&[2, 6, 7]));
        assert_eq!(t.covering_table().regenerate().unwrap(), t);
    }

    #[test]
    fn discrete_and_indiscrete() {
        let d = FiniteSpace::discrete(4);
        assert_eq!(d.opens().len(), 16);
        assert!((1..=4).all(|p| d.cover(p) == PointSet::singleton(p)));
        let i = FiniteSpace::indiscrete(3);
        assert_eq!(i.opens(), &[PointSet::EMPTY, PointSet::full(3)]);
        assert_eq!(i, FiniteSpace::new(3, []).unwrap());
    }

    #[test]
    fn from_covers_rejects_bad_tables() {
        assert!(FiniteSpace::from_covers(2, &[ps(&[2]), ps(&[2])]).is_err());
        assert!(FiniteSpace::from_covers(2, &[ps(&[1, 2]), ps(&[2, 1])]).is_ok());
        assert!(FiniteSpace::from_covers(3, &[ps(&[1, 2]), ps(&[2, 3]), ps(&[3])]).is_err());
    }

    #[test]
    fn open_sets_of_size_examples() {
        let t1 = space(5, &[&[1, 2]]);
        assert_eq!(t1.open_sets_of_size(2), vec![ps(&[1, 2])]);
        assert_eq!(t1.open_sets_of_size(0), vec![PointSet::EMPTY]);
        let t2 = space(7, &[&[1, 2, 3], &[1, 2, 3, 7]]);
        assert_eq!(t2.open_sets_of_size(4), vec![ps(&[1, 2, 3, 7])]);
    }

    #[test]
    fn generated_by_closes_family() {
        let t = FiniteSpace::generated_by(7, [ps(&[1, 2, 3]), ps(&[4, 5, 6])]).unwrap();
        assert!(t.is_open(ps(&[1, 2, 3, 4, 5, 6])));
        assert_eq!(t.opens().len(), 5);
    }

    #[test]
    fn classify_small_systems() {
        let t = space(7, &[&[1, 2, 3], &[4, 5, 6], &[1, 2, 3, 4, 5, 6]]);
        let c = t.classify_system(ps(&[1, 2, 3]), &[]).unwrap();
        assert_eq!(c.kind, SystemKind::Upper);
        assert_eq!(c.k, 3);
        assert_eq!(c.age, SystemAge::New);
        assert_eq!(c.purity, Purity::Clean);

        let t7 = space(4, &[&[1], &[2], &[1, 2], &[2, 3], &[1, 2, 3]]);
        let known = vec![
            t7.classify_system(ps(&[1]), &[]).unwrap(),
            t7.classify_system(ps(&[2]), &[]).unwrap(),
        ];
        let c = t7.classify_system(ps(&[2, 3]), &known).unwrap();
        assert_eq!(c.kind, SystemKind::Upper);
        assert_eq!(c.k, 2);
        assert_eq!(c.age, SystemAge::New);
        assert_eq!(c.purity, Purity::Mixed);
        assert_eq!(c.old_part, ps(&[2]));
        assert_eq!(c.new_part, ps(&[3]));

        let full = t7.classify_system(t7.full(), &known).unwrap();
        assert_eq!(full.kind, SystemKind::Lower);
        assert_eq!(full.k, 3);

        assert!(matches!(
            t7.classify_system(ps(&[3]), &known),
            Err(Error::NotOpen(_))
        ));
    }

    #[test]
    fn classify_paired() {
        let t = space(3, &[&[1], &[1, 3]]);
        let c = t.classify_system(ps(&[1]), &[]).unwrap();
        assert!(c.paired);
        let c = t.classify_system(ps(&[1, 3]), &[]).unwrap();
        assert!(c.paired);
        assert_eq!(c.kind, SystemKind::Lower);
    }
}
