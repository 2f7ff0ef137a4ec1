//! Brute-force reference: enumerate every finite topology and solve
//! reconstruction by sweeping all of them.
//!
//! Topologies on `n` points are in bijection with preorders; a preorder on
//! `{1..m+1}` is a preorder on `{1..m}` plus the set `D` of points below
//! the new point (an open set) and the set `U` of points above it (a closed
//! set), where every point of `D` lies below every point of `U`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::canon::{canonical_form, canonical_space, CanonicalCertificate};
use crate::clans::{all_rooted_clans, build_digraph, build_plain_digraph};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::quotient::{quotient_family, QuotientFamily};
use crate::reconstruct::{representative, ConfigTag, SearchStatus, SolutionSet};
use crate::space::FiniteSpace;
use crate::trace::trace;

/// Largest `n` accepted by the labeled enumerator.
pub const MAX_LABELED: usize = 7;
/// Largest `n` accepted by the class enumerator and the oracle.
pub const MAX_CLASSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EnumerationMode {
    Labeled,
    UpToHomeomorphism,
}

/// Covering sets of every preorder on `{1..m+1}` restricting to `covers`.
fn extensions(covers: &[PointSet]) -> Vec<Vec<PointSet>> {
    let m = covers.len();
    let p = m + 1;
    let full = PointSet::full(m);
    let opens = if m == 0 {
        vec![PointSet::EMPTY]
    } else {
        FiniteSpace::from_covers_unchecked(m, covers).opens().to_vec()
    };
    let mut out = Vec::new();
    for &closed_complement in &opens {
        let up = full - closed_complement;
        let below_all_up = up
            .points()
            .fold(full, |acc, u| acc & covers[u - 1]);
        for &down in &opens {
            if !down.is_subset(below_all_up) {
                continue;
            }
            let own = down.with(p);
            let mut next: Vec<PointSet> = covers.to_vec();
            for u in up.points() {
                next[u - 1] = next[u - 1] | own;
            }
            next.push(own);
            out.push(next);
        }
    }
    out
}

/// Covering tables of every labeled topology on `n` points.
fn labeled_covers(n: usize) -> Vec<Vec<PointSet>> {
    let mut level: Vec<Vec<PointSet>> = vec![Vec::new()];
    for _ in 0..n {
        level = level.iter().flat_map(|c| extensions(c)).collect();
    }
    level
}

/// Stream of topologies on `n` points.
pub struct EnumerationStream {
    n: usize,
    mode: EnumerationMode,
    outer: std::vec::IntoIter<Vec<PointSet>>,
    inner: std::vec::IntoIter<Vec<PointSet>>,
}

impl EnumerationStream {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> EnumerationMode {
        self.mode
    }
}

impl Iterator for EnumerationStream {
    type Item = FiniteSpace;

    fn next(&mut self) -> Option<FiniteSpace> {
        loop {
            if let Some(c) = self.inner.next() {
                return Some(FiniteSpace::from_covers_unchecked(self.n, &c));
            }
            let base = self.outer.next()?;
            self.inner = match self.mode {
                EnumerationMode::Labeled if self.n > 0 => extensions(&base).into_iter(),
                _ => vec![base].into_iter(),
            };
        }
    }
}

/// All topologies on `{1..n}`, or one canonical representative per
/// homeomorphism class (sorted by certificate).
pub fn enumerate_topologies(n: usize, mode: EnumerationMode) -> Result<EnumerationStream> {
    let max = match mode {
        EnumerationMode::Labeled => MAX_LABELED,
        EnumerationMode::UpToHomeomorphism => MAX_CLASSES,
    };
    if n == 0 || n > max {
        return Err(Error::UnsupportedSize { n, min: 1, max });
    }
    let outer = match mode {
        // Extend the (n-1)-point tables lazily, one at a time.
        EnumerationMode::Labeled => labeled_covers(n - 1),
        EnumerationMode::UpToHomeomorphism => classes(n)
            .iter()
            .map(|s| s.covers().to_vec())
            .collect(),
    };
    Ok(EnumerationStream {
        n,
        mode,
        outer: outer.into_iter(),
        inner: Vec::new().into_iter(),
    })
}

fn class_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<FiniteSpace>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<FiniteSpace>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Canonical representatives of the homeomorphism classes on `n` points.
///
/// Deleting the last point of any topology leaves a topology on `n - 1`
/// points, so extending one representative per smaller class reaches every
/// class.
fn classes(n: usize) -> Arc<Vec<FiniteSpace>> {
    if let Some(hit) = class_cache().lock().unwrap().get(&n) {
        return hit.clone();
    }
    let result: Vec<FiniteSpace> = if n == 0 {
        Vec::new()
    } else {
        let smaller: Vec<Vec<PointSet>> = if n == 1 {
            vec![Vec::new()]
        } else {
            classes(n - 1).iter().map(|s| s.covers().to_vec()).collect()
        };
        let mut found: BTreeMap<CanonicalCertificate, FiniteSpace> = BTreeMap::new();
        for base in &smaller {
            for c in extensions(base) {
                let space = FiniteSpace::from_covers_unchecked(n, &c);
                let cert = canonical_form(&space);
                found.entry(cert).or_insert_with(|| canonical_space(&space));
            }
        }
        found.into_values().collect()
    };
    let result = Arc::new(result);
    class_cache()
        .lock()
        .unwrap()
        .insert(n, result.clone());
    result
}

/// Every family of subsets of `{1..n}` containing the empty and the full
/// set, kept when closed under union and intersection. Only for `n <= 4`.
pub fn naive_topologies(n: usize) -> Result<Vec<FiniteSpace>> {
    if n == 0 || n > 4 {
        return Err(Error::UnsupportedSize { n, min: 1, max: 4 });
    }
    let full = PointSet::full(n);
    let middle: Vec<PointSet> = (1..full.bits())
        .map(PointSet::from_bits)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << middle.len()) {
        let mut family = vec![PointSet::EMPTY, full];
        family.extend(
            middle
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &s)| s),
        );
        let closed = family.iter().all(|&a| {
            family
                .iter()
                .all(|&b| family.contains(&(a | b)) && family.contains(&(a & b)))
        });
        if closed {
            out.push(FiniteSpace::new(n, family).expect("closed family"));
        }
    }
    Ok(out)
}

/// Sorted certificates of a family's members.
fn family_key(family: &QuotientFamily) -> Vec<CanonicalCertificate> {
    let mut key: Vec<_> = family.spaces().iter().map(canonical_form).collect();
    key.sort();
    key
}

/// Solutions of every quotient family that arises on `n` points.
pub struct OracleIndex {
    pub n: usize,
    pub families: HashMap<Vec<CanonicalCertificate>, Vec<FiniteSpace>>,
}

impl OracleIndex {
    fn build(n: usize) -> Self {
        let mut families: HashMap<Vec<CanonicalCertificate>, Vec<FiniteSpace>> = HashMap::new();
        for space in classes(n).iter() {
            // Any point may play the role of `n`.
            let mut keys: Vec<Vec<CanonicalCertificate>> = (1..=n)
                .map(|p| {
                    let mut perm: Vec<usize> = (1..=n).collect();
                    perm.swap(p - 1, n - 1);
                    family_key(&quotient_family(&space.permuted(&perm)).expect("n >= 2"))
                })
                .collect();
            keys.sort();
            keys.dedup();
            for key in keys {
                families.entry(key).or_default().push(space.clone());
            }
        }
        OracleIndex { n, families }
    }

    pub fn solutions(&self, family: &QuotientFamily) -> Vec<FiniteSpace> {
        self.families
            .get(&family_key(family))
            .cloned()
            .unwrap_or_default()
    }
}

/// The shared index for `n`-point spaces, built on first use.
pub fn oracle_index(n: usize) -> Result<Arc<OracleIndex>> {
    if !(2..=MAX_CLASSES).contains(&n) {
        return Err(Error::UnsupportedSize {
            n,
            min: 2,
            max: MAX_CLASSES,
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OracleIndex>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let index = Arc::new(OracleIndex::build(n));
    cache.lock().unwrap().insert(n, index.clone());
    Ok(index)
}

fn solution_set(
    spaces: impl IntoIterator<Item = FiniteSpace>,
    certificates: &[CanonicalCertificate],
) -> SolutionSet {
    let solutions = spaces
        .into_iter()
        .map(|s| (canonical_form(&s), representative(&s, certificates)))
        .collect();
    SolutionSet {
        solutions,
        status: SearchStatus::Complete,
        branches: 0,
    }
}

/// Every space (up to homeomorphism) whose quotient family is `family`,
/// found by checking one representative of every class.
pub fn oracle_reconstruct(family: &QuotientFamily) -> Result<SolutionSet> {
    let index = oracle_index(family.target_points())?;
    Ok(solution_set(index.solutions(family), &family_key(family)))
}

/// The same answer found by sweeping every labeled topology.
pub fn oracle_reconstruct_labeled(family: &QuotientFamily) -> Result<SolutionSet> {
    let n = family.target_points();
    let key = family_key(family);
    let mut found: BTreeMap<CanonicalCertificate, FiniteSpace> = BTreeMap::new();
    for space in enumerate_topologies(n, EnumerationMode::Labeled)? {
        let cert = canonical_form(&space);
        if found.contains_key(&cert) {
            continue;
        }
        if family_key(&quotient_family(&space)?) == key {
            found.insert(cert, representative(&space, &key));
        }
    }
    Ok(SolutionSet {
        solutions: found,
        status: SearchStatus::Complete,
        branches: 0,
    })
}

/// One input family with several solutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanInstance {
    /// The input family, one list of open sets per quotient space.
    pub family: Vec<Vec<PointSet>>,
    /// Solutions as lists of open sets, with `n` as the distinguished point.
    pub solutions: Vec<Vec<PointSet>>,
    /// `(quotient index, root)` of every nontrivial rooted clan in the
    /// quotient spaces.
    pub nontrivial_clans: Vec<(usize, PointSet)>,
    /// Per solution: it has a trivial clan rooted at a k-system, `k < n - 1`.
    pub trivial_clan_in_solution: Vec<bool>,
    /// The quotient spaces have only trivial clans.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub families: usize,
    pub multi_solution: usize,
    pub counterexamples: usize,
    pub instances: Vec<ScanInstance>,
}

/// Roots of nontrivial rooted clans; the full set is never a root here.
fn nontrivial_roots(space: &FiniteSpace) -> Vec<PointSet> {
    all_rooted_clans(&build_plain_digraph(space))
        .into_iter()
        .filter(|c| c.root != space.full() && !c.is_trivial())
        .map(|c| c.root)
        .collect()
}

fn has_trivial_small_clan(space: &FiniteSpace) -> bool {
    let n = space.n();
    all_rooted_clans(&build_digraph(space))
        .iter()
        .any(|c| c.root != space.full() && c.root.without(n).len() < n - 1 && c.is_trivial())
}

/// For every family with more than one solution, report whether the
/// quotient spaces have only trivial rooted clans. Report only.
pub fn conjecture_scan(n: usize) -> Result<ConjectureReport> {
    if n < 2 {
        return Ok(ConjectureReport {
            n,
            families: 0,
            multi_solution: 0,
            counterexamples: 0,
            instances: Vec::new(),
        });
    }
    let index = oracle_index(n)?;
    let mut keys: Vec<&Vec<CanonicalCertificate>> = index.families.keys().collect();
    keys.sort();
    let mut instances = Vec::new();
    for key in &keys {
        let sols = &index.families[*key];
        if sols.len() < 2 {
            continue;
        }
        let family: Vec<FiniteSpace> = key.iter().map(|c| c.to_space()).collect();
        let nontrivial_clans: Vec<(usize, PointSet)> = family
            .iter()
            .enumerate()
            .flat_map(|(j, q)| nontrivial_roots(q).into_iter().map(move |r| (j, r)))
            .collect();
        let reps: Vec<FiniteSpace> = sols.iter().map(|s| representative(s, key)).collect();
        instances.push(ScanInstance {
            family: family.iter().map(|q| q.opens().to_vec()).collect(),
            trivial_clan_in_solution: reps.iter().map(has_trivial_small_clan).collect(),
            solutions: reps.iter().map(|s| s.opens().to_vec()).collect(),
            consistent: nontrivial_clans.is_empty(),
            nontrivial_clans,
        });
    }
    Ok(ConjectureReport {
        n,
        families: keys.len(),
        multi_solution: instances.len(),
        counterexamples: instances.iter().filter(|i| !i.consistent).count(),
        instances,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub n: usize,
    pub classes: usize,
    /// Classes with a point whose covering set is the whole space.
    pub n_star_full: usize,
    /// Remaining classes with an open singleton.
    pub n_star_point: usize,
    pub neither: usize,
    /// Labeled spaces checked against the configuration restrictions.
    pub checked: usize,
    pub full_violations: Vec<String>,
    pub point_violations: Vec<String>,
}

/// Count classes by the extreme shapes of `n*` and check that `n* = T`
/// allows only 1a, 1c, 3a (and 1b at `k = n - 1`), and `n* = {n}` only
/// 1b, 1c, 1d, 3c, 3d.
pub fn census(n: usize) -> Result<CensusReport> {
    if n == 0 || n > 6 {
        return Err(Error::UnsupportedSize { n, min: 1, max: 6 });
    }
    let reps = classes(n);
    let full = PointSet::full(n);
    let (mut n_full, mut n_point) = (0, 0);
    let (mut full_violations, mut point_violations) = (Vec::new(), Vec::new());
    let mut checked = 0;
    for space in reps.iter() {
        let has_full = (1..=n).any(|p| space.cover(p) == full);
        let has_point = (1..=n).any(|p| space.cover(p) == PointSet::singleton(p));
        if has_full {
            n_full += 1;
        } else if has_point {
            n_point += 1;
        }
        // Each point in turn plays the role of n.
        for p in 1..=n {
            let cover = space.cover(p);
            let is_full = cover == full;
            let is_point = cover == PointSet::singleton(p);
            if !(is_full || is_point) || n < 2 {
                continue;
            }
            let mut perm: Vec<usize> = (1..=n).collect();
            perm.swap(p - 1, n - 1);
            let relabeled = space.permuted(&perm);
            checked += 1;
            for step in trace(&relabeled) {
                let ok = if is_full {
                    matches!(step.tag, ConfigTag::C1a | ConfigTag::C1c | ConfigTag::C3a)
                        || (step.tag == ConfigTag::C1b && step.k == n - 1)
                } else {
                    matches!(
                        step.tag,
                        ConfigTag::C1b
                            | ConfigTag::C1c
                            | ConfigTag::C1d
                            | ConfigTag::C3c
                            | ConfigTag::C3d
                    )
                };
                if !ok {
                    let msg = format!("{:?}: {} at k={}", relabeled, step.tag, step.k);
                    if is_full {
                        full_violations.push(msg);
                    } else {
                        point_violations.push(msg);
                    }
                }
            }
        }
    }
    Ok(CensusReport {
        n,
        classes: reps.len(),
        n_star_full: n_full,
        n_star_point: n_point,
        neither: reps.len() - n_full - n_point,
        checked,
        full_violations,
        point_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn labeled_counts() {
        let counts: Vec<usize> = (1..=5)
            .map(|n| enumerate_topologies(n, EnumerationMode::Labeled).unwrap().count())
            .collect();
        assert_eq!(counts, vec![1, 4, 29, 355, 6942]);
    }

    #[test]
    fn class_counts() {
        let counts: Vec<usize> = (1..=6)
            .map(|n| {
                enumerate_topologies(n, EnumerationMode::UpToHomeomorphism)
                    .unwrap()
                    .count()
            })
            .collect();
        assert_eq!(counts, vec![1, 3, 9, 33, 139, 718]);
    }

    #[test]
    fn naive_filter_agrees() {
        for n in 1..=4 {
            let mut a: Vec<CanonicalCertificate> = naive_topologies(n)
                .unwrap()
                .iter()
                .map(canonical_form)
                .collect();
            let mut b: Vec<CanonicalCertificate> = enumerate_topologies(n, EnumerationMode::Labeled)
                .unwrap()
                .map(|s| canonical_form(&s))
                .collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "n = {n}");
        }
        assert_eq!(naive_topologies(2).unwrap().len(), 4);
        assert_eq!(naive_topologies(3).unwrap().len(), 29);
    }

    #[test]
    fn labeled_spaces_are_distinct_and_valid() {
        let all: Vec<FiniteSpace> = enumerate_topologies(4, EnumerationMode::Labeled).unwrap().collect();
        let distinct: BTreeSet<Vec<PointSet>> = all.iter().map(|s| s.opens().to_vec()).collect();
        assert_eq!(distinct.len(), all.len());
        for s in &all {
            assert!(FiniteSpace::new(4, s.opens().iter().copied()).is_ok());
            assert_eq!(&s.covering_table().regenerate().unwrap(), s);
        }
    }

    #[test]
    fn two_point_family_has_three_solutions() {
        let family = QuotientFamily::new(vec![FiniteSpace::discrete(1)]).unwrap();
        assert_eq!(oracle_reconstruct(&family).unwrap().len(), 3);
        assert_eq!(oracle_reconstruct_labeled(&family).unwrap().len(), 3);
    }

    #[test]
    fn census_small() {
        let c1 = census(1).unwrap();
        assert_eq!((c1.classes, c1.n_star_full), (1, 1));
        assert_eq!(census(2).unwrap().classes, 3);
        let c3 = census(3).unwrap();
        assert_eq!(c3.classes, 9);
        assert_eq!(c3.n_star_full + c3.n_star_point + c3.neither, 9);
        for n in 2..=5 {
            let c = census(n).unwrap();
            assert!(c.full_violations.is_empty() && c.point_violations.is_empty(), "n = {n}");
        }
    }

    #[test]
    fn scan_lists_the_three_point_ambiguity() {
        let report = conjecture_scan(3).unwrap();
        let a = canonical_form(&FiniteSpace::new(3, [PointSet::singleton(1)]).unwrap());
        let b = canonical_form(&FiniteSpace::new(3, [PointSet::from_points([1, 3])]).unwrap());
        assert!(report.instances.iter().any(|inst| {
            let certs: Vec<CanonicalCertificate> = inst
                .solutions
                .iter()
                .map(|o| canonical_form(&FiniteSpace::new(3, o.iter().copied()).unwrap()))
                .collect();
            certs.contains(&a) && certs.contains(&b) && inst.consistent
        }));
        assert!(conjecture_scan(1).unwrap().instances.is_empty());
    }

    #[test]
    fn unsupported_sizes() {
        assert!(enumerate_topologies(0, EnumerationMode::Labeled).is_err());
        assert!(enumerate_topologies(8, EnumerationMode::Labeled).is_err());
        assert!(naive_topologies(5).is_err());
    }
}
