//! Reconstruction of a space from its quotient family.
//!
//! The search runs over iterations `k = 1, ..., n-1`. Iteration `k` settles
//! the points whose covering set has `k` points other than `n` (the new
//! k-systems), decides whether `n*` is settled at this level, and matches
//! each newly settled point `p` with the input space that plays `Q^p`. A
//! branch survives only if, for every point, the open sets of the predicted
//! quotient with at most `k` points can be relabeled exactly onto those of
//! its input space, with every larger known open set landing on an open set.
//! Leaves are checked against the whole family and deduplicated by
//! certificate.

mod config;
mod matcher;
mod search;
mod state;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    Case, CaseCounts, ConfigTag, Configuration, DiscriminationReport, NPlacement, SystemBlock,
};
pub use state::ReconstructionState;

use crate::canon::{canonical_form, canonical_space, compare_certificates, CanonicalCertificate};
use crate::pointset::PointSet;
use crate::quotient::{quotient_family, QuotientFamily};
use crate::space::FiniteSpace;
use search::{expand, Problem};

/// Restrict the covering set of the top point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum NStarHypothesis {
    #[default]
    Any,
    /// `n* = T`.
    Full,
    /// `n* = {n}`.
    Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructOptions {
    pub max_branches: u64,
    pub time_limit: Option<Duration>,
    pub threads: usize,
    pub n_star: NStarHypothesis,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            max_branches: 1_000_000,
            time_limit: Some(Duration::from_secs(60)),
            threads: 1,
            n_star: NStarHypothesis::Any,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SearchStatus {
    Complete,
    LimitExceeded,
}

/// Non-homeomorphic solutions keyed by certificate; each representative is
/// stored in its canonical labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub solutions: BTreeMap<CanonicalCertificate, FiniteSpace>,
    pub status: SearchStatus,
    pub branches: u64,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn certificates(&self) -> BTreeSet<CanonicalCertificate> {
        self.solutions.keys().cloned().collect()
    }

    pub fn spaces(&self) -> impl Iterator<Item = &FiniteSpace> {
        self.solutions.values()
    }

    pub fn contains(&self, space: &FiniteSpace) -> bool {
        self.solutions.contains_key(&canonical_form(space))
    }
}

pub fn reconstruct(family: &QuotientFamily) -> SolutionSet {
    reconstruct_with(family, &ReconstructOptions::default())
}

pub fn reconstruct_with(family: &QuotientFamily, options: &ReconstructOptions) -> SolutionSet {
    let problem = Problem::new(family);
    let driver = Driver {
        problem: &problem,
        hypothesis: options.n_star,
        max_branches: options.max_branches,
        deadline: options.time_limit.map(|d| Instant::now() + d),
        branches: AtomicU64::new(0),
        exceeded: AtomicBool::new(false),
    };
    let roots = initial(&problem, options.n_star);
    let mut frontier: Vec<ReconstructionState> = Vec::new();
    let mut solutions = BTreeMap::new();
    for root in roots {
        if !driver.tick() {
            break;
        }
        if root.is_complete() {
            driver.leaf(&root, &mut solutions);
            continue;
        }
        for child in expand(&problem, &root, driver.hypothesis) {
            if !driver.tick() {
                break;
            }
            frontier.push(child.state);
        }
    }
    let threads = options.threads.max(1);
    if threads == 1 {
        for s in &frontier {
            driver.dfs(s, &mut solutions);
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        let found: Vec<BTreeMap<CanonicalCertificate, FiniteSpace>> = pool.install(|| {
            frontier
                .par_iter()
                .map(|s| {
                    let mut local = BTreeMap::new();
                    driver.dfs(s, &mut local);
                    local
                })
                .collect()
        });
        for map in found {
            solutions.extend(map);
        }
    }
    SolutionSet {
        solutions,
        status: if driver.exceeded.load(Ordering::Relaxed) {
            SearchStatus::LimitExceeded
        } else {
            SearchStatus::Complete
        },
        branches: driver.branches.load(Ordering::Relaxed),
    }
}

struct Driver<'a> {
    problem: &'a Problem,
    hypothesis: NStarHypothesis,
    max_branches: u64,
    deadline: Option<Instant>,
    branches: AtomicU64,
    exceeded: AtomicBool,
}

impl Driver<'_> {
    /// Count one branch; false once a limit is hit.
    fn tick(&self) -> bool {
        if self.exceeded.load(Ordering::Relaxed) {
            return false;
        }
        let b = self.branches.fetch_add(1, Ordering::Relaxed) + 1;
        let late = self.deadline.is_some_and(|d| b % 64 == 0 && Instant::now() > d);
        if b > self.max_branches || late {
            self.exceeded.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn dfs(&self, state: &ReconstructionState, out: &mut BTreeMap<CanonicalCertificate, FiniteSpace>) {
        if state.is_complete() {
            self.leaf(state, out);
            return;
        }
        for child in expand(self.problem, state, self.hypothesis) {
            if !self.tick() {
                return;
            }
            self.dfs(&child.state, out);
        }
    }

    fn leaf(&self, state: &ReconstructionState, out: &mut BTreeMap<CanonicalCertificate, FiniteSpace>) {
        let Some(space) = state.to_space() else {
            return;
        };
        if has_family(&space, &self.problem.certificates) {
            let cert = canonical_form(&space);
            if !out.contains_key(&cert) {
                let rep = representative(&space, &self.problem.certificates);
                out.insert(cert, rep);
            }
        }
    }
}

fn has_family(space: &FiniteSpace, certificates: &[CanonicalCertificate]) -> bool {
    let Ok(family) = quotient_family(space) else {
        return false;
    };
    let mut certs: Vec<_> = family.spaces().iter().map(canonical_form).collect();
    certs.sort();
    compare_certificates(&certs, certificates).is_equal()
}

/// The canonical labeling of `space`, with the first point that can play
/// `n` swapped into the last position.
pub(crate) fn representative(space: &FiniteSpace, certificates: &[CanonicalCertificate]) -> FiniteSpace {
    let canon = canonical_space(space);
    let n = canon.n();
    (1..=n)
        .rev()
        .map(|p| {
            let mut perm: Vec<usize> = (1..=n).collect();
            perm.swap(p - 1, n - 1);
            canon.permuted(&perm)
        })
        .find(|s| has_family(s, certificates))
        .unwrap_or(canon)
}

fn initial(problem: &Problem, hypothesis: NStarHypothesis) -> Vec<ReconstructionState> {
    let n = problem.n;
    let mut roots = Vec::new();
    if hypothesis != NStarHypothesis::Point {
        roots.push(ReconstructionState::root(n, false));
    }
    if hypothesis != NStarHypothesis::Full {
        roots.push(ReconstructionState::root(n, true));
    }
    roots
}

/// States after iteration 0, which only decides whether `{n}` is open.
pub fn initial_states(family: &QuotientFamily, hypothesis: NStarHypothesis) -> Vec<ReconstructionState> {
    initial(&Problem::new(family), hypothesis)
}

/// Whether `candidate` has exactly the given quotient family.
pub fn verify_candidate(candidate: &FiniteSpace, family: &QuotientFamily) -> bool {
    match quotient_family(candidate) {
        Ok(own) => crate::canon::family_equal(&own, family),
        Err(_) => false,
    }
}

/// Counts of new open k-sets (`k = state.k`) in the spaces not yet matched
/// with a point.
pub fn count_new_open_ksets(
    state: &ReconstructionState,
    family: &QuotientFamily,
) -> crate::Result<CaseCounts> {
    let problem = Problem::new(family);
    problem.counts(state, &state.known_opens())
}

/// Every configuration at iteration `state.k` for which some matching of
/// the new points with input spaces survives.
pub fn enumerate_configurations(
    state: &ReconstructionState,
    family: &QuotientFamily,
) -> Vec<Configuration> {
    let problem = Problem::new(family);
    let mut out: Vec<Configuration> = Vec::new();
    for child in expand(&problem, state, NStarHypothesis::Any) {
        if !out.contains(&child.config) {
            out.push(child.config);
        }
    }
    out
}

/// The states reached by applying `config` to `state`, one per admissible
/// matching of newly aged points with input spaces (one representative per
/// set of interchangeable spaces).
pub fn assign_old_spaces(
    config: &Configuration,
    state: &ReconstructionState,
    family: &QuotientFamily,
) -> Vec<ReconstructionState> {
    let problem = Problem::new(family);
    expand(&problem, state, NStarHypothesis::Any)
        .into_iter()
        .filter(|c| &c.config == config)
        .map(|c| c.state)
        .collect()
}

/// Configuration tags seen at iteration `k` over every surviving branch.
pub fn configurations_at(family: &QuotientFamily, k: usize) -> BTreeSet<ConfigTag> {
    let problem = Problem::new(family);
    let mut level = initial(&problem, NStarHypothesis::Any);
    let mut tags = BTreeSet::new();
    while let Some(first) = level.first() {
        if first.k > k {
            break;
        }
        let mut next = Vec::new();
        for s in &level {
            for child in expand(&problem, s, NStarHypothesis::Any) {
                if s.k == k {
                    tags.insert(child.config.tag);
                } else {
                    next.push(child.state);
                }
            }
        }
        if level[0].k == k {
            break;
        }
        level = next;
    }
    tags
}

/// Quantities used by the selection rules at iteration `state.k`.
pub fn discrimination_report(
    state: &ReconstructionState,
    family: &QuotientFamily,
) -> crate::Result<DiscriminationReport> {
    let counts = count_new_open_ksets(state, family)?;
    let k = state.k;
    let new_points = |space: &FiniteSpace| {
        let smaller = space
            .opens()
            .iter()
            .filter(|o| o.len() < k)
            .fold(PointSet::EMPTY, |acc, &o| acc | o);
        let at_k = space
            .opens()
            .iter()
            .filter(|o| o.len() == k)
            .fold(PointSet::EMPTY, |acc, &o| acc | o);
        (at_k - smaller).len()
    };
    let spaces = family.spaces();
    let with = |d: usize| -> Vec<usize> {
        counts
            .per_space
            .iter()
            .filter(|&&(_, c)| c == counts.s + d)
            .map(|&(j, _)| new_points(&spaces[j]))
            .collect()
    };
    let q = with(2).into_iter().max().unwrap_or(0);
    Ok(DiscriminationReport {
        k,
        p: with(1),
        p_prime: with(0),
        q,
        mu: q.saturating_sub(counts.mu3),
        expected_doublets: counts.s * counts.s.saturating_sub(1) / 2,
    })
}
