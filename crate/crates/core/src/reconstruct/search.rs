//! One iteration of the reconstruction: find every way the new k-systems
//! can look, and every way to match the newly aged points with input spaces.

use std::collections::HashMap;
use std::sync::Mutex;

use super::config::{CaseCounts, ConfigTag, Configuration, NPlacement, SystemBlock};
use super::matcher::{embeds, Prediction};
use super::state::ReconstructionState;
use super::NStarHypothesis;
use crate::canon::{canonical_form, CanonicalCertificate};
use crate::pointset::PointSet;
use crate::quotient::QuotientFamily;
use crate::space::FiniteSpace;

/// The input family grouped into homeomorphism classes, with a cache of
/// embedding tests.
pub(crate) struct Problem {
    pub n: usize,
    pub m: usize,
    pub inputs: Vec<FiniteSpace>,
    pub class_of: Vec<usize>,
    pub class_reps: Vec<usize>,
    pub certificates: Vec<CanonicalCertificate>,
    cache: Mutex<HashMap<(usize, usize, Prediction), bool>>,
}

impl Problem {
    pub fn new(family: &QuotientFamily) -> Self {
        let inputs = family.spaces().to_vec();
        let certs: Vec<CanonicalCertificate> = inputs.iter().map(canonical_form).collect();
        let mut distinct: Vec<CanonicalCertificate> = certs.clone();
        distinct.sort();
        distinct.dedup();
        let class_of: Vec<usize> = certs
            .iter()
            .map(|c| distinct.binary_search(c).unwrap())
            .collect();
        let class_reps = (0..distinct.len())
            .map(|c| class_of.iter().position(|&x| x == c).unwrap())
            .collect();
        let mut certificates = certs;
        certificates.sort();
        Problem {
            n: family.target_points(),
            m: family.points(),
            inputs,
            class_of,
            class_reps,
            certificates,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn classes(&self) -> usize {
        self.class_reps.len()
    }

    fn matches(&self, class: usize, k: usize, pred: &Prediction) -> bool {
        let key = (class, k, pred.clone());
        if let Some(&hit) = self.cache.lock().unwrap().get(&key) {
            return hit;
        }
        let result = embeds(pred, &self.inputs[self.class_reps[class]], k);
        self.cache.lock().unwrap().insert(key, result);
        result
    }

    /// Inputs not yet matched with a placed point, per class.
    fn remaining(&self, state: &ReconstructionState) -> Vec<usize> {
        let mut rem = vec![0; self.classes()];
        let mut used = vec![false; self.inputs.len()];
        for &j in &state.old_assignment {
            used[j] = true;
        }
        for (j, &u) in used.iter().enumerate() {
            if !u {
                rem[self.class_of[j]] += 1;
            }
        }
        rem
    }

    /// New open k-sets of every unmatched input.
    pub fn counts(&self, state: &ReconstructionState, known: &[PointSet]) -> crate::Result<CaseCounts> {
        let k = state.k;
        let n = self.n;
        let old = known
            .iter()
            .filter(|u| !u.contains(n) && u.len() == k)
            .count();
        let mut used = vec![false; self.inputs.len()];
        for &j in &state.old_assignment {
            used[j] = true;
        }
        let mut per_space = Vec::new();
        for (j, space) in self.inputs.iter().enumerate() {
            if used[j] {
                continue;
            }
            let observed = space.opens().iter().filter(|o| o.len() == k).count();
            if observed < old {
                return Err(crate::Error::MissingOldSets { k });
            }
            per_space.push((j, observed - old));
        }
        CaseCounts::from_counts(k, per_space)
    }
}

/// Predicted small and large open sets of `Q^p` (or of any still-new point
/// when `point` is `None`).
fn prediction(known: &[PointSet], point: Option<usize>, n: usize, k: usize) -> Prediction {
    let mut exact = Vec::new();
    let mut extra = Vec::new();
    for &u in known {
        let s = match point {
            Some(i) => {
                if u.contains(i) != u.contains(n) {
                    continue;
                }
                u.without(n)
            }
            None => {
                if u.contains(n) {
                    continue;
                }
                u
            }
        };
        if s.len() <= k {
            exact.push(s);
        } else {
            extra.push(s);
        }
    }
    exact.sort();
    exact.dedup();
    extra.sort();
    extra.dedup();
    Prediction { exact, extra }
}

/// A raw new system before labels are handed out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    lower: bool,
    a: PointSet,
    size: usize,
}

pub(crate) struct Child {
    pub config: Configuration,
    pub state: ReconstructionState,
}

/// All children of `state`: each admissible configuration at iteration
/// `state.k` together with each admissible matching of its new points.
pub(crate) fn expand(
    problem: &Problem,
    state: &ReconstructionState,
    hypothesis: NStarHypothesis,
) -> Vec<Child> {
    let k = state.k;
    let (n, m) = (problem.n, problem.m);
    if k > m || state.is_complete() {
        return Vec::new();
    }
    let known = state.known_opens();
    let counts = match problem.counts(state, &known) {
        Ok(c) => c,
        Err(_) => return Vec::new(),
    };
    let observed = counts.multiset();
    let capacity = m - state.t_k();

    let upper_a: Vec<PointSet> = known
        .iter()
        .copied()
        .filter(|u| !u.contains(n) && u.len() < k)
        .collect();
    let lower_a: Vec<PointSet> = match state.n_star {
        Some(_) => known
            .iter()
            .copied()
            .filter(|u| u.contains(n) && u.len() - 1 < k)
            .map(|u| u.without(n))
            .collect(),
        None => Vec::new(),
    };
    let full_m = PointSet::full(m);

    let mut out = Vec::new();
    let upper_shapes: Vec<Shape> = upper_a
        .iter()
        .map(|&a| Shape {
            lower: false,
            a,
            size: k - a.len(),
        })
        .collect();
    for uppers in multisets(&upper_shapes, capacity) {
        let used: usize = uppers.iter().map(|s| s.size).sum();
        let left = capacity - used;
        let mut options: Vec<(Vec<Shape>, Placement)> = Vec::new();
        if state.n_star.is_some() {
            let lower_shapes: Vec<Shape> = lower_a
                .iter()
                .map(|&a| Shape {
                    lower: true,
                    a,
                    size: k - a.len(),
                })
                .collect();
            for lowers in multisets(&lower_shapes, left) {
                options.push((lowers, Placement::Earlier));
            }
        } else {
            if k < m {
                options.push((Vec::new(), Placement::Unsettled));
            }
            for &d in known.iter().filter(|u| !u.contains(n) && u.len() == k) {
                if hypothesis == NStarHypothesis::Full && d != full_m {
                    continue;
                }
                options.push((Vec::new(), Placement::OldLower(d)));
            }
            let mut seen = Vec::new();
            for (idx, s) in uppers.iter().enumerate() {
                if seen.contains(s) {
                    continue;
                }
                seen.push(*s);
                if hypothesis == NStarHypothesis::Full && s.a.len() + s.size != m {
                    continue;
                }
                options.push((Vec::new(), Placement::PairedWith(idx)));
            }
            for &a in &upper_a {
                let size = k - a.len();
                if size > left {
                    continue;
                }
                if hypothesis == NStarHypothesis::Full && k != m {
                    continue;
                }
                options.push((
                    vec![Shape {
                        lower: true,
                        a,
                        size,
                    }],
                    Placement::JoinsLower,
                ));
            }
        }
        for (lowers, placement) in options {
            build_children(problem, state, &uppers, &lowers, placement, &observed, &mut out);
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum Placement {
    Earlier,
    Unsettled,
    OldLower(PointSet),
    PairedWith(usize),
    JoinsLower,
}

/// Multisets of shapes (as sorted lists) whose sizes sum to at most `cap`.
fn multisets(shapes: &[Shape], cap: usize) -> Vec<Vec<Shape>> {
    fn rec(shapes: &[Shape], start: usize, cap: usize, cur: &mut Vec<Shape>, out: &mut Vec<Vec<Shape>>) {
        out.push(cur.clone());
        for i in start..shapes.len() {
            if shapes[i].size <= cap {
                cur.push(shapes[i]);
                rec(shapes, i, cap - shapes[i].size, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(shapes, 0, cap, &mut Vec::new(), &mut out);
    out
}

fn build_children(
    problem: &Problem,
    state: &ReconstructionState,
    uppers: &[Shape],
    lowers: &[Shape],
    placement: Placement,
    observed: &[usize],
    out: &mut Vec<Child>,
) {
    let (n, m, k) = (problem.n, problem.m, state.k);
    let mut next = state.next_label;
    let mut blocks: Vec<(Shape, SystemBlock)> = Vec::new();
    for &s in uppers.iter().chain(lowers) {
        let r = PointSet::from_points(next..next + s.size);
        next += s.size;
        blocks.push((s, SystemBlock { a: s.a, r }));
    }
    let n_star = match placement {
        Placement::Earlier => state.n_star,
        Placement::Unsettled => None,
        Placement::OldLower(d) => Some(d.with(n)),
        Placement::PairedWith(i) => Some((blocks[i].1.a | blocks[i].1.r).with(n)),
        Placement::JoinsLower => {
            let b = blocks.last().unwrap().1;
            Some((b.a | b.r).with(n))
        }
    };
    let mut upper_systems = Vec::new();
    let mut paired_systems = Vec::new();
    let mut lower_systems = Vec::new();
    let mut kinds = Vec::new();
    for &(s, b) in &blocks {
        let kind = if s.lower {
            lower_systems.push(b);
            2
        } else if n_star.is_some_and(|ns| ns.without(n).is_subset(b.a | b.r)) {
            paired_systems.push(b);
            1
        } else {
            upper_systems.push(b);
            0
        };
        kinds.push(kind);
    }
    let new_points = next - state.next_label;
    let rest = m - state.t_k() - new_points;
    let n_placement = match placement {
        Placement::Earlier => NPlacement::Earlier,
        Placement::Unsettled => NPlacement::Unsettled,
        Placement::OldLower(d) => NPlacement::OldLower(d),
        Placement::PairedWith(i) => NPlacement::PairedWith(blocks[i].1),
        Placement::JoinsLower => NPlacement::JoinsLower(blocks.last().unwrap().1),
    };
    // T shows up in every quotient, so it counts as paired for the tag.
    let whole = lower_systems.iter().filter(|b| (b.a | b.r).len() == m).count();
    let config = Configuration {
        k,
        tag: ConfigTag::classify(
            upper_systems.len(),
            paired_systems.len() + whole,
            lower_systems.len() - whole,
            rest,
        ),
        upper_systems,
        paired_systems,
        lower_systems,
        n_placement,
        rest,
    };
    if config.predicted_counts() != observed {
        return;
    }

    let mut covers = state.covers.clone();
    let mut levels = state.levels.clone();
    for &(s, b) in &blocks {
        let mut cover = b.a | b.r;
        if s.lower {
            cover = cover.with(n);
        }
        for _ in 0..b.r.len() {
            covers.push(cover);
            levels.push(k);
        }
    }
    let child_base = ReconstructionState {
        n,
        k: k + 1,
        covers,
        levels,
        n_star,
        x_prev: PointSet::full(next - 1),
        y_k: PointSet::from_points(state.next_label..next),
        old_assignment: state.old_assignment.clone(),
        next_label: next,
        history: {
            let mut h = state.history.clone();
            h.push(config.clone());
            h
        },
    };
    let known = child_base.known_opens();

    for p in 1..state.next_label {
        let class = problem.class_of[state.old_assignment[p - 1]];
        if !problem.matches(class, k, &prediction(&known, Some(p), n, k)) {
            return;
        }
    }
    let common = prediction(&known, None, n, k);
    let remaining = problem.remaining(state);
    let mut need = 0;
    let mut must: Vec<usize> = vec![0; problem.classes()];
    for c in 0..problem.classes() {
        if remaining[c] > 0 && !problem.matches(c, k, &common) {
            must[c] = remaining[c];
            need += remaining[c];
        }
    }
    if need > new_points {
        return;
    }

    // Per block: classes its points may take.
    let mut allowed: Vec<Vec<usize>> = Vec::new();
    for &(_, b) in &blocks {
        let p = b.r.min_point().unwrap();
        let pred = prediction(&known, Some(p), n, k);
        let cls: Vec<usize> = (0..problem.classes())
            .filter(|&c| remaining[c] > 0 && problem.matches(c, k, &pred))
            .collect();
        if cls.is_empty() {
            return;
        }
        allowed.push(cls);
    }
    let twin_of_prev: Vec<bool> = (0..blocks.len())
        .map(|i| i > 0 && blocks[i].0 == blocks[i - 1].0 && kinds[i] == kinds[i - 1])
        .collect();

    let mut assignment: Vec<Vec<usize>> = Vec::new();
    let mut avail = remaining.clone();
    let sizes: Vec<usize> = blocks.iter().map(|(s, _)| s.size).collect();
    let mut results: Vec<Vec<Vec<usize>>> = Vec::new();
    assign_blocks(
        &sizes,
        &allowed,
        &twin_of_prev,
        &mut avail,
        &must,
        0,
        &mut assignment,
        &mut results,
    );

    for blocks_classes in results {
        let mut child = child_base.clone();
        let mut used = vec![false; problem.inputs.len()];
        for &j in &child.old_assignment {
            used[j] = true;
        }
        for classes in &blocks_classes {
            for &c in classes {
                let j = (0..problem.inputs.len())
                    .find(|&j| !used[j] && problem.class_of[j] == c)
                    .unwrap();
                used[j] = true;
                child.old_assignment.push(j);
            }
        }
        out.push(Child {
            config: config.clone(),
            state: child,
        });
    }
}

/// Choose, for each block, a nondecreasing list of classes. Consecutive
/// identical blocks take lexicographically nondecreasing lists. Classes in
/// `must` have to be used up entirely by the end.
#[allow(clippy::too_many_arguments)]
fn assign_blocks(
    sizes: &[usize],
    allowed: &[Vec<usize>],
    twin_of_prev: &[bool],
    avail: &mut Vec<usize>,
    must: &[usize],
    block: usize,
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if block == sizes.len() {
        let ok = must
            .iter()
            .zip(avail.iter())
            .all(|(&need, &left)| need == 0 || left == 0);
        if ok {
            out.push(current.clone());
        }
        return;
    }
    let mut list = Vec::with_capacity(sizes[block]);
    pick(
        sizes, allowed, twin_of_prev, avail, must, block, current, out, &mut list, 0,
    );
}

#[allow(clippy::too_many_arguments)]
fn pick(
    sizes: &[usize],
    allowed: &[Vec<usize>],
    twin_of_prev: &[bool],
    avail: &mut Vec<usize>,
    must: &[usize],
    block: usize,
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
    list: &mut Vec<usize>,
    from: usize,
) {
    if list.len() == sizes[block] {
        if twin_of_prev[block] && current.last().is_some_and(|prev| prev > list) {
            return;
        }
        current.push(list.clone());
        assign_blocks(sizes, allowed, twin_of_prev, avail, must, block + 1, current, out);
        current.pop();
        return;
    }
    for idx in from..allowed[block].len() {
        let c = allowed[block][idx];
        if avail[c] == 0 {
            continue;
        }
        avail[c] -= 1;
        list.push(c);
        pick(
            sizes, allowed, twin_of_prev, avail, must, block, current, out, list, idx,
        );
        list.pop();
        avail[c] += 1;
    }
}
