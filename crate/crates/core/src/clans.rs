//! Containment digraphs over open sets and the rooted clans inside them.
//!
//! Vertices are the non-empty open sets. There is an arc `β -> α` when `α`
//! covers `β` (no open set strictly between), except that `A` is never joined
//! to `A ∪ {n}`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::quotient::identify;
use crate::space::FiniteSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClanDigraph {
    n: usize,
    vertices: Vec<PointSet>,
    children: Vec<Vec<usize>>,
    paired: Vec<bool>,
}

/// Digraph with the `A -/-> A ∪ {n}` exception for the top point `n`.
pub fn build_digraph(space: &FiniteSpace) -> ClanDigraph {
    build(space, Some(space.n()))
}

/// Plain covering digraph without any distinguished point. Used for quotient
/// spaces, whose labels carry no special role.
pub fn build_plain_digraph(space: &FiniteSpace) -> ClanDigraph {
    build(space, None)
}

/// Digraph whose vertices are the distinct covering sets plus the full set,
/// with the same exception for `n`.
pub fn build_cover_digraph(space: &FiniteSpace) -> ClanDigraph {
    let mut vertices: Vec<PointSet> = space.covers().to_vec();
    vertices.push(space.full());
    vertices.sort();
    vertices.dedup();
    build_on(space, vertices, Some(space.n()))
}

fn build(space: &FiniteSpace, top: Option<usize>) -> ClanDigraph {
    let vertices: Vec<PointSet> = space
        .opens()
        .iter()
        .copied()
        .filter(|o| !o.is_empty())
        .collect();
    build_on(space, vertices, top)
}

fn build_on(space: &FiniteSpace, vertices: Vec<PointSet>, top: Option<usize>) -> ClanDigraph {
    let n = space.n();
    let mut children = vec![Vec::new(); vertices.len()];
    for (i, &b) in vertices.iter().enumerate() {
        for (j, &a) in vertices.iter().enumerate() {
            if !b.is_proper_subset(a) {
                continue;
            }
            if let Some(t) = top {
                if !b.contains(t) && a == b.with(t) {
                    continue;
                }
            }
            let between = vertices
                .iter()
                .any(|&g| b.is_proper_subset(g) && g.is_proper_subset(a));
            if !between {
                children[i].push(j);
            }
        }
    }
    let paired = vertices
        .iter()
        .map(|&v| {
            n > 0 && {
                let partner = if v.contains(n) { v.without(n) } else { v.with(n) };
                space.is_open(partner)
            }
        })
        .collect();
    ClanDigraph {
        n,
        vertices,
        children,
        paired,
    }
}

impl ClanDigraph {
    pub fn vertices(&self) -> &[PointSet] {
        &self.vertices
    }

    fn index(&self, v: PointSet) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// All arcs `(from, to)`, ordered by source then target.
    pub fn arcs(&self) -> Vec<(PointSet, PointSet)> {
        let mut out: Vec<(PointSet, PointSet)> = self
            .children
            .iter()
            .enumerate()
            .flat_map(|(i, cs)| cs.iter().map(move |&j| (i, j)))
            .map(|(i, j)| (self.vertices[i], self.vertices[j]))
            .collect();
        out.sort();
        out
    }

    pub fn has_arc(&self, from: PointSet, to: PointSet) -> bool {
        match (self.index(from), self.index(to)) {
            (Some(i), Some(j)) => self.children[i].contains(&j),
            _ => false,
        }
    }

    pub fn root_kind(&self, v: PointSet) -> RootKind {
        let paired = self.index(v).map(|i| self.paired[i]).unwrap_or(false);
        if paired {
            RootKind::Paired
        } else if v.contains(self.n) {
            RootKind::LowerNonPaired
        } else {
            RootKind::UpperNonPaired
        }
    }

    /// Graphviz rendering; vertex names are the sorted labels of each set.
    pub fn to_dot(&self) -> String {
        let name = |s: &PointSet| {
            let mut v: Vec<String> = s.points().map(|p| p.to_string()).collect();
            if v.is_empty() {
                v.push(String::new());
            }
            v.join(" ")
        };
        let mut order: Vec<PointSet> = self.vertices.clone();
        order.sort_by(|a, b| a.cmp_lex(b));
        let mut arcs = self.arcs();
        arcs.sort_by(|x, y| x.0.cmp_lex(&y.0).then_with(|| x.1.cmp_lex(&y.1)));
        let mut out = String::from("digraph clans {\n");
        for v in &order {
            writeln!(out, "  \"{}\";", name(v)).unwrap();
        }
        for (b, a) in arcs {
            writeln!(out, "  \"{}\" -> \"{}\";", name(&b), name(&a)).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RootKind {
    UpperNonPaired,
    LowerNonPaired,
    Paired,
}

/// A root together with all of its descendants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedClan {
    pub root: PointSet,
    /// Members in `(size, value)` order; the root is one of them.
    pub members: Vec<PointSet>,
    /// Arcs of the digraph between members.
    pub arcs: Vec<(PointSet, PointSet)>,
    pub root_kind: RootKind,
    full: PointSet,
}

impl RootedClan {
    /// Trivial when the root is the full set or its only descendant is.
    pub fn is_trivial(&self) -> bool {
        self.root == self.full || self.members.iter().all(|&m| m == self.root || m == self.full)
    }

    pub fn descendants(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.members.iter().copied().filter(move |&m| m != self.root)
    }
}

pub fn rooted_clan(digraph: &ClanDigraph, root: PointSet) -> Result<RootedClan> {
    let start = digraph.index(root).ok_or(Error::UnknownVertex(root))?;
    let mut seen = BTreeSet::new();
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for &j in &digraph.children[i] {
            if seen.insert(j) {
                stack.push(j);
            }
        }
    }
    let members: Vec<PointSet> = seen.iter().map(|&i| digraph.vertices[i]).collect();
    let mut arcs = Vec::new();
    for &i in &seen {
        for &j in &digraph.children[i] {
            arcs.push((digraph.vertices[i], digraph.vertices[j]));
        }
    }
    arcs.sort();
    Ok(RootedClan {
        root,
        members,
        arcs,
        root_kind: digraph.root_kind(root),
        full: PointSet::full(digraph.n),
    })
}

/// Every rooted clan of a digraph, one per vertex.
pub fn all_rooted_clans(digraph: &ClanDigraph) -> Vec<RootedClan> {
    digraph
        .vertices
        .iter()
        .map(|&v| rooted_clan(digraph, v).expect("vertex of its own digraph"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClanRelation {
    Isomorphic,
    Similar,
    Unrelated,
}

/// Isomorphic: digraphs isomorphic with matching set sizes. Similar: digraphs
/// isomorphic only.
pub fn compare_clans(a: &RootedClan, b: &RootedClan) -> ClanRelation {
    let sa: Vec<usize> = a.members.iter().map(|m| m.len()).collect();
    let sb: Vec<usize> = b.members.iter().map(|m| m.len()).collect();
    let ga = ShapeGraph::new(&a.members, &a.arcs);
    let gb = ShapeGraph::new(&b.members, &b.arcs);
    if ga.isomorphic(&gb, Some((&sa, &sb))) {
        ClanRelation::Isomorphic
    } else if ga.isomorphic(&gb, None) {
        ClanRelation::Similar
    } else {
        ClanRelation::Unrelated
    }
}

/// Small adjacency-matrix digraph used for exhaustive isomorphism tests.
pub(crate) struct ShapeGraph {
    adj: Vec<Vec<bool>>,
}

impl ShapeGraph {
    pub(crate) fn new(vertices: &[PointSet], arcs: &[(PointSet, PointSet)]) -> Self {
        let idx = |v: PointSet| vertices.iter().position(|&x| x == v).unwrap();
        let mut adj = vec![vec![false; vertices.len()]; vertices.len()];
        for &(b, a) in arcs {
            adj[idx(b)][idx(a)] = true;
        }
        ShapeGraph { adj }
    }

    fn degrees(&self, v: usize) -> (usize, usize) {
        let out = self.adj[v].iter().filter(|&&x| x).count();
        let inn = self.adj.iter().filter(|row| row[v]).count();
        (out, inn)
    }

    pub(crate) fn isomorphic(&self, other: &ShapeGraph, labels: Option<(&[usize], &[usize])>) -> bool {
        let n = self.adj.len();
        if n != other.adj.len() {
            return false;
        }
        let arcs = |g: &ShapeGraph| g.adj.iter().flatten().filter(|&&x| x).count();
        if arcs(self) != arcs(other) {
            return false;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend(other, labels, 0, &mut map, &mut used)
    }

    fn extend(
        &self,
        other: &ShapeGraph,
        labels: Option<(&[usize], &[usize])>,
        v: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = self.adj.len();
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] || self.degrees(v) != other.degrees(w) {
                continue;
            }
            if let Some((la, lb)) = labels {
                if la[v] != lb[w] {
                    continue;
                }
            }
            let consistent = (0..v).all(|u| {
                self.adj[u][v] == other.adj[map[u]][w] && self.adj[v][u] == other.adj[w][map[u]]
            }) && self.adj[v][v] == other.adj[w][w];
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if self.extend(other, labels, v + 1, map, used) {
                return true;
            }
            used[w] = false;
        }
        false
    }
}

/// Whether the clan of a lower system yields a similar clan in `Q^j`: every
/// member maps to an open set of the quotient, distinct members stay
/// distinct, and the images ordered by inclusion form the same digraph.
pub fn similar_clan_in_quotient(space: &FiniteSpace, clan: &RootedClan, j: usize) -> bool {
    let n = space.n();
    let quotient = match identify(space, j) {
        Ok(q) => q.space,
        Err(_) => return false,
    };
    let image = |m: PointSet| {
        let touched = m.contains(j) || m.contains(n);
        let s = m.without(n);
        if touched {
            s.with(j)
        } else {
            s
        }
    };
    let images: Vec<PointSet> = clan.members.iter().map(|&m| image(m)).collect();
    let distinct: BTreeSet<PointSet> = images.iter().copied().collect();
    if distinct.len() != images.len() || !images.iter().all(|&s| quotient.is_open(s)) {
        return false;
    }
    let mut sorted: Vec<PointSet> = distinct.into_iter().collect();
    sorted.sort();
    let hasse: Vec<(PointSet, PointSet)> = sorted
        .iter()
        .flat_map(|&b| sorted.iter().map(move |&a| (b, a)))
        .filter(|&(b, a)| {
            b.is_proper_subset(a)
                && !sorted
                    .iter()
                    .any(|&g| b.is_proper_subset(g) && g.is_proper_subset(a))
        })
        .collect();
    let mapped_arcs: Vec<(PointSet, PointSet)> = clan
        .arcs
        .iter()
        .map(|&(b, a)| (image(b), image(a)))
        .collect();
    let original = ShapeGraph::new(&images, &mapped_arcs);
    let observed = ShapeGraph::new(&images, &hasse);
    original.isomorphic(&observed, None)
}

/// Whether the clan appears unchanged in `Q^j`: each member, read as a set
/// of points other than `n`, avoids `j` and is open in the quotient.
pub fn clan_appears_in_quotient(space: &FiniteSpace, clan: &RootedClan, j: usize) -> bool {
    let n = space.n();
    let quotient = match identify(space, j) {
        Ok(q) => q.space,
        Err(_) => return false,
    };
    let full = space.full();
    clan.members
        .iter()
        .filter(|&&m| m != full)
        .map(|m| m.without(n))
        .all(|u| !u.contains(j) && quotient.is_open(u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ObservationStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObservationResult {
    pub observation: u8,
    pub status: ObservationStatus,
    pub checked: usize,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObservationReport {
    pub results: Vec<ObservationResult>,
}

impl ObservationReport {
    pub fn all_pass(&self) -> bool {
        self.results
            .iter()
            .all(|r| r.status != ObservationStatus::Fail)
    }

    pub fn get(&self, observation: u8) -> &ObservationResult {
        self.results
            .iter()
            .find(|r| r.observation == observation)
            .expect("observations 1-5 are always reported")
    }
}

fn result(observation: u8, checked: usize, witnesses: Vec<String>) -> ObservationResult {
    ObservationResult {
        observation,
        status: if witnesses.is_empty() {
            ObservationStatus::Pass
        } else {
            ObservationStatus::Fail
        },
        checked,
        witnesses,
    }
}

/// Evaluate the five clan observations on one space.
///
/// 1. A clan rooted at a lower non-paired system has only lower non-paired
///    members.
/// 2. Paired roots are split into two clans by construction; not checked.
/// 3. Upper non-paired roots admit members of every kind; checked as the
///    absence of any constraint, i.e. it always passes.
/// 4. A clan rooted at an upper non-paired system with no lower non-paired
///    member other than the full set appears unchanged in `Q^j` iff `j` lies
///    in no member other than the full set.
/// 5. A clan rooted at a lower non-paired system yields a similar clan in
///    `Q^j` iff `j` is in the root.
pub fn check_observations(space: &FiniteSpace) -> ObservationReport {
    let n = space.n();
    let full = space.full();
    let digraph = build_digraph(space);
    let clans = all_rooted_clans(&digraph);

    let mut obs1 = Vec::new();
    let mut obs4 = Vec::new();
    let mut obs5 = Vec::new();
    let (mut c1, mut c3, mut c4, mut c5) = (0, 0, 0, 0);

    for clan in &clans {
        match clan.root_kind {
            RootKind::LowerNonPaired => {
                c1 += 1;
                for &m in &clan.members {
                    if digraph.root_kind(m) != RootKind::LowerNonPaired {
                        obs1.push(format!("clan at {} contains {}", clan.root, m));
                    }
                }
                for j in 1..n {
                    c5 += 1;
                    let similar = similar_clan_in_quotient(space, clan, j);
                    if similar != clan.root.contains(j) {
                        obs5.push(format!(
                            "clan at {}: similar clan in Q^{} is {}",
                            clan.root, j, similar
                        ));
                    }
                }
            }
            RootKind::UpperNonPaired => {
                c3 += 1;
                let has_lower = clan
                    .members
                    .iter()
                    .any(|&m| m != full && digraph.root_kind(m) == RootKind::LowerNonPaired);
                if has_lower {
                    continue;
                }
                let support = clan
                    .members
                    .iter()
                    .filter(|&&m| m != full)
                    .fold(PointSet::EMPTY, |acc, &m| acc | m);
                for j in 1..n {
                    c4 += 1;
                    let appears = clan_appears_in_quotient(space, clan, j);
                    if appears == support.contains(j) {
                        obs4.push(format!(
                            "clan at {}: appears in Q^{} is {}",
                            clan.root, j, appears
                        ));
                    }
                }
            }
            RootKind::Paired => {}
        }
    }

    ObservationReport {
        results: vec![
            result(1, c1, obs1),
            ObservationResult {
                observation: 2,
                status: ObservationStatus::NotApplicable,
                checked: 0,
                witnesses: Vec::new(),
            },
            result(3, c3, Vec::new()),
            result(4, c4, obs4),
            result(5, c5, obs5),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    fn clan_example() -> FiniteSpace {
        FiniteSpace::from_covers(
            8,
            &[
                ps(&[1]),
                ps(&[2]),
                ps(&[1, 2, 3, 4]),
                ps(&[1, 2, 3, 4]),
                ps(&[1, 5]),
                ps(&[2, 6, 7]),
                ps(&[2, 6, 7]),
                PointSet::full(8),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eight_point_clan_arcs() {
        let t = clan_example();
        let g = build_cover_digraph(&t);
        assert!(g.has_arc(ps(&[1]), ps(&[1, 5])));
        assert!(g.has_arc(ps(&[1]), ps(&[1, 2, 3, 4])));
        assert!(g.has_arc(ps(&[2]), ps(&[2, 6, 7])));
        // Among all open sets {1,2} sits between {1} and {1,2,3,4}.
        let full = build_digraph(&t);
        assert!(!full.has_arc(ps(&[1]), ps(&[1, 2, 3, 4])));
        assert!(full.has_arc(ps(&[1]), ps(&[1, 2])));
    }

    #[test]
    fn exception_arc_is_dropped() {
        let t = FiniteSpace::generated_by(
            7,
            [ps(&[1, 2]), ps(&[1, 2, 7]), ps(&[3, 4]), ps(&[3, 4, 7])],
        )
        .unwrap();
        let g = build_digraph(&t);
        assert!(!g.has_arc(ps(&[1, 2]), ps(&[1, 2, 7])));
        let plain = build_plain_digraph(&t);
        assert!(plain.has_arc(ps(&[1, 2]), ps(&[1, 2, 7])));
    }

    #[test]
    fn indiscrete_digraph() {
        let g = build_digraph(&FiniteSpace::indiscrete(4));
        assert_eq!(g.vertices(), &[PointSet::full(4)]);
        assert!(g.arcs().is_empty());
        let clan = rooted_clan(&g, PointSet::full(4)).unwrap();
        assert!(clan.is_trivial());
        assert!(rooted_clan(&g, ps(&[1])).is_err());
    }

    #[test]
    fn covering_set_clans_are_similar() {
        let g = build_cover_digraph(&clan_example());
        let c1 = rooted_clan(&g, ps(&[1])).unwrap();
        let c2 = rooted_clan(&g, ps(&[2])).unwrap();
        assert_eq!(
            c1.members,
            vec![ps(&[1]), ps(&[1, 5]), ps(&[1, 2, 3, 4]), PointSet::full(8)]
        );
        assert_eq!(
            c2.members,
            vec![ps(&[2]), ps(&[2, 6, 7]), ps(&[1, 2, 3, 4]), PointSet::full(8)]
        );
        assert_eq!(compare_clans(&c1, &c2), ClanRelation::Similar);
        assert_eq!(compare_clans(&c1, &c1), ClanRelation::Isomorphic);
        assert!(!c1.is_trivial());
        assert!(rooted_clan(&g, PointSet::full(8)).unwrap().is_trivial());
    }

    #[test]
    fn chain_vs_single_vertex() {
        let t = FiniteSpace::new(4, [ps(&[1]), ps(&[1, 2])]).unwrap();
        let g = build_digraph(&t);
        let chain = rooted_clan(&g, ps(&[1, 2])).unwrap();
        let single = rooted_clan(&g, PointSet::full(4)).unwrap();
        assert_eq!(chain.members.len(), 2);
        assert_eq!(compare_clans(&chain, &single), ClanRelation::Unrelated);
    }

    #[test]
    fn lower_clan_reappears_in_root_quotients() {
        let t3 = FiniteSpace::new(5, [ps(&[1, 2, 5]), ps(&[1, 2, 3, 5])]).unwrap();
        let g = build_digraph(&t3);
        let clan = rooted_clan(&g, ps(&[1, 2, 5])).unwrap();
        assert_eq!(clan.root_kind, RootKind::LowerNonPaired);
        let hits: Vec<usize> = (1..5)
            .filter(|&j| similar_clan_in_quotient(&t3, &clan, j))
            .collect();
        assert_eq!(hits, vec![1, 2]);
        assert!(check_observations(&t3).all_pass());
    }

    #[test]
    fn discrete_space_passes() {
        let report = check_observations(&FiniteSpace::discrete(4));
        assert!(report.all_pass());
        assert_eq!(report.get(2).status, ObservationStatus::NotApplicable);
    }

    #[test]
    fn dot_output_is_deterministic() {
        // {1,2} -> {1,2,3} is an A -> An arc and is left out.
        let t = FiniteSpace::new(3, [ps(&[1]), ps(&[1, 2])]).unwrap();
        let dot = build_digraph(&t).to_dot();
        assert_eq!(
            dot,
            "digraph clans {\n  \"1\";\n  \"1 2\";\n  \"1 2 3\";\n  \"1\" -> \"1 2\";\n}\n"
        );
    }
}
