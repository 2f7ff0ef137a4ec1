use proptest::prelude::*;

use quotopo_core::format::{parse_space, write_space};
use quotopo_core::oracle::{enumerate_topologies, oracle_reconstruct, EnumerationMode};
use quotopo_core::properties::check_all;
use quotopo_core::quotient::QuotientOpenness;
use quotopo_core::*;

/// A random preorder: reflexive, random relations, transitively closed.
fn random_space(n: usize, bits: &[u64]) -> FiniteSpace {
    let mut covers: Vec<PointSet> = (1..=n)
        .map(|p| {
            let raw = PointSet::from_bits(bits[p - 1] & PointSet::full(n).bits());
            raw.with(p)
        })
        .collect();
    loop {
        let next: Vec<PointSet> = covers
            .iter()
            .map(|c| c.points().fold(*c, |acc, q| acc | covers[q - 1]))
            .collect();
        if next == covers {
            break;
        }
        covers = next;
    }
    FiniteSpace::from_covers(n, &covers).unwrap()
}

fn space_strategy(max: usize) -> impl Strategy<Value = FiniteSpace> {
    (1..=max).prop_flat_map(|n| {
        // Sparse relations give varied shapes instead of mostly indiscrete ones.
        prop::collection::vec(any::<u64>().prop_map(|a| a & a.rotate_left(17) & a.rotate_left(31)), n)
            .prop_map(move |bits| random_space(n, &bits))
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn certificate_ignores_labels((space, perm) in space_strategy(8).prop_flat_map(|s| {
        let n = s.n();
        (Just(s), permutation(n))
    })) {
        let moved = space.permuted(&perm);
        prop_assert_eq!(canonical_form(&space), canonical_form(&moved));
        prop_assert!(is_homeomorphic(&space, &moved));
        prop_assert_eq!(canonical_space(&space), canonical_space(&moved));
    }

    #[test]
    fn characterization_matches_preimage(space in space_strategy(5)) {
        let n = space.n();
        prop_assume!(n >= 2);
        let lower = PointSet::full(n - 1);
        for i in 1..n {
            let q = identify(&space, i).unwrap().space;
            for bits in 0..lower.bits() {
                let a = PointSet::from_bits(bits);
                let open = characterize_set(&space, a, i).unwrap() == QuotientOpenness::OpenInQuotient;
                prop_assert_eq!(open, q.is_open(a), "A = {:?}, i = {}", a, i);
            }
        }
    }

    #[test]
    fn open_iff_covers_inside(space in space_strategy(6)) {
        let full = space.full();
        for bits in 0..=full.bits() {
            let u = PointSet::from_bits(bits);
            let by_covers = u.points().all(|p| space.cover(p).is_subset(u));
            prop_assert_eq!(space.is_open(u), by_covers);
        }
        prop_assert_eq!(&space.covering_table().regenerate().unwrap(), &space);
    }

    #[test]
    fn text_round_trip(space in space_strategy(8)) {
        prop_assert_eq!(parse_space(&write_space(&space)).unwrap(), space);
    }

    #[test]
    fn rebuilds_random_spaces(space in space_strategy(6)) {
        prop_assume!(space.n() >= 2);
        let family = quotient_family(&space).unwrap();
        let got = reconstruct(&family);
        prop_assert_eq!(got.status, SearchStatus::Complete);
        prop_assert!(got.contains(&space));
        for rep in got.spaces() {
            prop_assert!(verify_candidate(rep, &family));
        }
        prop_assert_eq!(got.certificates(), oracle_reconstruct(&family).unwrap().certificates());
    }

    #[test]
    fn structural_facts_hold(space in space_strategy(7)) {
        prop_assert_eq!(check_all(&space), Vec::new());
    }
}

#[test]
fn every_four_point_topology_is_rebuilt() {
    for space in enumerate_topologies(4, EnumerationMode::Labeled).unwrap() {
        let family = quotient_family(&space).unwrap();
        assert!(reconstruct(&family).contains(&space));
    }
}

#[test]
fn reconstruction_is_deterministic() {
    let family = quotient_family(&FiniteSpace::generated_by(6, [PointSet::from_points([1, 2, 3])]).unwrap()).unwrap();
    let a = reconstruct(&family);
    let b = reconstruct_with(&family, &ReconstructOptions { threads: 3, ..Default::default() });
    assert_eq!(a.solutions, b.solutions);
}
