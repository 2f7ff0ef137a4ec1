use std::collections::BTreeSet;

use quotopo_core::oracle::oracle_reconstruct;
use quotopo_core::reconstruct::{configurations_at, count_new_open_ksets, initial_states, Case, ConfigTag, NStarHypothesis};
use quotopo_core::*;

fn ps(points: &[usize]) -> PointSet {
    PointSet::from_points(points.iter().copied())
}

fn space(n: usize, opens: &[&[usize]]) -> FiniteSpace {
    FiniteSpace::new(n, opens.iter().map(|o| ps(o))).unwrap()
}

fn family(spaces: Vec<FiniteSpace>) -> QuotientFamily {
    QuotientFamily::new(spaces).unwrap()
}

fn tags(list: &[ConfigTag]) -> BTreeSet<ConfigTag> {
    list.iter().copied().collect()
}

fn four_point() -> QuotientFamily {
    family(vec![
        space(3, &[&[1]]),
        space(3, &[&[1]]),
        space(3, &[&[1], &[2], &[1, 2]]),
    ])
}

#[test]
fn four_point_solutions() {
    let got = reconstruct(&four_point());
    assert_eq!(got.status, SearchStatus::Complete);
    // {1,2,3} is not a union of smaller open sets, so it is optional.
    assert_eq!(got.len(), 2);
    assert!(got.contains(&space(4, &[&[1], &[2], &[1, 2], &[1, 2, 3]])));
    assert!(got.contains(&space(4, &[&[1], &[2], &[1, 2]])));
    assert_eq!(got.certificates(), oracle_reconstruct(&four_point()).unwrap().certificates());
    assert_eq!(configurations_at(&four_point(), 1), tags(&[ConfigTag::C3a]));
}

#[test]
fn four_point_counts_at_first_level() {
    let fam = four_point();
    for state in initial_states(&fam, NStarHypothesis::Any) {
        let counts = count_new_open_ksets(&state, &fam).unwrap();
        assert_eq!((counts.s, counts.mu1, counts.mu2, counts.mu3), (1, 2, 1, 0));
        assert_eq!(counts.case, Case::Three);
    }
}

#[test]
fn indiscrete_family_is_case_one() {
    let fam = family(vec![FiniteSpace::indiscrete(3); 3]);
    let state = &initial_states(&fam, NStarHypothesis::Full)[0];
    let counts = count_new_open_ksets(state, &fam).unwrap();
    assert_eq!((counts.s, counts.mu1, counts.case), (0, 3, Case::One));
}

#[test]
fn three_points_first_level_ambiguity() {
    let fam = family(vec![space(2, &[&[1]]), FiniteSpace::indiscrete(2)]);
    let got = reconstruct(&fam);
    assert!(got.contains(&space(3, &[&[1]])));
    assert!(got.contains(&space(3, &[&[1, 3]])));
    let seen = configurations_at(&fam, 1);
    assert!(seen.is_superset(&tags(&[ConfigTag::C3a, ConfigTag::C3d])), "{seen:?}");
}

#[test]
fn doublet_family_offers_three_configurations() {
    let fam = family(vec![space(4, &[&[1, 2]]); 4]);
    let seen = configurations_at(&fam, 2);
    assert_eq!(seen, tags(&[ConfigTag::C1a, ConfigTag::C1b, ConfigTag::C1d]));
    let got = reconstruct(&fam);
    assert!(got.contains(&space(5, &[&[1, 2], &[3, 4], &[1, 2, 3, 4]])));
    assert!(got.contains(&space(5, &[&[1, 2], &[1, 2, 5]])));
    assert!(got.contains(&space(5, &[&[5], &[1, 2, 5], &[3, 4, 5], &[1, 2, 3, 4, 5]])));
}

#[test]
fn triple_block_solutions() {
    let fam = family(vec![space(6, &[&[1, 2, 3]]); 6]);
    let got = reconstruct(&fam);
    assert_eq!(got.status, SearchStatus::Complete);
    for t in [
        space(7, &[&[1, 2, 3], &[4, 5, 6], &[1, 2, 3, 4, 5, 6]]),
        space(7, &[&[1, 2, 3], &[1, 2, 3, 7]]),
        space(7, &[&[1, 2, 3], &[1, 2, 3, 7], &[1, 2, 3, 4, 5, 6]]),
    ] {
        assert!(got.contains(&t), "{t:?}");
    }
}

#[test]
fn nonexistence_family() {
    let three = FiniteSpace::generated_by(4, [ps(&[1]), ps(&[2]), ps(&[3])]).unwrap();
    let fam = family(vec![FiniteSpace::indiscrete(4), three.clone(), three.clone(), three]);
    let got = reconstruct(&fam);
    assert_eq!(got.status, SearchStatus::Complete);
    assert!(got.is_empty());
    assert!(oracle_reconstruct(&fam).unwrap().is_empty());
}

#[test]
fn solutions_verify_and_are_distinct() {
    let fam = family(vec![space(4, &[&[1, 2]]); 4]);
    let got = reconstruct(&fam);
    let spaces: Vec<&FiniteSpace> = got.spaces().collect();
    for (i, a) in spaces.iter().enumerate() {
        assert!(verify_candidate(a, &fam));
        for b in &spaces[i + 1..] {
            assert!(!is_homeomorphic(a, b));
        }
    }
}

#[test]
fn branch_limit_is_reported() {
    let fam = family(vec![space(6, &[&[1, 2, 3]]); 6]);
    let options = ReconstructOptions { max_branches: 3, ..Default::default() };
    assert_eq!(reconstruct_with(&fam, &options).status, SearchStatus::LimitExceeded);
}

#[test]
fn hypotheses_split_the_answer() {
    let fam = family(vec![space(4, &[&[1, 2]]); 4]);
    let all = reconstruct(&fam).certificates();
    let full = reconstruct_with(&fam, &ReconstructOptions { n_star: NStarHypothesis::Full, ..Default::default() });
    let point = reconstruct_with(&fam, &ReconstructOptions { n_star: NStarHypothesis::Point, ..Default::default() });
    assert!(full.certificates().is_subset(&all));
    assert!(point.certificates().is_subset(&all));
    assert!(full.contains(&space(5, &[&[1, 2], &[3, 4], &[1, 2, 3, 4]])));
    assert!(point.contains(&space(5, &[&[5], &[1, 2, 5], &[3, 4, 5], &[1, 2, 3, 4, 5]])));
}
