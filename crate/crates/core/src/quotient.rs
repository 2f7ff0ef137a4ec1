//! Identification of point `n` with another point, and quotient families.

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::FiniteSpace;

/// The space obtained by identifying `merged_label` with the top point `n`.
///
/// The carrier is `{1, ..., n-1}` and the class `{i, n}` keeps the label `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientResult {
    pub space: FiniteSpace,
    pub merged_label: usize,
}

/// Identify point `i` with point `n` of `space`.
pub fn identify(space: &FiniteSpace, i: usize) -> Result<QuotientResult> {
    let n = space.n();
    if n < 2 || i == 0 || i >= n {
        return Err(Error::BadIdentification { point: i, n });
    }
    // A set S of the quotient is open iff its preimage is open; preimages
    // are exactly the open sets that contain both or neither of i and n.
    let mut opens: Vec<PointSet> = space
        .opens()
        .iter()
        .filter(|u| u.contains(i) == u.contains(n))
        .map(|u| u.without(n))
        .collect();
    opens.sort();
    opens.dedup();
    Ok(QuotientResult {
        space: FiniteSpace::from_sorted_unchecked(n - 1, opens),
        merged_label: i,
    })
}

/// The problem input: `n - 1` spaces on `n - 1` points, known only up to
/// homeomorphism. Member order is irrelevant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientFamily {
    points: usize,
    spaces: Vec<FiniteSpace>,
}

impl QuotientFamily {
    /// Wrap a list of spaces, checking that there are `m` spaces on `m`
    /// points each.
    pub fn new(spaces: Vec<FiniteSpace>) -> Result<Self> {
        let points = spaces.first().map(FiniteSpace::n).unwrap_or(0);
        if points == 0 {
            return Err(Error::TooFewPoints(points + 1));
        }
        if spaces.len() != points || spaces.iter().any(|s| s.n() != points) {
            let found = spaces.iter().filter(|s| s.n() == points).count();
            return Err(Error::FamilyShape {
                expected: points,
                points,
                found: if spaces.len() != points {
                    spaces.len()
                } else {
                    found
                },
            });
        }
        Ok(QuotientFamily { points, spaces })
    }

    /// Number of points of each member (`n - 1`).
    pub fn points(&self) -> usize {
        self.points
    }

    /// Number of points of the spaces being reconstructed.
    pub fn target_points(&self) -> usize {
        self.points + 1
    }

    pub fn spaces(&self) -> &[FiniteSpace] {
        &self.spaces
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }
}

/// The quotient family `{identify(space, i) : i = 1..n-1}`.
pub fn quotient_family(space: &FiniteSpace) -> Result<QuotientFamily> {
    let n = space.n();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let spaces = (1..n)
        .map(|i| identify(space, i).map(|q| q.space))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuotientFamily {
        points: n - 1,
        spaces,
    })
}

/// Whether a set avoiding `n` is open in the quotient identifying `i` with `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientOpenness {
    OpenInQuotient,
    NotOpen,
}

/// Decide openness of `a` in the quotient `Q^i` from the openness of `a` and
/// `a ∪ {n}` in the source space, without building the quotient.
pub fn characterize_set(space: &FiniteSpace, a: PointSet, i: usize) -> Result<QuotientOpenness> {
    let n = space.n();
    if n < 2 || i == 0 || i >= n {
        return Err(Error::BadIdentification { point: i, n });
    }
    let lower = PointSet::full(n - 1);
    if !a.is_subset(lower) || a == lower {
        return Err(Error::BadCharacterizationSet(a));
    }
    let a_open = space.is_open(a);
    let an_open = space.is_open(a.with(n));
    let open = match (a_open, an_open) {
        (true, true) => true,
        (true, false) => !a.contains(i),
        // With the merged class labelled i, (A - {i}) ∪ {z} is written A.
        (false, true) => a.contains(i),
        (false, false) => false,
    };
    Ok(if open {
        QuotientOpenness::OpenInQuotient
    } else {
        QuotientOpenness::NotOpen
    })
}
