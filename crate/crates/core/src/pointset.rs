//! Bitmask subsets of the point labels `1..=64`.

use std::cmp::Ordering;
use std::fmt;

/// Largest supported number of points.
pub const MAX_POINTS: usize = 64;

/// A subset of `{1, ..., n}` stored as one machine word.
///
/// Label `p` lives in bit `p - 1`. The derived ordering is by
/// `(size, numeric value)`, which is the storage order used throughout the
/// crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The full set `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_POINTS, "at most {MAX_POINTS} points are supported");
        if n == 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        assert!((1..=MAX_POINTS).contains(&p), "point label {p} out of range");
        PointSet(1u64 << (p - 1))
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        points
            .into_iter()
            .fold(PointSet::EMPTY, |acc, p| acc.with(p))
    }

    pub fn contains(self, p: usize) -> bool {
        (1..=MAX_POINTS).contains(&p) && self.0 & (1u64 << (p - 1)) != 0
    }

    pub fn with(self, p: usize) -> Self {
        self | PointSet::singleton(p)
    }

    pub fn without(self, p: usize) -> Self {
        if (1..=MAX_POINTS).contains(&p) {
            PointSet(self.0 & !(1u64 << (p - 1)))
        } else {
            self
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: PointSet) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn is_disjoint(self, other: PointSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Largest label present, if any.
    pub fn max_point(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(64 - self.0.leading_zeros() as usize)
        }
    }

    /// Smallest label present, if any.
    pub fn min_point(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize + 1)
        }
    }

    /// Labels in increasing order.
    pub fn points(self) -> Points {
        Points(self.0)
    }

    /// Image under a point map given as `map[p - 1]`.
    pub fn map(self, map: &[usize]) -> PointSet {
        self.points().fold(PointSet::EMPTY, |acc, p| acc.with(map[p - 1]))
    }

    /// Compare by `(size, lexicographic label list)`; the order used when
    /// writing spaces out.
    pub fn cmp_lex(&self, other: &PointSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.points().cmp(other.points()))
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::BitOr for PointSet {
    type Output = PointSet;
    fn bitor(self, rhs: PointSet) -> PointSet {
        PointSet(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for PointSet {
    type Output = PointSet;
    fn bitand(self, rhs: PointSet) -> PointSet {
        PointSet(self.0 & rhs.0)
    }
}

impl std::ops::Sub for PointSet {
    type Output = PointSet;
    fn sub(self, rhs: PointSet) -> PointSet {
        PointSet(self.0 & !rhs.0)
    }
}

impl std::ops::BitOrAssign for PointSet {
    fn bitor_assign(&mut self, rhs: PointSet) {
        self.0 |= rhs.0;
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        PointSet::from_points(iter)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, p) in self.points().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over the labels of a [`PointSet`].
#[derive(Clone)]
pub struct Points(u64);

impl Iterator for Points {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(tz + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Points {}

/// All subsets of `set`, including the empty set and `set` itself.
pub fn subsets(set: PointSet) -> impl Iterator<Item = PointSet> {
    let mask = set.bits();
    let mut sub = 0u64;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = PointSet::from_bits(sub);
        if sub == mask {
            done = true;
        } else {
            sub = (sub.wrapping_sub(mask)) & mask;
        }
        Some(out)
    })
}

/// Serialized as the sorted list of labels.
impl serde::Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.points())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = PointSet::from_points([1, 2]);
        let b = PointSet::from_points([2, 3]);
        assert_eq!(a | b, PointSet::from_points([1, 2, 3]));
        assert_eq!(a & b, PointSet::singleton(2));
        assert_eq!(a - b, PointSet::singleton(1));
        assert!(PointSet::singleton(2).is_proper_subset(a));
        assert_eq!(a.max_point(), Some(2));
        assert_eq!(PointSet::EMPTY.max_point(), None);
        assert_eq!(PointSet::full(64).len(), 64);
        assert!(PointSet::full(64).contains(64));
        assert_eq!(format!("{}", PointSet::from_points([3, 1])), "{1,3}");
    }

    #[test]
    fn orders_differ_only_within_size() {
        let a = PointSet::from_points([1, 4]);
        let b = PointSet::from_points([2, 3]);
        assert_eq!(a.cmp(&b), Ordering::Greater);
        assert_eq!(a.cmp_lex(&b), Ordering::Less);
        assert!(PointSet::singleton(5) < a);
    }

    #[test]
    fn subsets_enumerates_powerset() {
        let s = PointSet::from_points([1, 3, 4]);
        let all: Vec<_> = subsets(s).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|x| x.is_subset(s)));
        assert_eq!(subsets(PointSet::EMPTY).count(), 1);
    }
}
