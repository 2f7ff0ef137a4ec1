//! Canonical certificates and homeomorphism tests.
//!
//! Points are coloured by their position in the specialization preorder and
//! the colouring is refined until stable. Remaining ties are broken by
//! individualizing one point of the first non-singleton cell and refining
//! again; every leaf of that search is a labeling and the lexicographically
//! smallest relation encoding wins. Points that are interchangeable twins are
//! branched on only once.

use std::cmp::Ordering;
use std::fmt;

use crate::pointset::PointSet;
use crate::quotient::QuotientFamily;
use crate::space::FiniteSpace;

/// Label-independent encoding of a space: equal iff the spaces are
/// homeomorphic.
///
/// Layout: point count (1 byte), number of open sets (4 bytes, big-endian),
/// then each open set under the canonical labeling as a big-endian `u64`,
/// sorted by `(size, value)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCertificate(Vec<u8>);

impl CanonicalCertificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Decode the canonical representative back into a space.
    pub fn to_space(&self) -> FiniteSpace {
        let n = self.0[0] as usize;
        let count = u32::from_be_bytes(self.0[1..5].try_into().unwrap()) as usize;
        let opens = (0..count)
            .map(|i| {
                let at = 5 + 8 * i;
                PointSet::from_bits(u64::from_be_bytes(self.0[at..at + 8].try_into().unwrap()))
            })
            .collect();
        FiniteSpace::from_sorted_unchecked(n, opens)
    }
}

impl fmt::Debug for CanonicalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

struct Search<'a> {
    n: usize,
    down: &'a [u64],
    up: Vec<u64>,
    twins: Vec<u64>,
    best_key: Option<Vec<u64>>,
    best_labeling: Vec<usize>,
}

impl Search<'_> {
    fn refine(&self, colors: &mut Vec<u32>) {
        let mut cells = count_cells(colors);
        loop {
            let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..self.n)
                .map(|a| {
                    let mut below = neighbour_colors(self.down[a] & !(1 << a), colors);
                    let mut above = neighbour_colors(self.up[a] & !(1 << a), colors);
                    below.sort_unstable();
                    above.sort_unstable();
                    (colors[a], below, above)
                })
                .collect();
            *colors = rank(&sigs);
            let now = count_cells(colors);
            if now == cells {
                return;
            }
            cells = now;
        }
    }

    fn run(&mut self, colors: Vec<u32>) {
        if count_cells(&colors) == self.n {
            self.leaf(&colors);
            return;
        }
        // First non-singleton cell, by colour.
        let mut sizes = vec![0usize; self.n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = (0..self.n).find(|&c| sizes[c] > 1).unwrap() as u32;
        let mut tried: u64 = 0;
        for a in 0..self.n {
            if colors[a] != target || self.twins[a] & tried != 0 {
                continue;
            }
            tried |= 1 << a;
            let sigs: Vec<(u32, u8)> = (0..self.n)
                .map(|x| (colors[x], if x == a { 0 } else { 1 }))
                .collect();
            let mut next = rank(&sigs);
            self.refine(&mut next);
            self.run(next);
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let labeling: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let mut key = vec![0u64; self.n];
        for a in 0..self.n {
            let mut bits = 0u64;
            let mut d = self.down[a];
            while d != 0 {
                let b = d.trailing_zeros() as usize;
                d &= d - 1;
                bits |= 1 << labeling[b];
            }
            key[labeling[a]] = bits;
        }
        let better = match &self.best_key {
            None => true,
            Some(best) => key.cmp(best) == Ordering::Less,
        };
        if better {
            self.best_key = Some(key);
            self.best_labeling = labeling;
        }
    }
}

fn neighbour_colors(mut set: u64, colors: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(set.count_ones() as usize);
    while set != 0 {
        let b = set.trailing_zeros() as usize;
        set &= set - 1;
        out.push(colors[b]);
    }
    out
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
    let mut distinct: Vec<T> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    sigs.iter()
        .map(|s| distinct.binary_search(s).unwrap() as u32)
        .collect()
}

fn count_cells(colors: &[u32]) -> usize {
    let mut seen: Vec<u32> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// A relabeling `p -> labeling[p - 1]` taking `space` to its canonical form.
pub fn canonical_labeling(space: &FiniteSpace) -> Vec<usize> {
    let n = space.n();
    if n == 0 {
        return Vec::new();
    }
    let down: Vec<u64> = space.covers().iter().map(|c| c.bits()).collect();
    let mut up = vec![0u64; n];
    for (a, &d) in down.iter().enumerate() {
        let mut bits = d;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            up[b] |= 1 << a;
        }
    }
    let mut twins = vec![0u64; n];
    for a in 0..n {
        for b in 0..n {
            let ab = (1u64 << a) | (1u64 << b);
            if a != b
                && down[a] & !ab == down[b] & !ab
                && up[a] & !ab == up[b] & !ab
                && (down[a] >> b & 1) == (down[b] >> a & 1)
            {
                twins[a] |= 1 << b;
            }
        }
    }
    let mut search = Search {
        n,
        down: &down,
        up,
        twins,
        best_key: None,
        best_labeling: Vec::new(),
    };
    let initial: Vec<(u32, u32)> = (0..n)
        .map(|a| (down[a].count_ones(), search.up[a].count_ones()))
        .collect();
    let mut colors = rank(&initial);
    search.refine(&mut colors);
    search.run(colors);
    search.best_labeling.iter().map(|&l| l + 1).collect()
}

/// The canonical representative of the homeomorphism class of `space`.
pub fn canonical_space(space: &FiniteSpace) -> FiniteSpace {
    space.permuted(&canonical_labeling(space))
}

/// Certificate of the homeomorphism class of `space`.
pub fn canonical_form(space: &FiniteSpace) -> CanonicalCertificate {
    let canon = canonical_space(space);
    let mut bytes = Vec::with_capacity(5 + 8 * canon.opens().len());
    bytes.push(canon.n() as u8);
    bytes.extend_from_slice(&(canon.opens().len() as u32).to_be_bytes());
    for o in canon.opens() {
        bytes.extend_from_slice(&o.bits().to_be_bytes());
    }
    CanonicalCertificate(bytes)
}

pub fn is_homeomorphic(a: &FiniteSpace, b: &FiniteSpace) -> bool {
    a.n() == b.n() && a.opens().len() == b.opens().len() && canonical_form(a) == canonical_form(b)
}

/// Sorted certificates of the members of a family.
pub fn family_certificates(family: &QuotientFamily) -> Vec<CanonicalCertificate> {
    let mut certs: Vec<_> = family.spaces().iter().map(canonical_form).collect();
    certs.sort();
    certs
}

/// Outcome of comparing two quotient families as multisets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyComparison {
    Equal,
    /// Same shape, but at least one member has no homeomorphic partner.
    Different { unmatched: usize },
    SizeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
}

impl FamilyComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, FamilyComparison::Equal)
    }
}

impl fmt::Display for FamilyComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyComparison::Equal => f.write_str("equal"),
            FamilyComparison::Different { unmatched } => {
                write!(f, "{unmatched} member(s) without a homeomorphic partner")
            }
            FamilyComparison::SizeMismatch { left, right } => write!(
                f,
                "size mismatch: {} spaces on {} points vs {} spaces on {} points",
                left.0, left.1, right.0, right.1
            ),
        }
    }
}

pub fn compare_families(a: &QuotientFamily, b: &QuotientFamily) -> FamilyComparison {
    if a.len() != b.len() || a.points() != b.points() {
        return FamilyComparison::SizeMismatch {
            left: (a.len(), a.points()),
            right: (b.len(), b.points()),
        };
    }
    compare_certificates(&family_certificates(a), &family_certificates(b))
}

pub(crate) fn compare_certificates(
    left: &[CanonicalCertificate],
    right: &[CanonicalCertificate],
) -> FamilyComparison {
    let (mut i, mut j, mut matched) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        match left[i].cmp(&right[j]) {
            Ordering::Equal => {
                matched += 1;
                i += 1;
                j += 1;
            }
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
        }
    }
    if matched == left.len() {
        FamilyComparison::Equal
    } else {
        FamilyComparison::Different {
            unmatched: left.len() - matched,
        }
    }
}

/// Multiset equality of two families up to homeomorphism.
pub fn family_equal(a: &QuotientFamily, b: &QuotientFamily) -> bool {
    compare_families(a, b).is_equal()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::quotient_family;

    fn ps(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    fn space(n: usize, opens: &[&[usize]]) -> FiniteSpace {
        FiniteSpace::new(n, opens.iter().map(|o| ps(o))).unwrap()
    }

    #[test]
    fn relabeled_spaces_are_homeomorphic() {
        // The listed sets generate the two topologies.
        let t1 = FiniteSpace::generated_by(3, [ps(&[1]), ps(&[2]), ps(&[2, 3])]).unwrap();
        let t2 = FiniteSpace::generated_by(3, [ps(&[1, 3]), ps(&[2]), ps(&[2, 3])]).unwrap();
        assert_eq!(canonical_form(&t1), canonical_form(&t2));
    }

    #[test]
    fn sierpinski_vs_indiscrete() {
        let s = space(2, &[&[1]]);
        let i = FiniteSpace::indiscrete(2);
        assert_ne!(canonical_form(&s), canonical_form(&i));
        assert_eq!(canonical_form(&s), canonical_form(&s));
        assert!(!is_homeomorphic(&s, &i));
    }

    #[test]
    fn triple_block_topologies_differ() {
        let t = space(7, &[&[1, 2, 3], &[4, 5, 6], &[1, 2, 3, 4, 5, 6]]);
        let t_prime = space(7, &[&[1, 2, 3], &[1, 2, 3, 7]]);
        assert!(!is_homeomorphic(&t, &t_prime));
    }

    #[test]
    fn permuted_copy_is_homeomorphic() {
        let t = FiniteSpace::generated_by(5, [ps(&[1]), ps(&[1, 2]), ps(&[1, 3]), ps(&[4])]).unwrap();
        let p = t.permuted(&[3, 5, 1, 2, 4]);
        assert!(is_homeomorphic(&t, &p));
        assert_eq!(canonical_space(&t), canonical_space(&p));
    }

    #[test]
    fn certificate_decodes_to_canonical_space() {
        let t = space(4, &[&[2], &[2, 3], &[1, 2, 3]]);
        let cert = canonical_form(&t);
        let back = cert.to_space();
        assert!(is_homeomorphic(&back, &t));
        assert_eq!(canonical_form(&back), cert);
        assert_eq!(cert.to_hex().len(), cert.as_bytes().len() * 2);
    }

    #[test]
    fn discrete_space_is_fast_and_stable() {
        let d = FiniteSpace::discrete(12);
        let c = canonical_form(&d);
        assert_eq!(c, canonical_form(&d.permuted(&[12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1])));
    }

    #[test]
    fn family_equality_examples() {
        let t1 = space(5, &[&[1, 2]]);
        let t2 = space(5, &[&[1, 2, 5]]);
        let f1 = quotient_family(&t1).unwrap();
        let f2 = quotient_family(&t2).unwrap();
        assert!(family_equal(&f1, &f2));

        let mut members = f1.spaces().to_vec();
        members[0] = FiniteSpace::discrete(4);
        let changed = QuotientFamily::new(members).unwrap();
        assert_eq!(
            compare_families(&f1, &changed),
            FamilyComparison::Different { unmatched: 1 }
        );
        let small = quotient_family(&FiniteSpace::discrete(3)).unwrap();
        assert!(matches!(
            compare_families(&f1, &small),
            FamilyComparison::SizeMismatch { .. }
        ));
    }

    #[test]
    fn seven_point_families_agree() {
        let t_prime = FiniteSpace::from_covers(
            7,
            &[
                ps(&[1, 2]),
                ps(&[1, 2]),
                ps(&[3, 4]),
                ps(&[3, 4]),
                ps(&[5, 6]),
                ps(&[5, 6]),
                PointSet::full(7),
            ],
        )
        .unwrap();
        let t_second =
            FiniteSpace::generated_by(7, [ps(&[1, 2]), ps(&[1, 2, 7]), ps(&[3, 4]), ps(&[3, 4, 7])])
                .unwrap();
        assert!(family_equal(
            &quotient_family(&t_prime).unwrap(),
            &quotient_family(&t_second).unwrap()
        ));
    }
}
