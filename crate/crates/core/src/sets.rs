//! Small finite sets of positive integer labels, backed by a `u64` bitmask.
//!
//! Labels are restricted to `1..=64`; everything in this crate (leaf labels,
//! subset indices, surjection domains) lives inside that range, which keeps
//! set algebra branch-free and cheap inside the exhaustive sweeps.

use std::fmt;

use crate::{Error, Result};

/// Largest label a [`Subset`] can hold.
pub const MAX_LABEL: u32 = 64;

/// A set of labels drawn from `1..=64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset {
    bits: u64,
}

impl Subset {
    pub const EMPTY: Subset = Subset { bits: 0 };

    pub fn from_bits(bits: u64) -> Subset {
        Subset { bits }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// `{1, …, n}`.
    pub fn range(n: u32) -> Result<Subset> {
        if n > MAX_LABEL {
            return Err(Error::invalid_input(format!(
                "label range 1..={n} exceeds the supported maximum {MAX_LABEL}"
            )));
        }
        if n == 64 {
            return Ok(Subset { bits: u64::MAX });
        }
        Ok(Subset {
            bits: (1u64 << n) - 1,
        })
    }

    pub fn singleton(label: u32) -> Result<Subset> {
        Subset::from_labels([label])
    }

    pub fn from_labels<I: IntoIterator<Item = u32>>(labels: I) -> Result<Subset> {
        let mut bits = 0u64;
        for l in labels {
            if l == 0 || l > MAX_LABEL {
                return Err(Error::invalid_input(format!(
                    "label {l} out of the supported range 1..={MAX_LABEL}"
                )));
            }
            bits |= 1u64 << (l - 1);
        }
        Ok(Subset { bits })
    }

    pub fn labels(self) -> impl Iterator<Item = u32> {
        (0..64u32).filter_map(move |i| {
            if self.bits & (1u64 << i) != 0 {
                Some(i + 1)
            } else {
                None
            }
        })
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, label: u32) -> bool {
        label >= 1 && label <= MAX_LABEL && self.bits & (1u64 << (label - 1)) != 0
    }

    pub fn min(self) -> Option<u32> {
        if self.bits == 0 {
            None
        } else {
            Some(self.bits.trailing_zeros() + 1)
        }
    }

    pub fn insert(&mut self, label: u32) {
        debug_assert!(label >= 1 && label <= MAX_LABEL);
        self.bits |= 1u64 << (label - 1);
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset {
            bits: self.bits | other.bits,
        }
    }

    pub fn inter(self, other: Subset) -> Subset {
        Subset {
            bits: self.bits & other.bits,
        }
    }

    pub fn minus(self, other: Subset) -> Subset {
        Subset {
            bits: self.bits & !other.bits,
        }
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_proper_subset_of(self, other: Subset) -> bool {
        self.is_subset_of(other) && self.bits != other.bits
    }

    pub fn is_disjoint_from(self, other: Subset) -> bool {
        self.bits & other.bits == 0
    }

    /// Inclusion-or-disjointness: the compatibility relation behind nested
    /// collections.
    pub fn nested_with(self, other: Subset) -> bool {
        self.is_subset_of(other) || other.is_subset_of(self) || self.is_disjoint_from(other)
    }

    /// All subsets of `self` with at least `min_len` elements, ordered by
    /// (size, lexicographic label list).
    pub fn subsets_with_at_least(self, min_len: usize) -> Vec<Subset> {
        let members: Vec<u32> = self.labels().collect();
        let n = members.len();
        let mut out: Vec<Subset> = Vec::new();
        for mask in 0u64..(1u64 << n) {
            if (mask.count_ones() as usize) < min_len {
                continue;
            }
            let mut bits = 0u64;
            for (i, l) in members.iter().enumerate() {
                if mask & (1u64 << i) != 0 {
                    bits |= 1u64 << (l - 1);
                }
            }
            out.push(Subset { bits });
        }
        out.sort_by_key(|s| (s.len(), s.bits_lex_key()));
        out
    }

    /// Sort key giving lexicographic order on the sorted label list.
    /// Reversing the bit pattern makes smaller labels most significant;
    /// complementing flips the comparison so that containing a smaller label
    /// sorts earlier.
    fn bits_lex_key(self) -> u64 {
        !self.bits.reverse_bits()
    }

    /// Canonical text key: sorted labels joined by commas, e.g. `"1,2,4"`.
    pub fn key(self) -> String {
        let mut s = String::new();
        for (i, l) in self.labels().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&l.to_string());
        }
        s
    }

    /// Parse a `"1,2,4"`-style key.
    pub fn parse_key(key: &str) -> Result<Subset> {
        let trimmed = key.trim();
        if trimmed.is_empty() {
            return Ok(Subset::EMPTY);
        }
        let mut labels = Vec::new();
        for part in trimmed.split(',') {
            let l: u32 = part
                .trim()
                .parse()
                .map_err(|_| Error::invalid_input(format!("bad subset key component {part:?}")))?;
            labels.push(l);
        }
        Subset::from_labels(labels)
    }

    /// Order subsets by size, then lexicographically on their label lists.
    pub fn size_lex_cmp(self, other: Subset) -> std::cmp::Ordering {
        (self.len(), self.bits_lex_key()).cmp(&(other.len(), other.bits_lex_key()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Subset) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Subsets order by size, then lexicographically — the enumeration order
/// used throughout, so ordered maps keyed by subsets iterate canonically.
impl Ord for Subset {
    fn cmp(&self, other: &Subset) -> std::cmp::Ordering {
        self.size_lex_cmp(*other)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A surjective map between two label sets, the index bookkeeping behind
/// every composition operation in this crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surjection {
    domain: Subset,
    codomain: Subset,
    /// `map[l - 1]` is the image of label `l` (0 where `l` is outside the domain).
    map: Vec<u32>,
}

impl Surjection {
    pub fn new<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Result<Surjection> {
        let mut map = vec![0u32; MAX_LABEL as usize];
        let mut domain = Subset::EMPTY;
        let mut codomain = Subset::EMPTY;
        for (from, to) in pairs {
            if from == 0 || from > MAX_LABEL || to == 0 || to > MAX_LABEL {
                return Err(Error::invalid_input(format!(
                    "surjection pair ({from} -> {to}) outside the label range 1..={MAX_LABEL}"
                )));
            }
            if domain.contains(from) {
                return Err(Error::invalid_input(format!(
                    "label {from} mapped twice in surjection"
                )));
            }
            domain.insert(from);
            codomain.insert(to);
            map[(from - 1) as usize] = to;
        }
        if domain.is_empty() {
            return Err(Error::invalid_input("empty surjection"));
        }
        Ok(Surjection {
            domain,
            codomain,
            map,
        })
    }

    /// Parse the CLI form `"1,1,2"`: position `i` holds the image of `i`.
    /// The images must fill an initial range `1..=n`.
    pub fn parse(text: &str) -> Result<Surjection> {
        let mut pairs = Vec::new();
        for (i, part) in text.trim().split(',').enumerate() {
            let to: u32 = part.trim().parse().map_err(|_| {
                Error::invalid_input(format!("bad surjection component {part:?}"))
            })?;
            pairs.push((i as u32 + 1, to));
        }
        let q = Surjection::new(pairs)?;
        let n = q.codomain.len() as u32;
        if q.codomain != Subset::range(n)? {
            return Err(Error::invalid_input(format!(
                "surjection images {} do not fill 1..={n}",
                q.codomain
            )));
        }
        Ok(q)
    }

    pub fn identity(set: Subset) -> Surjection {
        let mut map = vec![0u32; MAX_LABEL as usize];
        for l in set.labels() {
            map[(l - 1) as usize] = l;
        }
        Surjection {
            domain: set,
            codomain: set,
            map,
        }
    }

    pub fn domain(&self) -> Subset {
        self.domain
    }

    pub fn codomain(&self) -> Subset {
        self.codomain
    }

    pub fn apply(&self, label: u32) -> u32 {
        debug_assert!(self.domain.contains(label), "label {label} not in domain");
        self.map[(label - 1) as usize]
    }

    pub fn fiber(&self, target: u32) -> Subset {
        let mut f = Subset::EMPTY;
        for l in self.domain.labels() {
            if self.apply(l) == target {
                f.insert(l);
            }
        }
        f
    }

    /// `(target, fiber)` pairs in increasing target order.
    pub fn fibers(&self) -> Vec<(u32, Subset)> {
        self.codomain.labels().map(|r| (r, self.fiber(r))).collect()
    }

    pub fn image_of(&self, s: Subset) -> Subset {
        let mut out = Subset::EMPTY;
        for l in s.labels() {
            if self.domain.contains(l) {
                out.insert(self.apply(l));
            }
        }
        out
    }

    pub fn preimage_of(&self, s: Subset) -> Subset {
        let mut out = Subset::EMPTY;
        for l in self.domain.labels() {
            if s.contains(self.apply(l)) {
                out.insert(l);
            }
        }
        out
    }

    /// Restriction to a subset of the domain; the codomain shrinks to the image.
    pub fn restrict(&self, to: Subset) -> Result<Surjection> {
        if !to.is_subset_of(self.domain) {
            return Err(Error::invalid_input(format!(
                "cannot restrict surjection to {to}: not inside domain {}",
                self.domain
            )));
        }
        Surjection::new(to.labels().map(|l| (l, self.apply(l))))
    }

    /// `self ∘ inner` (apply `inner` first).
    pub fn compose(&self, inner: &Surjection) -> Result<Surjection> {
        if inner.codomain != self.domain {
            return Err(Error::invalid_input(format!(
                "surjection composition mismatch: inner codomain {} vs outer domain {}",
                inner.codomain, self.domain
            )));
        }
        Surjection::new(inner.domain.labels().map(|l| (l, self.apply(inner.apply(l)))))
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.len() == self.codomain.len()
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Result<Surjection> {
        if !self.is_bijective() {
            return Err(Error::invalid_input(
                "cannot invert a non-bijective surjection",
            ));
        }
        Surjection::new(self.domain.labels().map(|l| (self.apply(l), l)))
    }

    /// All surjections from `domain` onto `codomain`, in lexicographic order
    /// of their value lists.
    pub fn enumerate(domain: Subset, codomain: Subset) -> Vec<Surjection> {
        let dom: Vec<u32> = domain.labels().collect();
        let cod: Vec<u32> = codomain.labels().collect();
        let mut out = Vec::new();
        if cod.len() > dom.len() {
            return out;
        }
        let mut values = vec![0u32; dom.len()];
        fn rec(
            dom: &[u32],
            cod: &[u32],
            pos: usize,
            values: &mut Vec<u32>,
            hit: &mut Vec<bool>,
            missing: usize,
            out: &mut Vec<Surjection>,
        ) {
            let remaining = dom.len() - pos;
            if missing > remaining {
                return; // cannot reach surjectivity any more
            }
            if pos == dom.len() {
                let pairs: Vec<(u32, u32)> =
                    dom.iter().cloned().zip(values.iter().cloned()).collect();
                out.push(Surjection::new(pairs).expect("enumerated surjection is valid"));
                return;
            }
            for (ci, &c) in cod.iter().enumerate() {
                values[pos] = c;
                let newly = !hit[ci];
                hit[ci] = true;
                rec(
                    dom,
                    cod,
                    pos + 1,
                    values,
                    hit,
                    if newly { missing - 1 } else { missing },
                    out,
                );
                if newly {
                    hit[ci] = false;
                }
            }
        }
        let mut hit = vec![false; cod.len()];
        rec(&dom, &cod, 0, &mut values, &mut hit, cod.len(), &mut out);
        out
    }

    /// One representative surjection per unordered partition of `domain` into
    /// `k` blocks for every `1 <= k <= |domain|`: blocks are numbered by
    /// ascending minimum, so every surjection is `relabel ∘ representative`.
    pub fn enumerate_partition_representatives(domain: Subset) -> Vec<Surjection> {
        let dom: Vec<u32> = domain.labels().collect();
        let mut out = Vec::new();
        // Restricted-growth strings enumerate set partitions canonically.
        fn rec(dom: &[u32], pos: usize, blocks: &mut Vec<u32>, max_used: u32, out: &mut Vec<Surjection>) {
            if pos == dom.len() {
                let pairs: Vec<(u32, u32)> = dom
                    .iter()
                    .cloned()
                    .zip(blocks.iter().map(|b| b + 1))
                    .collect();
                out.push(Surjection::new(pairs).expect("partition surjection is valid"));
                return;
            }
            for b in 0..=max_used {
                blocks.push(b);
                rec(dom, pos + 1, blocks, max_used.max(b + 1), out);
                blocks.pop();
            }
        }
        rec(&dom, 0, &mut Vec::new(), 0, &mut out);
        out
    }
}

impl fmt::Debug for Surjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.domain.labels().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}->{}", self.apply(l))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Surjection {
    /// The parseable value-list form `"1,1,2"` when the domain is `1..=m`;
    /// explicit `label>value` pairs otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let contiguous = self.domain
            == Subset::range(self.domain.len() as u32).unwrap_or(Subset::EMPTY);
        for (i, l) in self.domain.labels().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if contiguous {
                write!(f, "{}", self.apply(l))?;
            } else {
                write!(f, "{l}>{}", self.apply(l))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_and_labels() {
        let s = Subset::range(4).unwrap();
        assert_eq!(s.labels().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.key(), "1,2,3,4");
    }

    #[test]
    fn key_round_trip() {
        let s = Subset::from_labels([4, 1, 2]).unwrap();
        assert_eq!(s.key(), "1,2,4");
        assert_eq!(Subset::parse_key("1,2,4").unwrap(), s);
        assert_eq!(Subset::parse_key("").unwrap(), Subset::EMPTY);
        assert!(Subset::parse_key("0").is_err());
        assert!(Subset::parse_key("x").is_err());
    }

    #[test]
    fn nestedness_relation() {
        let a = Subset::from_labels([1, 2]).unwrap();
        let b = Subset::from_labels([1, 2, 3]).unwrap();
        let c = Subset::from_labels([3, 4]).unwrap();
        let d = Subset::from_labels([2, 3]).unwrap();
        assert!(a.nested_with(b));
        assert!(a.nested_with(c));
        assert!(!a.nested_with(d));
    }

    #[test]
    fn subset_enumeration_order() {
        let all = Subset::range(3).unwrap().subsets_with_at_least(2);
        let keys: Vec<String> = all.iter().map(|s| s.key()).collect();
        assert_eq!(keys, vec!["1,2", "1,3", "2,3", "1,2,3"]);
    }

    #[test]
    fn label_bounds() {
        assert!(Subset::from_labels([65]).is_err());
        assert!(Subset::from_labels([0]).is_err());
        assert!(Subset::range(65).is_err());
        assert_eq!(Subset::range(64).unwrap().len(), 64);
    }

    #[test]
    fn surjection_basics() {
        let q = Surjection::parse("1,1,2").unwrap();
        assert_eq!(q.domain(), Subset::range(3).unwrap());
        assert_eq!(q.codomain(), Subset::range(2).unwrap());
        assert_eq!(q.fiber(1), Subset::from_labels([1, 2]).unwrap());
        assert_eq!(q.fiber(2), Subset::from_labels([3]).unwrap());
        assert!(Surjection::parse("1,3").is_err()); // image skips 2
        assert!(Surjection::parse("").is_err());
    }

    #[test]
    fn surjection_compose_restrict() {
        let p = Surjection::parse("1,1,2,3").unwrap();
        let q = Surjection::parse("1,1,2").unwrap();
        let qp = q.compose(&p).unwrap();
        assert_eq!(qp.apply(1), 1);
        assert_eq!(qp.apply(3), 1);
        assert_eq!(qp.apply(4), 2);
        let r = p.restrict(Subset::from_labels([1, 2, 4]).unwrap()).unwrap();
        assert_eq!(r.codomain(), Subset::from_labels([1, 3]).unwrap());
    }

    #[test]
    fn surjection_counts() {
        // Surjections [4] -> [2]: 2^4 - 2 = 14.
        let s = Surjection::enumerate(Subset::range(4).unwrap(), Subset::range(2).unwrap());
        assert_eq!(s.len(), 14);
        // Partition representatives of a 4-set: Bell(4) = 15.
        let reps = Surjection::enumerate_partition_representatives(Subset::range(4).unwrap());
        assert_eq!(reps.len(), 15);
        for q in &reps {
            // Blocks numbered by ascending minimum.
            let mins: Vec<u32> = q.fibers().into_iter().map(|(_, f)| f.min().unwrap()).collect();
            assert!(mins.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
