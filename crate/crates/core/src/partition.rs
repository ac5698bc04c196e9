//! Canonical set partitions of `{0, .., n-1}`.
//!
//! A [`Partition`] is always held in canonical form: items sorted inside each
//! part, parts sorted by their smallest item. Structural equality on the
//! canonical form is therefore partition equality, and the derived `Ord` is
//! the canonical-form lexicographic order used everywhere a deterministic
//! enumeration or tie-break is required.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("empty ground set")]
    EmptyGroundSet,
    #[error("empty part")]
    EmptyPart,
    #[error("item {item} out of range for ground set of size {n}")]
    OutOfRange { item: usize, n: usize },
    #[error("overlapping parts (item {item})")]
    Overlap { item: usize },
    #[error("item {item} missing from partition")]
    Missing { item: usize },
    #[error("ground-set mismatch ({left} vs {right})")]
    GroundSetMismatch { left: usize, right: usize },
    #[error("meet of an empty list of partitions")]
    EmptyMeet,
    #[error("partition has {parts} parts, exceeding the cap of {cap}")]
    TooManyParts { parts: usize, cap: usize },
    #[error("unparseable partition literal '{0}'")]
    Unparseable(String),
}

/// A partition of `{0, .., n-1}` into nonempty, pairwise disjoint parts
/// whose union is the whole ground set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    parts: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    /// Builds a partition from arbitrary part lists, canonicalizing the
    /// representation and rejecting empty parts, out-of-range items,
    /// overlaps, and gaps.
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        if n == 0 {
            return Err(PartitionError::EmptyGroundSet);
        }
        let mut seen = vec![false; n];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(parts.len());
        for part in parts {
            if part.is_empty() {
                return Err(PartitionError::EmptyPart);
            }
            let mut p = part;
            p.sort_unstable();
            for &item in &p {
                if item >= n {
                    return Err(PartitionError::OutOfRange { item, n });
                }
                if seen[item] {
                    return Err(PartitionError::Overlap { item });
                }
                seen[item] = true;
            }
            canon.push(p);
        }
        if let Some(item) = seen.iter().position(|&s| !s) {
            return Err(PartitionError::Missing { item });
        }
        canon.sort_unstable();
        Ok(Partition { parts: canon, n })
    }

    /// The one-part partition `{I}` (every item pooled).
    pub fn whole(n: usize) -> Self {
        assert!(n > 0, "ground set must be nonempty");
        Partition {
            parts: vec![(0..n).collect()],
            n,
        }
    }

    /// The all-singletons partition (full information).
    pub fn singletons(n: usize) -> Self {
        assert!(n > 0, "ground set must be nonempty");
        Partition {
            parts: (0..n).map(|j| vec![j]).collect(),
            n,
        }
    }

    /// Groups items by an arbitrary key; parts come out canonical.
    pub fn from_assignment(n: usize, key: &[usize]) -> Self {
        assert_eq!(key.len(), n, "one key per item");
        assert!(n > 0, "ground set must be nonempty");
        group_by_key(n, |j| key[j])
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.parts.iter().map(|p| p.as_slice())
    }

    /// Index of the part containing `item`.
    pub fn part_of(&self, item: usize) -> usize {
        assert!(item < self.n, "item out of range");
        self.parts
            .iter()
            .position(|p| p.binary_search(&item).is_ok())
            .expect("partition covers the ground set")
    }

    /// Item-to-part-index lookup table.
    pub fn assignment(&self) -> Vec<usize> {
        let mut key = vec![0usize; self.n];
        for (g, part) in self.parts.iter().enumerate() {
            for &item in part {
                key[item] = g;
            }
        }
        key
    }

    /// True iff every part of `self` lies inside a part of `other`
    /// (`self` is at least as fine as `other`; reflexive).
    pub fn is_refinement_of(&self, other: &Partition) -> Result<bool, PartitionError> {
        if self.n != other.n {
            return Err(PartitionError::GroundSetMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let coarse = other.assignment();
        Ok(self
            .parts
            .iter()
            .all(|part| part.iter().all(|&j| coarse[j] == coarse[part[0]])))
    }

    /// Every partition obtainable by merging parts of `self`, in
    /// canonical-form lexicographic order. Includes `self` and the one-part
    /// partition. The list has Bell(`part_count`) entries, so the part count
    /// is capped by `max_parts`.
    pub fn coarsenings(&self, max_parts: usize) -> Result<Vec<Partition>, PartitionError> {
        let p = self.parts.len();
        if p > max_parts {
            return Err(PartitionError::TooManyParts {
                parts: p,
                cap: max_parts,
            });
        }
        let mut out = Vec::new();
        let mut rgs = vec![0usize; p];
        let mut maxes = vec![0usize; p];
        loop {
            out.push(self.merge_by_groups(&rgs));
            if !next_restricted_growth(&mut rgs, &mut maxes) {
                break;
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Merges parts that share a group id; `groups[i]` is the id of part `i`.
    fn merge_by_groups(&self, groups: &[usize]) -> Partition {
        let count = groups.iter().copied().max().map_or(0, |m| m + 1);
        let mut merged: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (i, part) in self.parts.iter().enumerate() {
            merged[groups[i]].extend_from_slice(part);
        }
        for part in &mut merged {
            part.sort_unstable();
        }
        merged.sort_unstable();
        Partition {
            parts: merged,
            n: self.n,
        }
    }
}

/// Advances a restricted-growth string in place; false once exhausted.
/// `a[0] = 0` and `a[i] <= max(a[0..i]) + 1`, so each string names one way
/// of grouping `a.len()` parts.
fn next_restricted_growth(a: &mut [usize], maxes: &mut [usize]) -> bool {
    let p = a.len();
    for i in (1..p).rev() {
        if a[i] <= maxes[i - 1] {
            a[i] += 1;
            maxes[i] = maxes[i - 1].max(a[i]);
            for j in i + 1..p {
                a[j] = 0;
                maxes[j] = maxes[j - 1];
            }
            return true;
        }
    }
    false
}

fn group_by_key(n: usize, key: impl Fn(usize) -> usize) -> Partition {
    let mut order: Vec<usize> = Vec::new(); // group ids by first appearance
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for j in 0..n {
        let k = key(j);
        match order.iter().position(|&o| o == k) {
            Some(g) => parts[g].push(j),
            None => {
                order.push(k);
                parts.push(vec![j]);
            }
        }
    }
    // First-appearance grouping over ascending items is already canonical.
    Partition { parts, n }
}

/// Common refinement of the given partitions: the parts are exactly the
/// nonempty intersections picking one part from each input. Errors on an
/// empty list or mismatched ground sets.
pub fn meet<'a, I>(partitions: I) -> Result<Partition, PartitionError>
where
    I: IntoIterator<Item = &'a Partition>,
{
    let ps: Vec<&Partition> = partitions.into_iter().collect();
    let first = ps.first().ok_or(PartitionError::EmptyMeet)?;
    let n = first.n;
    for p in &ps {
        if p.n != n {
            return Err(PartitionError::GroundSetMismatch {
                left: n,
                right: p.n,
            });
        }
    }
    let keys: Vec<Vec<usize>> = ps.iter().map(|p| p.assignment()).collect();
    let mut signatures: Vec<Vec<usize>> = vec![Vec::with_capacity(ps.len()); n];
    for key in &keys {
        for (sig, &part) in signatures.iter_mut().zip(key) {
            sig.push(part);
        }
    }
    let mut order: Vec<&[usize]> = Vec::new();
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for (j, sig) in signatures.iter().enumerate() {
        let sig = sig.as_slice();
        match order.iter().position(|&o| o == sig) {
            Some(g) => parts[g].push(j),
            None => {
                order.push(sig);
                parts.push(vec![j]);
            }
        }
    }
    Ok(Partition { parts, n })
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, item) in part.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{item}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Partition {
    type Err = PartitionError;

    /// Parses the `Display` form, e.g. `{{0,1},{2,3}}`. The ground size is
    /// inferred as `max item + 1`; gaps and overlaps are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PartitionError::Unparseable(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(bad)?;
        let mut parts: Vec<Vec<usize>> = Vec::new();
        let mut rest = inner;
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(bad)?;
            let (items, tail) = body.split_once('}').ok_or_else(bad)?;
            let part = items
                .split(',')
                .map(|tok| tok.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            parts.push(part);
            rest = match tail.strip_prefix(',') {
                Some(more) => {
                    if more.is_empty() {
                        return Err(bad());
                    }
                    more
                }
                None => {
                    if !tail.is_empty() {
                        return Err(bad());
                    }
                    tail
                }
            };
        }
        if parts.is_empty() {
            return Err(PartitionError::EmptyGroundSet);
        }
        let n = parts.iter().flatten().copied().max().unwrap_or(0) + 1;
        Partition::new(n, parts)
    }
}
