//! Partitions and compositions of `n`, the dominance order, and the split
//! index used by the orbit-degeneration recursion.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Fails unless `parts` is weakly decreasing with positive entries.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Partition { parts })
    }

    /// Sorts the parts and drops zeros.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `lambda_i` with 1-based `i`, and 0 past the end.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let max = self.parts.first().copied().unwrap_or(0);
        Partition { parts: (1..=max).map(|j| self.parts.iter().filter(|&&p| p >= j).count()).collect() }
    }

    pub fn as_composition(&self) -> Composition {
        Composition { parts: self.parts.clone() }
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

/// Sequence of positive integers in any order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Decreasing rearrangement.
    pub fn sorted(&self) -> Partition {
        Partition::from_unsorted(self.parts.clone())
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl Serialize for Composition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl From<Partition> for Composition {
    fn from(p: Partition) -> Self {
        Composition { parts: p.parts }
    }
}

/// All partitions of `n`, in reverse lexicographic order starting from `(n)`.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p);
            go(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All compositions of `n`, in lexicographic order.
pub fn compositions(n: usize) -> Vec<Composition> {
    fn go(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if rem == 0 {
            out.push(Composition { parts: cur.clone() });
            return;
        }
        for p in 1..=rem {
            cur.push(p);
            go(rem - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

/// `mu <= lam` in the dominance order: every prefix sum of `lam` is at least
/// the matching prefix sum of `mu`.
pub fn dominance_leq(mu: &Partition, lam: &Partition) -> Result<bool> {
    if mu.total() != lam.total() {
        return Err(Error::UnequalTotals(mu.total(), lam.total()));
    }
    let len = mu.len().max(lam.len());
    let (mut sm, mut sl) = (0, 0);
    for i in 1..=len {
        sm += mu.part(i);
        sl += lam.part(i);
        if sl < sm {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An index `i` (1-based) with `lam_i >= mu_i >= lam_{i+1}`.
///
/// If `mu_1 >= lam_2` the answer is 1. Otherwise the first two parts of `lam`
/// are merged into `lam_1 + lam_2 - mu_1`, the first part of `mu` is dropped,
/// and the index found for that smaller pair is shifted by one.
pub fn split_index(lam: &Partition, mu: &Partition) -> Result<usize> {
    if !dominance_leq(mu, lam)? {
        return Err(Error::NotDominated);
    }
    let mut lam = lam.parts.clone();
    let mut mu = mu.parts.clone();
    let mut shift = 0;
    loop {
        let get = |v: &[usize], i: usize| v.get(i).copied().unwrap_or(0);
        if get(&mu, 0) >= get(&lam, 1) {
            return Ok(shift + 1);
        }
        let merged = lam[0] + lam[1] - mu[0];
        lam.splice(0..2, [merged]);
        mu.remove(0);
        shift += 1;
    }
}
