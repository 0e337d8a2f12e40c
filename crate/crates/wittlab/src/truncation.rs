//! Truncation sets: finite divisor-closed sets of positive integers.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A finite nonempty divisor-closed set of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationSet {
    members: BTreeSet<u64>,
}

impl fmt::Display for TruncationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|n| n.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl TruncationSet {
    /// Construct from members, rejecting non-divisor-closed input.
    pub fn new(members: impl IntoIterator<Item = u64>) -> Result<TruncationSet> {
        let members: BTreeSet<u64> = members.into_iter().collect();
        if members.is_empty() || members.contains(&0) {
            return Err(Error::NotDivisorClosed(1));
        }
        for &n in &members {
            for d in 1..=n {
                if d * d > n {
                    break;
                }
                if n % d == 0 {
                    if !members.contains(&d) {
                        return Err(Error::NotDivisorClosed(d));
                    }
                    if !members.contains(&(n / d)) {
                        return Err(Error::NotDivisorClosed(n / d));
                    }
                }
            }
        }
        Ok(TruncationSet { members })
    }

    /// Divisor closure of arbitrary positive integers.
    pub fn closure(seeds: impl IntoIterator<Item = u64>) -> TruncationSet {
        let mut members = BTreeSet::new();
        members.insert(1);
        for n in seeds {
            assert!(n > 0);
            for d in 1..=n {
                if n % d == 0 {
                    members.insert(d);
                }
            }
        }
        TruncationSet { members }
    }

    /// The initial segment {1, ..., m}.
    pub fn initial_segment(m: u64) -> TruncationSet {
        assert!(m >= 1);
        TruncationSet {
            members: (1..=m).collect(),
        }
    }

    /// The p-typical set {1, p, ..., p^(n-1)}.
    pub fn p_typical(p: u64, n: u32) -> TruncationSet {
        assert!(n >= 1);
        let mut members = BTreeSet::new();
        let mut v = 1u64;
        for _ in 0..n {
            members.insert(v);
            v *= p;
        }
        TruncationSet { members }
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.contains(&n)
    }

    pub fn max_member(&self) -> u64 {
        *self.members.iter().next_back().unwrap()
    }

    pub fn is_subset_of(&self, other: &TruncationSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn is_initial_segment(&self) -> bool {
        self.max_member() == self.len() as u64
    }

    /// Position of `n` in the sorted member list.
    pub fn index_of(&self, n: u64) -> Option<usize> {
        self.members.iter().position(|&m| m == n)
    }

    /// S/n = {v : v*n in S}.
    pub fn quotient(&self, n: u64) -> Result<TruncationSet> {
        if !self.contains(n) {
            return Err(Error::NotAMember(n));
        }
        Ok(TruncationSet {
            members: self
                .members
                .iter()
                .filter(|&&m| m % n == 0)
                .map(|&m| m / n)
                .collect(),
        })
    }

    /// T = {m in S : n does not divide m}; requires n > 1 so T is nonempty.
    pub fn complement(&self, n: u64) -> Result<TruncationSet> {
        if !self.contains(n) {
            return Err(Error::NotAMember(n));
        }
        if n == 1 {
            return Err(Error::BadTruncationPair(
                "complement at n = 1 would be empty".into(),
            ));
        }
        Ok(TruncationSet {
            members: self.members.iter().filter(|&&m| m % n != 0).copied().collect(),
        })
    }

    /// Members ordered by nu(n) (prime factors with multiplicity), ties by
    /// numeric order: the recursion order of divisor-indexed inductions.
    pub fn divisor_order(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.members.iter().copied().collect();
        v.sort_by_key(|&n| (nu(n), n));
        v
    }

    /// All divisor-closed subsets of {1..max} (each contains 1).
    pub fn all_subsets_of_initial_segment(max: u64) -> Vec<TruncationSet> {
        let candidates: Vec<u64> = (2..=max).collect();
        let mut out = vec![];
        for mask in 0u32..(1 << candidates.len()) {
            let mut members: BTreeSet<u64> = BTreeSet::new();
            members.insert(1);
            for (i, &c) in candidates.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    members.insert(c);
                }
            }
            let ok = members.iter().all(|&n| {
                (1..=n).filter(|d| n % d == 0).all(|d| members.contains(&d))
            });
            if ok {
                out.push(TruncationSet { members });
            }
        }
        out
    }
}

/// Number of prime factors counted with multiplicity.
pub fn nu(mut n: u64) -> u32 {
    let mut count = 0;
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            n /= d;
            count += 1;
        }
        d += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

/// Strict divisors of m within S (n | m, n != m).
pub fn strict_divisors_in(set: &TruncationSet, m: u64) -> Vec<u64> {
    set.members().filter(|&n| n != m && m % n == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks_divisor_closure() {
        assert!(TruncationSet::new([1, 2, 4]).is_ok());
        assert!(matches!(
            TruncationSet::new([1, 4]),
            Err(Error::NotDivisorClosed(2))
        ));
        assert!(TruncationSet::new([]).is_err());
    }

    #[test]
    fn quotients() {
        let s = TruncationSet::new([1, 2, 3, 4, 6, 12]).unwrap();
        assert_eq!(
            s.quotient(2).unwrap(),
            TruncationSet::new([1, 2, 3, 6]).unwrap()
        );
        assert_eq!(s.quotient(1).unwrap(), s);
        let p = TruncationSet::new([1, 3, 9]).unwrap();
        assert_eq!(p.quotient(3).unwrap(), TruncationSet::new([1, 3]).unwrap());
        assert!(matches!(s.quotient(5), Err(Error::NotAMember(5))));
        // (S/n)/m = S/(nm)
        assert_eq!(
            s.quotient(2).unwrap().quotient(3).unwrap(),
            s.quotient(6).unwrap()
        );
    }

    #[test]
    fn complements() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        assert_eq!(s.complement(2).unwrap(), TruncationSet::new([1]).unwrap());
        let s2 = TruncationSet::new([1, 2, 3, 6]).unwrap();
        assert_eq!(
            s2.complement(2).unwrap(),
            TruncationSet::new([1, 3]).unwrap()
        );
        let s3 = TruncationSet::initial_segment(6);
        assert_eq!(
            s3.complement(5).unwrap(),
            TruncationSet::new([1, 2, 3, 4, 6]).unwrap()
        );
        assert!(s3.complement(1).is_err());
    }

    #[test]
    fn p_typical_sets() {
        assert_eq!(
            TruncationSet::p_typical(2, 3),
            TruncationSet::new([1, 2, 4]).unwrap()
        );
        assert_eq!(TruncationSet::p_typical(3, 1), TruncationSet::new([1]).unwrap());
        assert_eq!(
            TruncationSet::p_typical(5, 2),
            TruncationSet::new([1, 5]).unwrap()
        );
    }

    #[test]
    fn divisor_order_by_nu() {
        let s = TruncationSet::new([1, 2, 3, 4, 6, 12]).unwrap();
        assert_eq!(s.divisor_order(), vec![1, 2, 3, 4, 6, 12]);
        let s2 = TruncationSet::initial_segment(8);
        // nu: 1:0, 2,3,5,7:1, 4,6:2, 8:3
        assert_eq!(s2.divisor_order(), vec![1, 2, 3, 5, 7, 4, 6, 8]);
    }

    #[test]
    fn subset_enumeration() {
        let subs = TruncationSet::all_subsets_of_initial_segment(4);
        // {1},{1,2},{1,3},{1,2,3},{1,2,4},{1,2,3,4}
        assert_eq!(subs.len(), 6);
    }
}
