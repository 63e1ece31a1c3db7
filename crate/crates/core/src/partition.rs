//! A/B/C region assignments for conditional mutual information.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("regions overlap at site {0}")]
    Overlap(usize),
    #[error("site {site} outside a {n}-site system")]
    OutOfRange { site: usize, n: usize },
    #[error("arcs of total length {total} do not fit a ring of {n} sites")]
    DoesNotFit { total: usize, n: usize },
    #[error("region {0} is empty")]
    Empty(char),
}

/// Disjoint regions `A`, `B`, `C` of an `n`-site system. Sites outside all three
/// are traced out before any entropy is taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    n_sites: usize,
    a: Vec<usize>,
    b: Vec<usize>,
    c: Vec<usize>,
}

impl Partition {
    pub fn new(n_sites: usize, a: Vec<usize>, b: Vec<usize>, c: Vec<usize>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; n_sites];
        for (name, region) in [('A', &a), ('B', &b), ('C', &c)] {
            if region.is_empty() && name != 'B' {
                return Err(PartitionError::Empty(name));
            }
            for &s in region.iter() {
                if s >= n_sites {
                    return Err(PartitionError::OutOfRange { site: s, n: n_sites });
                }
                if seen[s] {
                    return Err(PartitionError::Overlap(s));
                }
                seen[s] = true;
            }
        }
        let sorted = |mut v: Vec<usize>| {
            v.sort_unstable();
            v
        };
        Ok(Partition { n_sites, a: sorted(a), b: sorted(b), c: sorted(c) })
    }

    /// Ring layout `A(a) B(b) C(a) B(b)` starting at `offset`, covering `2a + 2b` sites.
    pub fn ring(n_sites: usize, arc_ac: usize, arc_b: usize, offset: usize) -> Result<Self, PartitionError> {
        Self::ring_arcs(n_sites, arc_ac, arc_b, arc_ac, arc_b, offset)
    }

    /// Ring layout with independent arc lengths `A(la) B(lb1) C(lc) B(lb2)`.
    pub fn ring_arcs(
        n_sites: usize,
        la: usize,
        lb1: usize,
        lc: usize,
        lb2: usize,
        offset: usize,
    ) -> Result<Self, PartitionError> {
        let total = la + lb1 + lc + lb2;
        if total > n_sites {
            return Err(PartitionError::DoesNotFit { total, n: n_sites });
        }
        let site = |k: usize| (offset + k) % n_sites;
        let a = (0..la).map(site).collect();
        let b = (la..la + lb1).chain(la + lb1 + lc..total).map(site).collect();
        let c = (la + lb1..la + lb1 + lc).map(site).collect();
        Self::new(n_sites, a, b, c)
    }

    /// Default ring partition: `A(3) B(2) C(3) B(2)` for ten sites, and for
    /// other sizes the largest `A(k) B(m) C(k) B(m)` with `m ≥ 1` that fills the ring.
    pub fn default_ring(n_sites: usize) -> Result<Self, PartitionError> {
        if n_sites == 10 {
            return Self::ring(10, 3, 2, 0);
        }
        let b = if n_sites >= 10 { (n_sites - 6) / 2 } else { 1 };
        let ac = (n_sites - 2 * b) / 2;
        Self::ring_arcs(n_sites, ac, b, n_sites - 2 * b - ac, b, 0)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn c(&self) -> &[usize] {
        &self.c
    }

    fn merged(parts: &[&[usize]]) -> Vec<usize> {
        let mut v: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    pub fn union_ab(&self) -> Vec<usize> {
        Self::merged(&[&self.a, &self.b])
    }

    pub fn union_bc(&self) -> Vec<usize> {
        Self::merged(&[&self.b, &self.c])
    }

    pub fn union_abc(&self) -> Vec<usize> {
        Self::merged(&[&self.a, &self.b, &self.c])
    }

    /// Same partition with the roles of `A` and `C` exchanged.
    pub fn swapped(&self) -> Self {
        Partition { n_sites: self.n_sites, a: self.c.clone(), b: self.b.clone(), c: self.a.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_layout() {
        let p = Partition::ring(10, 3, 2, 0).unwrap();
        assert_eq!(p.a(), &[0, 1, 2]);
        assert_eq!(p.b(), &[3, 4, 8, 9]);
        assert_eq!(p.c(), &[5, 6, 7]);
        let q = Partition::ring(10, 3, 2, 7).unwrap();
        assert_eq!(q.a(), &[7, 8, 9]);
        assert_eq!(q.b(), &[0, 1, 5, 6]);
        assert_eq!(q.c(), &[2, 3, 4]);
    }

    #[test]
    fn default_partitions_cover_ring() {
        for n in 4..=12 {
            let p = Partition::default_ring(n).unwrap();
            assert_eq!(p.union_abc().len(), n, "n = {n}");
            assert!(!p.b().is_empty());
        }
        assert_eq!(Partition::default_ring(8).unwrap().a(), &[0, 1, 2]);
    }

    #[test]
    fn rejects_overlap_and_overflow() {
        assert_eq!(Partition::new(4, vec![0], vec![0], vec![1]), Err(PartitionError::Overlap(0)));
        assert!(matches!(Partition::ring(5, 2, 1, 0), Err(PartitionError::DoesNotFit { .. })));
    }
}
