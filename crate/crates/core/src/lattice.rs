//! Coalition types and the lattice `Λ(n̄)` ordered by comparing prefix sums.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeOrder {
    Dominates,
    Dominated,
    Equal,
    Incomparable,
}

pub fn prefix_sums(a: &[u32]) -> Vec<u32> {
    a.iter()
        .scan(0u32, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// `a ⪰ b`: every prefix sum of `a` is at least the matching one of `b`.
/// Both slices must have the same length.
pub fn type_dominates(a: &[u32], b: &[u32]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let (mut sa, mut sb) = (0u32, 0u32);
    for (x, y) in a.iter().zip(b) {
        sa += x;
        sb += y;
        if sa < sb {
            return false;
        }
    }
    true
}

pub fn compare_types(a: &[u32], b: &[u32]) -> Result<TypeOrder> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(match (type_dominates(a, b), type_dominates(b, a)) {
        (true, true) => TypeOrder::Equal,
        (true, false) => TypeOrder::Dominates,
        (false, true) => TypeOrder::Dominated,
        (false, false) => TypeOrder::Incomparable,
    })
}

/// Canonical row order: the first differing prefix sum decides and the
/// larger one comes first. Extends `⪰` (a dominating type sorts earlier).
pub fn canonical_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let (mut sa, mut sb) = (0u32, 0u32);
    for (x, y) in a.iter().zip(b) {
        sa += x;
        sb += y;
        match sb.cmp(&sa) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// The box `{s : 0 ≤ s ≤ n̄}` with a mixed-radix index (first coordinate
/// most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeLattice {
    nbar: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
}

impl TypeLattice {
    pub fn new(nbar: &[u32]) -> Self {
        let mut strides = vec![0; nbar.len()];
        let mut size = 1usize;
        for k in (0..nbar.len()).rev() {
            strides[k] = size;
            size = size
                .checked_mul(nbar[k] as usize + 1)
                .expect("type lattice too large");
        }
        Self {
            nbar: nbar.to_vec(),
            strides,
            size,
        }
    }

    pub fn nbar(&self) -> &[u32] {
        &self.nbar
    }

    pub fn t(&self) -> usize {
        self.nbar.len()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        s.len() == self.nbar.len() && s.iter().zip(&self.nbar).all(|(x, n)| x <= n)
    }

    pub fn check(&self, s: &[u32]) -> Result<()> {
        if s.len() != self.nbar.len() {
            return Err(Error::LengthMismatch(s.len(), self.nbar.len()));
        }
        if !self.contains(s) {
            return Err(Error::TypeOutOfRange(s.to_vec(), self.nbar.clone()));
        }
        Ok(())
    }

    pub fn index(&self, s: &[u32]) -> usize {
        s.iter()
            .zip(&self.strides)
            .map(|(&x, &st)| x as usize * st)
            .sum()
    }

    pub fn vector(&self, mut idx: usize) -> Vec<u32> {
        self.strides
            .iter()
            .map(|&st| {
                let x = idx / st;
                idx %= st;
                x as u32
            })
            .collect()
    }

    /// All elements in index order (lexicographic on the vectors).
    pub fn iter(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.size).map(|i| self.vector(i))
    }

    pub fn top(&self) -> Vec<u32> {
        self.nbar.clone()
    }
}
