//! Isomorphism-free generation of complete games as valid `(n̄, 𝓜)` pairs.
//!
//! For each composition `n̄` of `n`, row sets are antichains of `(Λ(n̄), ⪰)`
//! built by a depth-first search over the lattice in canonical order, so
//! every matrix is produced once and already in canonical row order.
//! Branches that can no longer satisfy the shift condition are cut.

use rayon::prelude::*;

use crate::invariants::CharacteristicInvariants;
use crate::lattice::{canonical_cmp, type_dominates, TypeLattice};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumFilter {
    pub t: Option<usize>,
    pub r: Option<usize>,
}

impl EnumFilter {
    pub fn t(t: usize) -> Self {
        Self { t: Some(t), r: None }
    }

    pub fn r(r: usize) -> Self {
        Self { t: None, r: Some(r) }
    }
}

/// Ordered compositions of `n` into `t` positive parts, lexicographically
/// descending.
pub fn compositions(n: u32, t: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, parts: usize, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            acc.push(left);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for first in (1..=left - (parts as u32 - 1)).rev() {
            acc.push(first);
            rec(left - first, parts - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if t >= 1 && n as usize >= t {
        rec(n, t, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn empty(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    w * 64 + b
                })
            })
        })
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

/// Precomputed search data for one class-size vector.
pub struct AntichainSearch {
    classes: Vec<u32>,
    /// non-zero lattice elements in canonical order
    elements: Vec<Vec<u32>>,
    /// shift-condition bits each element satisfies
    masks: Vec<u32>,
    full: u32,
    /// later elements incomparable with each element
    later_incomparable: Vec<Bitset>,
}

impl AntichainSearch {
    pub fn new(classes: &[u32]) -> Self {
        let lattice = TypeLattice::new(classes);
        let t = classes.len();
        let mut elements: Vec<Vec<u32>> = lattice.iter().filter(|s| s.iter().any(|&x| x > 0)).collect();
        elements.sort_by(|a, b| canonical_cmp(a, b));
        let masks: Vec<u32> = elements
            .iter()
            .map(|s| {
                if t == 1 {
                    (s[0] > 0) as u32
                } else {
                    (0..t - 1)
                        .filter(|&k| s[k] > 0 && s[k + 1] < classes[k + 1])
                        .fold(0, |m, k| m | 1 << k)
                }
            })
            .collect();
        let full = if t == 1 { 1 } else { (1u32 << (t - 1)) - 1 };
        let len = elements.len();
        let later_incomparable = (0..len)
            .map(|i| {
                let mut b = Bitset::empty(len);
                for j in i + 1..len {
                    if !type_dominates(&elements[i], &elements[j])
                        && !type_dominates(&elements[j], &elements[i])
                    {
                        b.set(j);
                    }
                }
                b
            })
            .collect();
        Self {
            classes: classes.to_vec(),
            elements,
            masks,
            full,
            later_incomparable,
        }
    }

    pub fn first_rows(&self) -> usize {
        self.elements.len()
    }

    /// Visits every valid matrix whose first row is element `first`.
    pub fn for_each_from(
        &self,
        first: usize,
        r: Option<usize>,
        visit: &mut dyn FnMut(CharacteristicInvariants),
    ) {
        let mut chosen = vec![first];
        let cand = self.later_incomparable[first].clone();
        self.dfs(&mut chosen, &cand, self.masks[first], r, visit);
    }

    pub fn for_each(&self, r: Option<usize>, visit: &mut dyn FnMut(CharacteristicInvariants)) {
        for first in 0..self.elements.len() {
            self.for_each_from(first, r, visit);
        }
    }

    fn dfs(
        &self,
        chosen: &mut Vec<usize>,
        cand: &Bitset,
        mask: u32,
        r: Option<usize>,
        visit: &mut dyn FnMut(CharacteristicInvariants),
    ) {
        if mask == self.full && r.is_none_or(|r| chosen.len() == r) {
            let rows = chosen.iter().map(|&i| self.elements[i].clone()).collect();
            visit(CharacteristicInvariants::new_unchecked(self.classes.clone(), rows));
        }
        if r.is_some_and(|r| chosen.len() >= r) || cand.is_empty() {
            return;
        }
        let reachable = cand.ones().fold(mask, |m, j| m | self.masks[j]);
        if reachable != self.full {
            return;
        }
        if let Some(r) = r {
            // each further row adds at most all bits, so only depth matters
            if chosen.len() + cand.ones().take(r - chosen.len()).count() < r {
                return;
            }
        }
        for j in cand.ones() {
            chosen.push(j);
            let next = cand.and(&self.later_incomparable[j]);
            self.dfs(chosen, &next, mask | self.masks[j], r, visit);
            chosen.pop();
        }
    }
}

fn class_vectors(n: u32, filter: EnumFilter) -> Vec<Vec<u32>> {
    let ts: Vec<usize> = match filter.t {
        Some(t) => vec![t],
        None => (1..=n as usize).collect(),
    };
    ts.into_iter().flat_map(|t| compositions(n, t)).collect()
}

/// All complete games on `n` players (up to isomorphism) passing `filter`,
/// in deterministic order: by `t`, then by composition, then by search
/// order.
pub fn for_each_complete(n: u32, filter: EnumFilter, mut visit: impl FnMut(CharacteristicInvariants)) {
    for classes in class_vectors(n, filter) {
        AntichainSearch::new(&classes).for_each(filter.r, &mut visit);
    }
}

pub fn enumerate_complete(n: u32, filter: EnumFilter) -> Vec<CharacteristicInvariants> {
    let mut out = Vec::new();
    for_each_complete(n, filter, |ci| out.push(ci));
    out
}

/// Work units `(n̄, first row)` in the same order as [`for_each_complete`].
pub struct WorkUnits {
    searches: Vec<AntichainSearch>,
    units: Vec<(usize, usize)>,
    r: Option<usize>,
}

impl WorkUnits {
    pub fn new(n: u32, filter: EnumFilter) -> Self {
        let searches: Vec<AntichainSearch> = class_vectors(n, filter)
            .iter()
            .map(|c| AntichainSearch::new(c))
            .collect();
        let units = searches
            .iter()
            .enumerate()
            .flat_map(|(s, search)| (0..search.first_rows()).map(move |f| (s, f)))
            .collect();
        Self {
            searches,
            units,
            r: filter.r,
        }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn run(&self, unit: usize, visit: &mut dyn FnMut(CharacteristicInvariants)) {
        let (s, f) = self.units[unit];
        self.searches[s].for_each_from(f, self.r, visit);
    }

    /// Parallel fold over a range of units; partial results come back in
    /// unit order.
    pub fn par_map<T, F>(&self, range: std::ops::Range<usize>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &Self) -> T + Sync + Send,
    {
        range.into_par_iter().map(|u| f(u, self)).collect()
    }
}

/// Number of complete games, counted in parallel.
pub fn count_complete(n: u32, filter: EnumFilter) -> u64 {
    let units = WorkUnits::new(n, filter);
    units
        .par_map(0..units.len(), |u, w| {
            let mut c = 0u64;
            w.run(u, &mut |_| c += 1);
            c
        })
        .into_iter()
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalition::Coalition;
    use crate::game::SimpleGame;
    use crate::invariants::{extract_invariants, reconstruct, validate_invariants};
    use std::collections::HashSet;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 2), vec![vec![3, 1], vec![2, 2], vec![1, 3]]);
        assert_eq!(compositions(6, 3).len(), 10);
        assert!(compositions(2, 3).is_empty());
    }

    #[test]
    fn small_totals() {
        let expected = [1u64, 3, 8, 25, 117, 1171];
        for (n, &e) in (1..=6).zip(&expected) {
            assert_eq!(count_complete(n, EnumFilter::default()), e, "n={n}");
        }
        assert_eq!(count_complete(4, EnumFilter::r(1)), 15);
        assert_eq!(count_complete(6, EnumFilter::t(3)), 262);
        assert_eq!(count_complete(5, EnumFilter::t(2)), 36);
    }

    #[test]
    fn emitted_pairs_are_valid_and_distinct() {
        let all = enumerate_complete(5, EnumFilter::default());
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for ci in &all {
            assert!(validate_invariants(ci.classes(), ci.rows()).is_empty(), "{ci}");
        }
    }

    #[test]
    fn agrees_with_brute_force_on_four_players() {
        // every monotone proper game on 4 players, reduced to complete ones
        let n = 4;
        let subsets: Vec<Coalition> = (1u64..16).map(Coalition::from_bits).collect();
        let mut seen = HashSet::new();
        for family in 1u32..(1 << subsets.len()) {
            let gens: Vec<Coalition> = (0..subsets.len())
                .filter(|&i| family >> i & 1 == 1)
                .map(|i| subsets[i])
                .collect();
            let g = SimpleGame::from_generators(n, gens).unwrap();
            if let Ok((ci, _)) = extract_invariants(&g) {
                seen.insert(ci);
            }
        }
        let listed: HashSet<_> = enumerate_complete(4, EnumFilter::default()).into_iter().collect();
        assert_eq!(seen, listed);
    }

    #[test]
    fn round_trip_through_explicit_games() {
        for ci in enumerate_complete(6, EnumFilter::default()) {
            let g = reconstruct(&ci).unwrap();
            assert_eq!(extract_invariants(&g).unwrap().0, ci);
        }
    }

    #[test]
    fn units_cover_sequential_order() {
        let units = WorkUnits::new(5, EnumFilter::default());
        let mut par = Vec::new();
        for u in 0..units.len() {
            units.run(u, &mut |ci| par.push(ci));
        }
        assert_eq!(par, enumerate_complete(5, EnumFilter::default()));
    }

    #[test]
    fn r_filter_counts_add_up() {
        let total = count_complete(6, EnumFilter::default());
        let by_r: u64 = (1..=20).map(|r| count_complete(6, EnumFilter::r(r))).sum();
        assert_eq!(total, by_r);
    }
}
