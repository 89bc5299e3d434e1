//! Explicit monotone simple games stored through their minimal winning
//! coalitions, together with the desirability relation between players and
//! the derived notions (equivalence classes, completeness, swap
//! certificates, vetoers and null players).


use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};

/// A proper monotone simple game on `n` players.
///
/// The winning coalitions are the supersets of `min_winning`. The list is an
/// antichain, is non-empty and never contains the empty coalition, so the
/// empty coalition always loses and the grand coalition always wins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGame {
    n: usize,
    min_winning: Vec<Coalition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominanceVerdict {
    LeftDominates,
    RightDominates,
    Equivalent,
    Incomparable,
}

/// Equivalence classes of the desirability relation.
///
/// For complete games the classes are listed from most to least desirable.
/// Otherwise they are sorted by `(size, smallest member)` and
/// `totally_ordered` is false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerPartition {
    pub classes: Vec<Vec<usize>>,
    pub totally_ordered: bool,
}

impl PlayerPartition {
    pub fn sizes(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.len() as u32).collect()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Class index of every player.
    pub fn class_map(&self, n: usize) -> Vec<usize> {
        let mut map = vec![usize::MAX; n];
        for (k, class) in self.classes.iter().enumerate() {
            for &p in class {
                map[p] = k;
            }
        }
        map
    }

    /// Number of members of `s` in each class.
    pub fn type_of(&self, s: Coalition) -> Vec<u32> {
        self.classes
            .iter()
            .map(|c| c.iter().filter(|&&p| s.contains(p)).count() as u32)
            .collect()
    }
}

/// Two winning coalitions that both lose after exchanging `i` and `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapCertificate {
    pub x1: Coalition,
    pub x2: Coalition,
    pub i: usize,
    pub j: usize,
}

impl SwapCertificate {
    /// `x1` with `i` replaced by `j`.
    pub fn y1(&self) -> Coalition {
        self.x1.swap(self.i, self.j)
    }

    /// `x2` with `j` replaced by `i`.
    pub fn y2(&self) -> Coalition {
        self.x2.swap(self.j, self.i)
    }

    /// Re-checks the statuses against `game` without using the search.
    pub fn verify(&self, game: &SimpleGame) -> bool {
        self.x1.contains(self.i)
            && !self.x1.contains(self.j)
            && self.x2.contains(self.j)
            && !self.x2.contains(self.i)
            && game.is_winning(self.x1)
            && game.is_winning(self.x2)
            && !game.is_winning(self.y1())
            && !game.is_winning(self.y2())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialPlayers {
    pub vetoers: Vec<usize>,
    pub nulls: Vec<usize>,
}

/// Result of stripping vetoers and null players. `kept[i]` is the original
/// index of player `i` of the reduced game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedGame {
    pub game: SimpleGame,
    pub kept: Vec<usize>,
}

impl SimpleGame {
    /// Builds a game from its minimal winning coalitions, rejecting lists that
    /// are not antichains or that describe an improper game.
    pub fn new(n: usize, min_winning: Vec<Coalition>) -> Result<Self> {
        Self::check_players(n, &min_winning)?;
        let mut list = min_winning;
        list.sort();
        list.dedup();
        for (a_idx, a) in list.iter().enumerate() {
            for b in &list[a_idx + 1..] {
                if a.is_subset_of(*b) || b.is_subset_of(*a) {
                    return Err(Error::NotAntichain(a.to_string(), b.to_string()));
                }
            }
        }
        Ok(Self {
            n,
            min_winning: list,
        })
    }

    /// Builds a game whose winning coalitions are the supersets of
    /// `generators`; non-minimal generators are discarded.
    pub fn from_generators(n: usize, generators: Vec<Coalition>) -> Result<Self> {
        Self::check_players(n, &generators)?;
        Ok(Self {
            n,
            min_winning: minimal_elements(generators),
        })
    }

    /// Brute force over all `2^n` coalitions. Only sensible for small `n`.
    pub fn from_winning_fn(n: usize, winning: impl Fn(Coalition) -> bool) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::PlayerCount(n));
        }
        let mut mins = Vec::new();
        for bits in 0u64..(1u64 << n) {
            let s = Coalition::from_bits(bits);
            if winning(s) && s.players().all(|p| !winning(s.without(p))) {
                mins.push(s);
            }
        }
        Self::new(n, mins)
    }

    fn check_players(n: usize, list: &[Coalition]) -> Result<()> {
        if n == 0 || n > 64 {
            return Err(Error::PlayerCount(n));
        }
        if list.is_empty() || list.iter().any(|c| c.is_empty()) {
            return Err(Error::ImproperGame);
        }
        let full = Coalition::full(n);
        for c in list {
            if !c.is_subset_of(full) {
                let player = c.difference(full).players().next().unwrap_or(n);
                return Err(Error::PlayerOutOfRange { player, n });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn min_winning(&self) -> &[Coalition] {
        &self.min_winning
    }

    pub fn is_winning(&self, s: Coalition) -> bool {
        self.min_winning.iter().any(|m| m.is_subset_of(s))
    }

    /// Inclusion-maximal losing coalitions: complements of the minimal
    /// transversals of the minimal winning coalitions.
    pub fn maximal_losing(&self) -> Vec<Coalition> {
        let mut edges: Vec<u64> = self.min_winning.iter().map(|c| c.bits()).collect();
        edges.sort_by_key(|e| e.count_ones());
        let mut transversals: Vec<u64> = vec![0];
        for &e in &edges {
            let mut next = Vec::with_capacity(transversals.len());
            for &t in &transversals {
                if t & e != 0 {
                    next.push(t);
                } else {
                    let mut rest = e;
                    while rest != 0 {
                        let bit = rest & rest.wrapping_neg();
                        next.push(t | bit);
                        rest &= rest - 1;
                    }
                }
            }
            transversals = minimal_bits(next);
        }
        let mut out: Vec<Coalition> = transversals
            .into_iter()
            .map(|t| Coalition::from_bits(t).complement(self.n))
            .collect();
        out.sort();
        out
    }

    fn check_player(&self, p: usize) {
        assert!(p < self.n, "player {p} out of range for {} players", self.n);
    }

    /// Whether `i` is at least as desirable as `j`: replacing `j` by `i` in a
    /// winning coalition never makes it lose. Only minimal winning coalitions
    /// containing `j` but not `i` need to be checked.
    pub fn dominates(&self, i: usize, j: usize) -> bool {
        self.check_player(i);
        self.check_player(j);
        if i == j {
            return true;
        }
        self.min_winning
            .iter()
            .filter(|m| m.contains(j) && !m.contains(i))
            .all(|m| self.is_winning(m.swap(j, i)))
    }

    pub fn dominance(&self, i: usize, j: usize) -> DominanceVerdict {
        assert!(i != j, "dominance needs two distinct players");
        match (self.dominates(i, j), self.dominates(j, i)) {
            (true, true) => DominanceVerdict::Equivalent,
            (true, false) => DominanceVerdict::LeftDominates,
            (false, true) => DominanceVerdict::RightDominates,
            (false, false) => DominanceVerdict::Incomparable,
        }
    }

    pub fn partition_players(&self) -> PlayerPartition {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for p in 0..self.n {
            match classes
                .iter_mut()
                .find(|c| self.dominance(c[0], p) == DominanceVerdict::Equivalent)
            {
                Some(c) => c.push(p),
                None => classes.push(vec![p]),
            }
        }
        let t = classes.len();
        let mut totally_ordered = true;
        // above[a][b]: class a strictly dominates class b
        let mut above = vec![vec![false; t]; t];
        for a in 0..t {
            for b in a + 1..t {
                match self.dominance(classes[a][0], classes[b][0]) {
                    DominanceVerdict::LeftDominates => above[a][b] = true,
                    DominanceVerdict::RightDominates => above[b][a] = true,
                    _ => totally_ordered = false,
                }
            }
        }
        if totally_ordered {
            // rank = number of classes above
            let mut order: Vec<usize> = (0..t).collect();
            order.sort_by_key(|&a| (0..t).filter(|&b| above[b][a]).count());
            classes = order.into_iter().map(|a| classes[a].clone()).collect();
        } else {
            classes.sort_by_key(|c| (c.len(), c[0]));
        }
        PlayerPartition {
            classes,
            totally_ordered,
        }
    }

    pub fn is_complete(&self) -> bool {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.dominates(i, j) && !self.dominates(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// A witness of non-completeness: winning `x1 ∋ i`, `x2 ∋ j` such that
    /// exchanging `i` and `j` makes both lose. Searched lexicographically
    /// over `(x1, x2, i, j)` among minimal winning coalitions.
    pub fn swap_certificate(&self) -> Option<SwapCertificate> {
        if self.is_complete() {
            return None;
        }
        for &x1 in &self.min_winning {
            for &x2 in &self.min_winning {
                for i in x1.difference(x2).players() {
                    if self.is_winning(x1.without(i)) {
                        continue;
                    }
                    for j in x2.difference(x1).players() {
                        let cert = SwapCertificate { x1, x2, i, j };
                        if !self.is_winning(cert.y1()) && !self.is_winning(cert.y2()) {
                            return Some(cert);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn trivial_players(&self) -> TrivialPlayers {
        let full = Coalition::full(self.n);
        let mut common = full;
        let mut union = Coalition::EMPTY;
        for m in &self.min_winning {
            common = common.intersection(*m);
            union = union.union(*m);
        }
        TrivialPlayers {
            vetoers: common.players().collect(),
            nulls: union.complement(self.n).players().collect(),
        }
    }

    /// Removes all vetoers and null players. The m-invariant-trade robustness
    /// status of the game is unchanged by this reduction.
    pub fn reduce_trivial(&self) -> Result<ReducedGame> {
        let trivial = self.trivial_players();
        let vetoers = Coalition::from_players(trivial.vetoers.iter().copied());
        let removed = vetoers.union(Coalition::from_players(trivial.nulls.iter().copied()));
        let kept: Vec<usize> = removed.complement(self.n).players().collect();
        if kept.is_empty() {
            return Err(Error::FullyTrivial);
        }
        let mut index = [usize::MAX; 64];
        for (new, &old) in kept.iter().enumerate() {
            index[old] = new;
        }
        let mut mins = Vec::with_capacity(self.min_winning.len());
        for m in &self.min_winning {
            let rest = m.difference(vetoers);
            if rest.is_empty() {
                return Err(Error::FullyTrivial);
            }
            mins.push(Coalition::from_players(rest.players().map(|p| index[p])));
        }
        Ok(ReducedGame {
            game: SimpleGame::new(kept.len(), mins)?,
            kept,
        })
    }

    /// Minimal winning coalitions that lose after any replacement of a member
    /// by a strictly less desirable non-member.
    pub fn shift_minimal_winning(&self) -> Result<Vec<Coalition>> {
        let partition = self.partition_players();
        if !partition.totally_ordered {
            return Err(Error::NotComplete);
        }
        Ok(self.shift_minimal_with(&partition))
    }

    pub(crate) fn shift_minimal_with(&self, partition: &PlayerPartition) -> Vec<Coalition> {
        let classes = &partition.classes;
        self.min_winning
            .iter()
            .copied()
            .filter(|&m| {
                for (ci, upper) in classes.iter().enumerate() {
                    let Some(&i) = upper.iter().find(|&&p| m.contains(p)) else {
                        continue;
                    };
                    for lower in &classes[ci + 1..] {
                        if let Some(&j) = lower.iter().find(|&&p| !m.contains(p)) {
                            if self.is_winning(m.swap(i, j)) {
                                return false;
                            }
                        }
                    }
                }
                true
            })
            .collect()
    }

    /// The same game with player `p` renamed to `perm[p]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        assert_eq!(perm.len(), self.n);
        let mins = self
            .min_winning
            .iter()
            .map(|m| Coalition::from_players(m.players().map(|p| perm[p])))
            .collect();
        Self::new(self.n, mins)
    }
}

fn minimal_bits(mut sets: Vec<u64>) -> Vec<u64> {
    sets.sort_unstable_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let mut kept: Vec<u64> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|&k| k & !s == 0) {
            kept.push(s);
        }
    }
    kept
}

fn minimal_elements(list: Vec<Coalition>) -> Vec<Coalition> {
    let mut out: Vec<Coalition> = minimal_bits(list.into_iter().map(|c| c.bits()).collect())
        .into_iter()
        .map(Coalition::from_bits)
        .collect();
    out.sort();
    out
}

/// All `k`-subsets of `items`, in lexicographic order.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Coalition> {
    fn rec(items: &[usize], k: usize, acc: Coalition, out: &mut Vec<Coalition>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for (idx, &p) in items.iter().enumerate() {
            if items.len() - idx < k {
                break;
            }
            rec(&items[idx + 1..], k - 1, acc.with(p), out);
        }
    }
    let mut out = Vec::new();
    rec(items, k, Coalition::EMPTY, &mut out);
    out
}
