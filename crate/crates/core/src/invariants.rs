//! Characteristic invariants `(n̄, 𝓜)` of complete games: validation,
//! extraction from explicit games, reconstruction and the derived type
//! tables (winning types, minimal winning, maximal losing, shift-maximal
//! losing).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{combinations, PlayerPartition, SimpleGame};
use crate::lattice::{canonical_cmp, type_dominates, TypeLattice};

/// A failed validity condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    NoClasses,
    EmptyClass { class: usize },
    TooManyPlayers { n: u64 },
    NoRows,
    RowLength { row: usize },
    /// condition (i)
    RowOutOfRange { row: usize },
    /// condition (ii)
    Comparable { first: usize, second: usize },
    /// condition (iii), `k` is the 0-based position (for `t = 1`, 0)
    NoShiftableRow { k: usize },
    /// condition (iv)
    Order { row: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoClasses => write!(f, "no classes"),
            Violation::EmptyClass { class } => write!(f, "class {class} is empty"),
            Violation::TooManyPlayers { n } => write!(f, "{n} players exceeds 64"),
            Violation::NoRows => write!(f, "matrix has no rows"),
            Violation::RowLength { row } => write!(f, "row {row} has the wrong length"),
            Violation::RowOutOfRange { row } => {
                write!(f, "(i) row {row} is not between 0 and the class sizes")
            }
            Violation::Comparable { first, second } => {
                write!(f, "(ii) rows {first} and {second} are comparable")
            }
            Violation::NoShiftableRow { k } => {
                write!(f, "(iii) no row allows a shift from class {k}")
            }
            Violation::Order { row } => {
                write!(f, "(iv) rows {row} and {} are not in prefix-sum order", row + 1)
            }
        }
    }
}

/// Checks conditions (i) to (iv) and the basic shape constraints.
pub fn validate_invariants(classes: &[u32], rows: &[Vec<u32>]) -> Vec<Violation> {
    let mut out = Vec::new();
    let t = classes.len();
    if t == 0 {
        out.push(Violation::NoClasses);
        return out;
    }
    for (k, &nk) in classes.iter().enumerate() {
        if nk == 0 {
            out.push(Violation::EmptyClass { class: k });
        }
    }
    let n: u64 = classes.iter().map(|&x| x as u64).sum();
    if n > 64 {
        out.push(Violation::TooManyPlayers { n });
    }
    if rows.is_empty() {
        out.push(Violation::NoRows);
        return out;
    }
    let mut shape_ok = true;
    for (p, row) in rows.iter().enumerate() {
        if row.len() != t {
            out.push(Violation::RowLength { row: p });
            shape_ok = false;
        } else if row.iter().zip(classes).any(|(m, nk)| m > nk) {
            out.push(Violation::RowOutOfRange { row: p });
        }
    }
    if !shape_ok {
        return out;
    }
    for p in 0..rows.len() {
        for q in p + 1..rows.len() {
            if type_dominates(&rows[p], &rows[q]) || type_dominates(&rows[q], &rows[p]) {
                out.push(Violation::Comparable {
                    first: p,
                    second: q,
                });
            }
        }
    }
    if t == 1 {
        if !rows.iter().any(|r| r[0] > 0) {
            out.push(Violation::NoShiftableRow { k: 0 });
        }
    } else {
        for k in 0..t - 1 {
            if !rows.iter().any(|r| r[k] > 0 && r[k + 1] < classes[k + 1]) {
                out.push(Violation::NoShiftableRow { k });
            }
        }
    }
    for p in 0..rows.len().saturating_sub(1) {
        if canonical_cmp(&rows[p], &rows[p + 1]) != Ordering::Less {
            out.push(Violation::Order { row: p });
        }
    }
    out
}

#[derive(Deserialize)]
struct RawInvariants {
    classes: Vec<u32>,
    shift_minimal: Vec<Vec<u32>>,
}

/// Class sizes `n̄` (most desirable class first) and the matrix `𝓜` of
/// shift-minimal winning types, rows in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawInvariants")]
pub struct CharacteristicInvariants {
    classes: Vec<u32>,
    #[serde(rename = "shift_minimal")]
    rows: Vec<Vec<u32>>,
}

impl TryFrom<RawInvariants> for CharacteristicInvariants {
    type Error = Error;

    fn try_from(raw: RawInvariants) -> Result<Self> {
        Self::new(raw.classes, raw.shift_minimal)
    }
}

impl fmt::Display for CharacteristicInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n̄={:?} 𝓜={:?}", self.classes, self.rows)
    }
}

impl CharacteristicInvariants {
    /// Validates conditions (i) to (iv) exactly as given.
    pub fn new(classes: Vec<u32>, rows: Vec<Vec<u32>>) -> Result<Self> {
        let violations = validate_invariants(&classes, &rows);
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidInvariants(msg.join("; ")));
        }
        Ok(Self { classes, rows })
    }

    /// Sorts and deduplicates the rows before validating.
    pub fn from_unordered(classes: Vec<u32>, mut rows: Vec<Vec<u32>>) -> Result<Self> {
        rows.sort_by(|a, b| canonical_cmp(a, b));
        rows.dedup();
        Self::new(classes, rows)
    }

    pub(crate) fn new_unchecked(classes: Vec<u32>, rows: Vec<Vec<u32>>) -> Self {
        debug_assert!(validate_invariants(&classes, &rows).is_empty());
        Self { classes, rows }
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn t(&self) -> usize {
        self.classes.len()
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.classes.iter().map(|&x| x as usize).sum()
    }

    pub fn lattice(&self) -> TypeLattice {
        TypeLattice::new(&self.classes)
    }

    /// Winning test without range checks.
    pub fn is_winning_type(&self, s: &[u32]) -> bool {
        self.rows.iter().any(|m| type_dominates(s, m))
    }

    pub fn winning_type(&self, s: &[u32]) -> Result<bool> {
        self.lattice().check(s)?;
        Ok(self.is_winning_type(s))
    }

    /// The last class consists of null players.
    pub fn has_null_class(&self) -> bool {
        self.t() > 1 && self.rows.iter().all(|r| r[self.t() - 1] == 0)
    }

    /// The first class consists of vetoers.
    pub fn has_veto_class(&self) -> bool {
        self.rows.iter().all(|r| r[0] == self.classes[0])
    }

    pub fn table(&self) -> TypeTable {
        TypeTable::new(self)
    }

    pub fn shift_maximal_losing_types(&self) -> Vec<Vec<u32>> {
        self.table().shift_maximal_losing()
    }

    /// First player index of every class in the reconstructed game.
    pub fn offsets(&self) -> Vec<usize> {
        self.classes
            .iter()
            .scan(0usize, |acc, &nk| {
                let o = *acc;
                *acc += nk as usize;
                Some(o)
            })
            .collect()
    }

    /// The partition of the reconstructed game: consecutive blocks of players.
    pub fn partition(&self) -> PlayerPartition {
        let offsets = self.offsets();
        PlayerPartition {
            classes: self
                .classes
                .iter()
                .zip(offsets)
                .map(|(&nk, o)| (o..o + nk as usize).collect())
                .collect(),
            totally_ordered: true,
        }
    }

    /// A canonical coalition of type `s`: the first `s_k` players of class `k`.
    pub fn representative(&self, s: &[u32]) -> Coalition {
        let mut c = Coalition::EMPTY;
        for (o, &sk) in self.offsets().into_iter().zip(s) {
            for p in o..o + sk as usize {
                c = c.with(p);
            }
        }
        c
    }
}

/// Winning status of every element of `Λ(n̄)`.
#[derive(Clone, Debug)]
pub struct TypeTable {
    lattice: TypeLattice,
    winning: Vec<bool>,
}

impl TypeTable {
    pub fn new(ci: &CharacteristicInvariants) -> Self {
        let lattice = ci.lattice();
        let prefixed: Vec<Vec<u32>> = ci.rows().iter().map(|r| crate::lattice::prefix_sums(r)).collect();
        let t = lattice.t();
        let mut winning = Vec::with_capacity(lattice.len());
        let mut s = vec![0u32; t];
        let mut ps = vec![0u32; t];
        for idx in 0..lattice.len() {
            if idx > 0 {
                // increment the mixed-radix counter
                let mut k = t - 1;
                loop {
                    if s[k] < lattice.nbar()[k] {
                        s[k] += 1;
                        break;
                    }
                    s[k] = 0;
                    k -= 1;
                }
            }
            let mut acc = 0;
            for k in 0..t {
                acc += s[k];
                ps[k] = acc;
            }
            winning.push(
                prefixed
                    .iter()
                    .any(|m| m.iter().zip(&ps).all(|(a, b)| b >= a)),
            );
        }
        Self { lattice, winning }
    }

    pub fn lattice(&self) -> &TypeLattice {
        &self.lattice
    }

    pub fn winning_at(&self, idx: usize) -> bool {
        self.winning[idx]
    }

    /// Winning status; out-of-range vectors report `None`.
    pub fn is_winning(&self, s: &[u32]) -> Option<bool> {
        self.lattice
            .contains(s)
            .then(|| self.winning[self.lattice.index(s)])
    }

    pub fn is_losing(&self, s: &[u32]) -> bool {
        self.is_winning(s) == Some(false)
    }

    pub fn winning_types(&self) -> Vec<Vec<u32>> {
        self.filter(|_, _| true, true)
    }

    pub fn losing_types(&self) -> Vec<Vec<u32>> {
        self.filter(|_, _| true, false)
    }

    fn filter(&self, keep: impl Fn(&Self, usize) -> bool, status: bool) -> Vec<Vec<u32>> {
        (0..self.lattice.len())
            .filter(|&i| self.winning[i] == status && keep(self, i))
            .map(|i| self.lattice.vector(i))
            .collect()
    }

    /// Componentwise minimal winning types, in lattice index order.
    pub fn minimal_winning(&self) -> Vec<Vec<u32>> {
        let nbar = self.lattice.nbar().to_vec();
        self.filter(
            |tab, i| {
                let s = tab.lattice.vector(i);
                (0..nbar.len())
                    .all(|k| s[k] == 0 || !tab.winning[i - tab.lattice.stride(k)])
            },
            true,
        )
    }

    /// Componentwise maximal losing types, in lattice index order.
    pub fn maximal_losing(&self) -> Vec<Vec<u32>> {
        let nbar = self.lattice.nbar().to_vec();
        self.filter(
            |tab, i| {
                let s = tab.lattice.vector(i);
                (0..nbar.len())
                    .all(|k| s[k] == nbar[k] || tab.winning[i + tab.lattice.stride(k)])
            },
            false,
        )
    }

    /// `⪰`-maximal losing types (the matrix `𝓨`), in canonical order.
    pub fn shift_maximal_losing(&self) -> Vec<Vec<u32>> {
        let ml = self.maximal_losing();
        let mut out: Vec<Vec<u32>> = ml
            .iter()
            .filter(|a| !ml.iter().any(|b| b != *a && type_dominates(b, a)))
            .cloned()
            .collect();
        out.sort_by(|a, b| canonical_cmp(a, b));
        out
    }
}

/// Invariants of a complete game together with its ordered partition.
pub fn extract_invariants(game: &SimpleGame) -> Result<(CharacteristicInvariants, PlayerPartition)> {
    let partition = game.partition_players();
    if !partition.totally_ordered {
        return Err(Error::NotComplete);
    }
    // ⪰-minimal winning types are exactly the types of shift-minimal
    // winning coalitions, and each is the type of a minimal winning one.
    let mut types: Vec<Vec<u32>> = game
        .min_winning()
        .iter()
        .map(|&m| partition.type_of(m))
        .collect();
    types.sort();
    types.dedup();
    let rows: Vec<Vec<u32>> = types
        .iter()
        .filter(|a| !types.iter().any(|b| b != *a && type_dominates(a, b)))
        .cloned()
        .collect();
    let ci = CharacteristicInvariants::from_unordered(partition.sizes(), rows)?;
    Ok((ci, partition))
}

/// The explicit game on players `0..n`, class `k` occupying a consecutive
/// block.
pub fn reconstruct(ci: &CharacteristicInvariants) -> Result<SimpleGame> {
    let n = ci.n();
    if n > 64 {
        return Err(Error::PlayerCount(n));
    }
    let partition = ci.partition();
    let mut mins = Vec::new();
    for s in ci.table().minimal_winning() {
        let mut acc = vec![Coalition::EMPTY];
        for (k, &sk) in s.iter().enumerate() {
            let choices = combinations(&partition.classes[k], sk as usize);
            acc = acc
                .iter()
                .flat_map(|a| choices.iter().map(move |c| a.union(*c)))
                .collect();
        }
        mins.extend(acc);
    }
    SimpleGame::new(n, mins)
}

pub fn isomorphic(g1: &SimpleGame, g2: &SimpleGame) -> Result<bool> {
    Ok(extract_invariants(g1)?.0 == extract_invariants(g2)?.0)
}
