use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A set of players stored as a 64-bit mask; bit `i` set means player `i`
/// is a member.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The grand coalition on `n` players.
    pub const fn full(n: usize) -> Self {
        if n >= 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << n) - 1)
        }
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        let mut bits = 0u64;
        for p in players {
            debug_assert!(p < 64);
            bits |= 1u64 << p;
        }
        Self(bits)
    }

    pub const fn contains(self, player: usize) -> bool {
        self.0 >> player & 1 == 1
    }

    pub const fn with(self, player: usize) -> Self {
        Self(self.0 | 1u64 << player)
    }

    pub const fn without(self, player: usize) -> Self {
        Self(self.0 & !(1u64 << player))
    }

    /// Replace `out` by `inn`.
    pub const fn swap(self, out: usize, inn: usize) -> Self {
        self.without(out).with(inn)
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn union(self, other: Coalition) -> Self {
        Self(self.0 | other.0)
    }

    pub const fn intersection(self, other: Coalition) -> Self {
        Self(self.0 & other.0)
    }

    pub const fn difference(self, other: Coalition) -> Self {
        Self(self.0 & !other.0)
    }

    pub const fn complement(self, n: usize) -> Self {
        Self(!self.0 & Self::full(n).0)
    }

    pub fn players(self) -> Players {
        Players(self.0)
    }

    pub fn max_player(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }
}

pub struct Players(u64);

impl Iterator for Players {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Players {}

/// Lexicographic order on the sorted member lists, so `{0,2} < {1}` and
/// `{0} < {0,1}`.
impl Ord for Coalition {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let p = diff.trailing_zeros();
        let self_has = self.0 >> p & 1 == 1;
        let lacks = if self_has { other.0 } else { self.0 };
        // The side without p either stops before p (a prefix, hence smaller)
        // or continues with a larger element.
        let lacks_is_prefix = lacks >> p == 0;
        if self_has != lacks_is_prefix {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.players()).finish()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.players().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.players())
    }
}

impl<'de> Deserialize<'de> for Coalition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let players = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&p) = players.iter().find(|&&p| p >= 64) {
            return Err(serde::de::Error::custom(format!(
                "player index {p} exceeds 63"
            )));
        }
        Ok(Coalition::from_players(players))
    }
}
