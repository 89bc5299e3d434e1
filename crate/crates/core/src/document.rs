//! JSON game documents: explicit minimal winning coalitions, characteristic
//! invariants, or weights with a quota (per class or per player).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{combinations, PlayerPartition, SimpleGame};
use crate::invariants::{extract_invariants, CharacteristicInvariants};
use crate::lattice::TypeLattice;
use crate::weightedness::WeightedRepresentation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitDocument {
    pub n: usize,
    pub minimal_winning: Vec<Vec<usize>>,
}

impl ExplicitDocument {
    pub fn from_game(game: &SimpleGame) -> Self {
        Self {
            n: game.n(),
            minimal_winning: game.min_winning().iter().map(|c| c.players().collect()).collect(),
        }
    }

    pub fn to_game(&self) -> Result<SimpleGame> {
        let mut mins = Vec::with_capacity(self.minimal_winning.len());
        for m in &self.minimal_winning {
            if let Some(&p) = m.iter().find(|&&p| p >= self.n.min(64)) {
                return Err(Error::PlayerOutOfRange { player: p, n: self.n });
            }
            mins.push(Coalition::from_players(m.iter().copied()));
        }
        SimpleGame::new(self.n, mins)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerWeights {
    pub quota: u64,
    pub weights: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassWeightsDocument {
    quota: u64,
    class_weights: Vec<u64>,
    classes: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantsDocument {
    classes: Vec<u32>,
    shift_minimal: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameDocument {
    Explicit(SimpleGame),
    Invariants(CharacteristicInvariants),
    WeightedClasses(WeightedRepresentation),
    WeightedPlayers(PlayerWeights),
}

fn parse_as<T: for<'de> Deserialize<'de>>(text: &str, kind: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(format!("{kind} document: {e}")))
}

impl GameDocument {
    /// Detects the form from its keys, then parses the text again with the
    /// matching schema so errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Document(format!("malformed JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Document("top level must be a JSON object".into()))?;
        let has = |k: &str| obj.contains_key(k);
        if has("minimal_winning") {
            let doc: ExplicitDocument = parse_as(text, "explicit")?;
            Ok(Self::Explicit(doc.to_game()?))
        } else if has("shift_minimal") {
            let doc: InvariantsDocument = parse_as(text, "invariants")?;
            Ok(Self::Invariants(CharacteristicInvariants::new(doc.classes, doc.shift_minimal)?))
        } else if has("class_weights") {
            let doc: ClassWeightsDocument = parse_as(text, "weighted")?;
            if doc.class_weights.len() != doc.classes.len() {
                return Err(Error::Document(format!(
                    "weighted document: {} class weights for {} classes",
                    doc.class_weights.len(),
                    doc.classes.len()
                )));
            }
            Ok(Self::WeightedClasses(WeightedRepresentation {
                quota: doc.quota,
                class_weights: doc.class_weights,
                classes: doc.classes,
            }))
        } else if has("weights") {
            Ok(Self::WeightedPlayers(parse_as(text, "weighted")?))
        } else {
            Err(Error::Document(
                "expected one of the keys minimal_winning, shift_minimal, class_weights or weights".into(),
            ))
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Explicit(_) => "explicit",
            Self::Invariants(_) => "invariants",
            Self::WeightedClasses(_) | Self::WeightedPlayers(_) => "weighted",
        }
    }

    pub fn to_game(&self) -> Result<SimpleGame> {
        match self {
            Self::Explicit(g) => Ok(g.clone()),
            Self::Invariants(ci) => crate::invariants::reconstruct(ci),
            Self::WeightedClasses(rep) => weighted_game(rep.quota, &rep.player_weights()),
            Self::WeightedPlayers(pw) => weighted_game(pw.quota, &pw.weights),
        }
    }

    /// Invariants and, for explicit inputs, the partition of the original
    /// players. Invariant documents use consecutive blocks.
    pub fn to_invariants(&self) -> Result<(CharacteristicInvariants, PlayerPartition)> {
        match self {
            Self::Invariants(ci) => Ok((ci.clone(), ci.partition())),
            other => extract_invariants(&other.to_game()?),
        }
    }
}

/// The game `[q; w]`, built through classes of equal weight so large
/// symmetric games stay cheap.
pub fn weighted_game(quota: u64, weights: &[u64]) -> Result<SimpleGame> {
    let n = weights.len();
    if n == 0 || n > 64 {
        return Err(Error::PlayerCount(n));
    }
    if quota == 0 || weights.iter().sum::<u64>() < quota {
        return Err(Error::ImproperGame);
    }
    let mut distinct: Vec<u64> = weights.to_vec();
    distinct.sort_unstable_by(|a, b| b.cmp(a));
    distinct.dedup();
    let members: Vec<Vec<usize>> = distinct
        .iter()
        .map(|&w| (0..n).filter(|&p| weights[p] == w).collect())
        .collect();
    let sizes: Vec<u32> = members.iter().map(|m| m.len() as u32).collect();
    let lattice = TypeLattice::new(&sizes);
    let weight = |s: &[u32]| -> u64 { s.iter().zip(&distinct).map(|(&x, &w)| x as u64 * w).sum() };
    let mut mins = Vec::new();
    for s in lattice.iter() {
        if weight(&s) < quota {
            continue;
        }
        let minimal = (0..s.len()).all(|k| {
            if s[k] == 0 {
                return true;
            }
            let mut d = s.clone();
            d[k] -= 1;
            weight(&d) < quota
        });
        if !minimal {
            continue;
        }
        let mut acc = vec![Coalition::EMPTY];
        for (k, &sk) in s.iter().enumerate() {
            let choices = combinations(&members[k], sk as usize);
            acc = acc
                .iter()
                .flat_map(|a| choices.iter().map(move |c| a.union(*c)))
                .collect();
        }
        mins.extend(acc);
    }
    SimpleGame::new(n, mins)
}
