//! Named games and parametric families of complete games, given by their
//! characteristic invariants, plus the two explicit real-world games.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{combinations, SimpleGame};
use crate::invariants::CharacteristicInvariants;
use crate::lattice::type_dominates;
use crate::trades::TradeMode;

fn build(classes: &[u32], rows: &[Vec<u32>]) -> Result<CharacteristicInvariants> {
    CharacteristicInvariants::new(classes.to_vec(), rows.to_vec())
        .map_err(|e| Error::FamilyParams(e.to_string()))
}

fn fixed(classes: &[u32], rows: &[&[u32]]) -> CharacteristicInvariants {
    let rows: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
    build(classes, &rows).expect("built-in invariants are valid")
}

/// Security council: 5 permanent members with veto, 10 others, 9 votes.
pub fn unsc() -> CharacteristicInvariants {
    fixed(&[5, 10], &[&[5, 4]])
}

/// Amendment rule: 7 of the 10 provinces holding at least half of the
/// population; only the two largest provinces matter individually.
pub fn canada() -> CharacteristicInvariants {
    fixed(&[2, 8], &[&[1, 6]])
}

/// Smallest game with three classes and two rows that is robust for
/// invariant trades of length 3 but not 4.
pub fn fm_smallest() -> CharacteristicInvariants {
    fixed(&[2, 2, 3], &[&[2, 1, 0], &[1, 0, 3]])
}

/// `n̄ = (2,m,m)`, robust for invariant trades up to `m − 1`.
pub fn lemma_5_1(m: u32) -> Result<CharacteristicInvariants> {
    if m < 3 {
        return Err(Error::FamilyParams(format!("lemma_5_1 needs m >= 3, got {m}")));
    }
    build(&[2, m, m], &[vec![2, 0, 1], vec![1, 1, m - 1]])
}

/// `n̄ = (2,m,m)` with four rows, robust for invariant trades up to `m`.
pub fn lemma_5_2(m: u32) -> Result<CharacteristicInvariants> {
    if m < 3 {
        return Err(Error::FamilyParams(format!("lemma_5_2 needs m >= 3, got {m}")));
    }
    let rows = [vec![2, 1, 0], vec![2, 0, 2], vec![1, 0, m], vec![0, m, m - 1]];
    // for m = 3 the row (2,0,2) dominates (1,0,3) and is redundant
    let rows: Vec<Vec<u32>> = rows
        .iter()
        .filter(|a| !rows.iter().any(|b| b != *a && type_dominates(a, b)))
        .cloned()
        .collect();
    build(&[2, m, m], &rows)
}

/// First three-class family that is 2-trade robust but not 3-trade robust.
pub fn lemma_6_1_first(k1: u32, k2: u32, k3: u32, l: u32) -> Result<CharacteristicInvariants> {
    let (n1, n2, n3) = (3 + k1 + 2 * l, 3 + k2, 5 + k3 + 2 * l);
    build(
        &[n1, n2, n3],
        &[
            vec![n1 - (l + 1), n2 - 1, n3 - (l + 2)],
            vec![n1 - 2 * (l + 1), n2 - 1, n3],
        ],
    )
}

/// Second three-class family that is 2-trade robust but not 3-trade robust.
pub fn lemma_6_1_second(k1: u32, k2: u32, l: u32) -> Result<CharacteristicInvariants> {
    let (n1, n2, n3) = (3 + k1 + 2 * l, 3 + k2, 5 + 2 * l);
    build(
        &[n1, n2, n3],
        &[vec![l + 1, 1, l + 2], vec![0, 1, 2 * (l + 2)]],
    )
}

/// The four games on 11 players with three classes that are 2-trade
/// robust but not 3-trade robust (`i` in `1..=4`).
pub fn n11_matrix(i: u32) -> Result<CharacteristicInvariants> {
    let rows: &[&[u32]] = match i {
        1 => &[&[2, 2, 3], &[1, 2, 5]],
        2 => &[&[1, 1, 2], &[0, 1, 4]],
        3 => &[&[3, 3, 0], &[3, 0, 4], &[2, 3, 2], &[0, 3, 5]],
        4 => &[&[3, 0, 0], &[2, 0, 2], &[0, 3, 1], &[0, 0, 5]],
        _ => return Err(Error::FamilyParams(format!("n11 index must be 1..=4, got {i}"))),
    };
    Ok(fixed(&[3, 3, 5], rows))
}

/// A four-class game on 9 players that is 2-trade robust but not 3-trade
/// robust.
pub fn t4_n9() -> CharacteristicInvariants {
    fixed(
        &[1, 2, 3, 3],
        &[
            &[1, 0, 1, 0],
            &[0, 2, 0, 1],
            &[0, 1, 2, 0],
            &[0, 1, 1, 2],
            &[0, 0, 3, 2],
        ],
    )
}

/// Adds a class of size 2 whose members are needed once in every row. If
/// the last class is null, the new class goes in front of it. The robustness
/// boundary of the base game is preserved in both trade modes.
pub fn lift_types(base: &CharacteristicInvariants) -> Result<CharacteristicInvariants> {
    let t = base.t();
    let (classes, rows): (Vec<u32>, Vec<Vec<u32>>) = if base.has_null_class() {
        let mut classes = base.classes()[..t - 1].to_vec();
        classes.extend([2, base.classes()[t - 1]]);
        let rows = base
            .rows()
            .iter()
            .map(|r| {
                let mut r2 = r[..t - 1].to_vec();
                r2.extend([1, 0]);
                r2
            })
            .collect();
        (classes, rows)
    } else {
        let mut classes = base.classes().to_vec();
        classes.push(2);
        let rows = base
            .rows()
            .iter()
            .map(|r| {
                let mut r2 = r.clone();
                r2.push(1);
                r2
            })
            .collect();
        (classes, rows)
    };
    build(&classes, &rows)
}

/// A family member by name and parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilySpec {
    Unsc,
    Canada,
    FmSmallest,
    Lemma51 { m: u32 },
    Lemma52 { m: u32 },
    Lemma61First { k1: u32, k2: u32, k3: u32, l: u32 },
    Lemma61Second { k1: u32, k2: u32, l: u32 },
    N11 { i: u32 },
    T4N9,
    Lift { base: Box<FamilySpec>, mode: TradeMode },
}

pub const FAMILY_NAMES: &[&str] = &[
    "unsc",
    "canada",
    "fm_smallest",
    "lemma_5_1",
    "lemma_5_2",
    "lemma_6_1_first",
    "lemma_6_1_second",
    "n11_matrices",
    "t4_n9",
];

impl FamilySpec {
    /// Parses a family name with `key=value` parameters. Unknown keys and
    /// missing required keys are errors; `k*` and `l` default to 0.
    pub fn parse(name: &str, params: &BTreeMap<String, u32>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "unsc" | "canada" | "fm_smallest" | "t4_n9" => &[],
            "lemma_5_1" | "lemma_5_2" => &["m"],
            "lemma_6_1_first" => &["k1", "k2", "k3", "l"],
            "lemma_6_1_second" => &["k1", "k2", "l"],
            "n11_matrices" | "n11" => &["i"],
            _ => {
                return Err(Error::FamilyParams(format!(
                    "unknown family '{name}' (known: {})",
                    FAMILY_NAMES.join(", ")
                )))
            }
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::FamilyParams(format!("family {name} has no parameter '{bad}'")));
        }
        let opt = |k: &str| params.get(k).copied().unwrap_or(0);
        let req = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::FamilyParams(format!("family {name} needs parameter '{k}'")))
        };
        Ok(match name {
            "unsc" => Self::Unsc,
            "canada" => Self::Canada,
            "fm_smallest" => Self::FmSmallest,
            "t4_n9" => Self::T4N9,
            "lemma_5_1" => Self::Lemma51 { m: req("m")? },
            "lemma_5_2" => Self::Lemma52 { m: req("m")? },
            "lemma_6_1_first" => Self::Lemma61First {
                k1: opt("k1"),
                k2: opt("k2"),
                k3: opt("k3"),
                l: opt("l"),
            },
            "lemma_6_1_second" => Self::Lemma61Second {
                k1: opt("k1"),
                k2: opt("k2"),
                l: opt("l"),
            },
            _ => Self::N11 { i: req("i")? },
        })
    }

    pub fn generate(&self) -> Result<CharacteristicInvariants> {
        match self {
            Self::Unsc => Ok(unsc()),
            Self::Canada => Ok(canada()),
            Self::FmSmallest => Ok(fm_smallest()),
            Self::Lemma51 { m } => lemma_5_1(*m),
            Self::Lemma52 { m } => lemma_5_2(*m),
            Self::Lemma61First { k1, k2, k3, l } => lemma_6_1_first(*k1, *k2, *k3, *l),
            Self::Lemma61Second { k1, k2, l } => lemma_6_1_second(*k1, *k2, *l),
            Self::N11 { i } => n11_matrix(*i),
            Self::T4N9 => Ok(t4_n9()),
            Self::Lift { base, .. } => lift_types(&base.generate()?),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unsc => write!(f, "unsc"),
            Self::Canada => write!(f, "canada"),
            Self::FmSmallest => write!(f, "fm_smallest"),
            Self::Lemma51 { m } => write!(f, "lemma_5_1(m={m})"),
            Self::Lemma52 { m } => write!(f, "lemma_5_2(m={m})"),
            Self::Lemma61First { k1, k2, k3, l } => {
                write!(f, "lemma_6_1_first(k1={k1},k2={k2},k3={k3},l={l})")
            }
            Self::Lemma61Second { k1, k2, l } => write!(f, "lemma_6_1_second(k1={k1},k2={k2},l={l})"),
            Self::N11 { i } => write!(f, "n11_matrices(i={i})"),
            Self::T4N9 => write!(f, "t4_n9"),
            Self::Lift { base, mode } => write!(f, "lift[{mode}]({base})"),
        }
    }
}

/// Parameters `(k1, k2, k3, l)` if `ci` belongs to the first family.
pub fn lemma_6_1_first_params(ci: &CharacteristicInvariants) -> Option<(u32, u32, u32, u32)> {
    if ci.t() != 3 || ci.r() != 2 {
        return None;
    }
    let n = ci.classes();
    let l = n[0].checked_sub(ci.rows()[0][0] + 1)?;
    let k1 = n[0].checked_sub(3 + 2 * l)?;
    let k2 = n[1].checked_sub(3)?;
    let k3 = n[2].checked_sub(5 + 2 * l)?;
    (lemma_6_1_first(k1, k2, k3, l).ok()? == *ci).then_some((k1, k2, k3, l))
}

/// Parameters `(k1, k2, l)` if `ci` belongs to the second family.
pub fn lemma_6_1_second_params(ci: &CharacteristicInvariants) -> Option<(u32, u32, u32)> {
    if ci.t() != 3 || ci.r() != 2 {
        return None;
    }
    let n = ci.classes();
    let l = n[2].checked_sub(5)?;
    if l % 2 != 0 {
        return None;
    }
    let l = l / 2;
    let k1 = n[0].checked_sub(3 + 2 * l)?;
    let k2 = n[1].checked_sub(3)?;
    (lemma_6_1_second(k1, k2, l).ok()? == *ci).then_some((k1, k2, l))
}

pub fn in_lemma_6_1(ci: &CharacteristicInvariants) -> bool {
    lemma_6_1_first_params(ci).is_some() || lemma_6_1_second_params(ci).is_some()
}

/// All members of either family on exactly `n` players.
pub fn lemma_6_1_instances(n: u32) -> Vec<CharacteristicInvariants> {
    let mut out = Vec::new();
    for l in 0..=n / 2 {
        for k1 in 0..=n {
            for k2 in 0..=n {
                let base = 3 + k1 + 2 * l + 3 + k2;
                if base + 5 + 2 * l > n {
                    continue;
                }
                let k3 = n - base - 5 - 2 * l;
                if let Ok(ci) = lemma_6_1_first(k1, k2, k3, l) {
                    out.push(ci);
                }
                if k3 == 0 {
                    if let Ok(ci) = lemma_6_1_second(k1, k2, l) {
                        out.push(ci);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Players 0..5 permanent, 5..15 elected; nine votes including all five
/// permanent members.
pub fn unsc_game() -> SimpleGame {
    let permanent = Coalition::full(5);
    let elected: Vec<usize> = (5..15).collect();
    let mins = combinations(&elected, 4)
        .into_iter()
        .map(|c| c.union(permanent))
        .collect();
    SimpleGame::new(15, mins).expect("valid game")
}

/// Province populations in percent, largest first: Ontario, Quebec,
/// British Columbia, Alberta, Manitoba, Saskatchewan, Nova Scotia,
/// New Brunswick, Newfoundland, Prince Edward Island.
pub const CANADA_POPULATION: [u32; 10] = [34, 29, 9, 7, 5, 5, 4, 3, 3, 1];

pub fn canada_game() -> SimpleGame {
    SimpleGame::from_winning_fn(10, |s| {
        let pop: u32 = s.players().map(|p| CANADA_POPULATION[p]).sum();
        s.len() >= 7 && pop >= 50
    })
    .expect("valid game")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::extract_invariants;

    #[test]
    fn stated_instances() {
        assert_eq!(lemma_5_1(3).unwrap(), fixed(&[2, 3, 3], &[&[2, 0, 1], &[1, 1, 2]]));
        assert_eq!(lemma_6_1_first(0, 0, 0, 0).unwrap(), n11_matrix(1).unwrap());
        assert_eq!(lemma_6_1_second(0, 0, 0).unwrap(), n11_matrix(2).unwrap());
        assert_eq!(unsc().classes(), &[5, 10]);
        assert!(lemma_5_1(2).is_err());
        assert!(n11_matrix(5).is_err());
    }

    #[test]
    fn families_are_valid_over_ranges() {
        for m in 3..9 {
            lemma_5_1(m).unwrap();
            lemma_5_2(m).unwrap();
        }
        for k1 in 0..3 {
            for k2 in 0..3 {
                for l in 0..3 {
                    for k3 in 0..3 {
                        let ci = lemma_6_1_first(k1, k2, k3, l).unwrap();
                        assert_eq!(lemma_6_1_first_params(&ci), Some((k1, k2, k3, l)));
                    }
                    let ci = lemma_6_1_second(k1, k2, l).unwrap();
                    assert_eq!(lemma_6_1_second_params(&ci), Some((k1, k2, l)));
                }
            }
        }
        assert!(!in_lemma_6_1(&fm_smallest()));
    }

    #[test]
    fn instance_listing() {
        let mut expected = vec![n11_matrix(1).unwrap(), n11_matrix(2).unwrap()];
        expected.sort();
        assert_eq!(lemma_6_1_instances(11), expected);
        assert!(lemma_6_1_instances(10).is_empty());
        assert!(lemma_6_1_instances(12).iter().all(|ci| ci.n() == 12 && in_lemma_6_1(ci)));
    }

    #[test]
    fn lifting() {
        let base = lemma_5_1(3).unwrap();
        let lifted = lift_types(&base).unwrap();
        assert_eq!(lifted.classes(), &[2, 3, 3, 2]);
        assert_eq!(lifted.r(), base.r());
        assert_eq!(lifted.rows()[0], vec![2, 0, 1, 1]);
        let nulls = fixed(&[2, 3], &[&[2, 0]]);
        let lifted = lift_types(&nulls).unwrap();
        assert_eq!(lifted.classes(), &[2, 2, 3]);
        assert_eq!(lifted.rows(), &[vec![2, 1, 0]]);
    }

    #[test]
    fn parsing() {
        let mut p = BTreeMap::new();
        p.insert("m".to_string(), 4);
        assert_eq!(FamilySpec::parse("lemma_5_1", &p).unwrap(), FamilySpec::Lemma51 { m: 4 });
        assert!(FamilySpec::parse("lemma_6_1_first", &p).is_err());
        assert!(FamilySpec::parse("lemma_5_2", &BTreeMap::new()).is_err());
        assert!(FamilySpec::parse("nope", &BTreeMap::new()).is_err());
        let lift = FamilySpec::Lift { base: Box::new(FamilySpec::Canada), mode: TradeMode::Invariant };
        assert_eq!(lift.generate().unwrap().classes(), &[2, 8, 2]);
    }

    #[test]
    fn explicit_games_match_invariants() {
        assert_eq!(extract_invariants(&unsc_game()).unwrap().0, unsc());
        assert_eq!(extract_invariants(&canada_game()).unwrap().0, canada());
    }
}
