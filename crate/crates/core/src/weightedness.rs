//! Deciding weightedness exactly and synthesizing integer weights; the
//! two-class exchange-rate parameters `M`, `P` and the constructive 2-trade
//! certificate that exists whenever `M·P ≥ 1`.

use std::cmp::Ordering;

use num::rational::Ratio;
use num::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{SimpleGame, SwapCertificate};
use crate::invariants::{extract_invariants, CharacteristicInvariants, TypeTable};
use crate::lattice::prefix_sums;
use crate::lp::{integerize, HomogeneousSystem};
use crate::trades::VectorialTrade;

/// `[q; w₁(n₁), …, w_t(n_t)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedRepresentation {
    pub quota: u64,
    pub class_weights: Vec<u64>,
    pub classes: Vec<u32>,
}

impl WeightedRepresentation {
    pub fn weight_of(&self, s: &[u32]) -> u64 {
        s.iter()
            .zip(&self.class_weights)
            .map(|(&x, &w)| x as u64 * w)
            .sum()
    }

    /// Exhaustive check over `Λ(n̄)`: winning types reach the quota, losing
    /// ones stay strictly below.
    pub fn verify(&self, ci: &CharacteristicInvariants) -> bool {
        if ci.classes() != self.classes.as_slice() {
            return false;
        }
        let table = ci.table();
        let lat = table.lattice();
        (0..lat.len()).all(|i| {
            let w = self.weight_of(&lat.vector(i));
            table.winning_at(i) == (w >= self.quota)
        })
    }

    /// Weights repeated per player, classes in order.
    pub fn player_weights(&self) -> Vec<u64> {
        self.classes
            .iter()
            .zip(&self.class_weights)
            .flat_map(|(&nk, &w)| std::iter::repeat_n(w, nk as usize))
            .collect()
    }
}

/// Strict system in the prefix-difference basis `d_k = w_k − w_{k+1}`
/// (with `w_{t+1} = 0`): `s·w = P(s)·d`. Rows are `P(m) − P(α)` for rows
/// `m` of `𝓜` and shift-maximal losing `α`, plus `d_k > 0` for `k < t` and
/// `d_t ≥ 0`.
pub fn weight_system(ci: &CharacteristicInvariants, losing: &[Vec<u32>]) -> HomogeneousSystem {
    let t = ci.t();
    let mut sys = HomogeneousSystem::new(t);
    for m in ci.rows() {
        let pm = prefix_sums(m);
        for a in losing {
            let pa = prefix_sums(a);
            sys.push(
                pm.iter().zip(&pa).map(|(&x, &y)| x as i64 - y as i64).collect(),
                true,
            );
        }
    }
    for k in 0..t {
        let mut e = vec![0; t];
        e[k] = 1;
        sys.push(e, k + 1 < t);
    }
    sys
}

pub fn decide_weighted(ci: &CharacteristicInvariants) -> Option<WeightedRepresentation> {
    let table = ci.table();
    let losing = table.shift_maximal_losing();
    if losing.is_empty() {
        // every type wins except possibly nothing: impossible for a proper game
        unreachable!("the empty coalition always loses");
    }
    let d = weight_system(ci, &losing).solve()?;
    Some(representation_from_differences(ci, &table, &d))
}

fn representation_from_differences(
    ci: &CharacteristicInvariants,
    table: &TypeTable,
    d: &[num::rational::BigRational],
) -> WeightedRepresentation {
    let d = integerize(d);
    let t = d.len();
    let mut w = vec![0u64; t];
    let mut acc = num::BigInt::from(0);
    for k in (0..t).rev() {
        acc += &d[k];
        w[k] = acc.to_u64().expect("weights fit in u64");
    }
    let quota = table
        .winning_types()
        .iter()
        .map(|s| s.iter().zip(&w).map(|(&x, &wk)| x as u64 * wk).sum::<u64>())
        .min()
        .expect("the grand coalition wins");
    WeightedRepresentation {
        quota,
        class_weights: w,
        classes: ci.classes().to_vec(),
    }
}

/// Verdict for an explicit game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GameWeightedness {
    Weighted {
        representation: WeightedRepresentation,
        /// `partition[k]` lists the players of class `k`.
        partition: Vec<Vec<usize>>,
    },
    NotWeighted,
    NotComplete {
        certificate: SwapCertificate,
    },
}

pub fn decide_weighted_game(game: &SimpleGame) -> GameWeightedness {
    match extract_invariants(game) {
        Ok((ci, partition)) => match decide_weighted(&ci) {
            Some(representation) => GameWeightedness::Weighted {
                representation,
                partition: partition.classes,
            },
            None => GameWeightedness::NotWeighted,
        },
        Err(_) => GameWeightedness::NotComplete {
            certificate: game
                .swap_certificate()
                .expect("a game without completeness has a swap certificate"),
        },
    }
}

/// Explicit weights for single-row games with two classes and no trivial
/// players, when the second entry is `1` or `n₂ − 1`.
pub fn closed_form_r1(ci: &CharacteristicInvariants) -> Result<WeightedRepresentation> {
    if ci.r() != 1 || ci.t() != 2 {
        return Err(Error::NotCovered("needs one row and two classes".into()));
    }
    if ci.has_null_class() || ci.has_veto_class() {
        return Err(Error::NotCovered("game has null players or vetoers".into()));
    }
    let (n1, n2) = (ci.classes()[0] as u64, ci.classes()[1] as u64);
    let (m1, m2) = (ci.rows()[0][0] as u64, ci.rows()[0][1] as u64);
    let (w, quota) = if m2 == 1 {
        ((n2, 1), m1 * n2 + 1)
    } else if m2 + 1 == n2 {
        let c1 = n1.min(m1 + n2 - 2);
        if c1 == n1 {
            let w = (n1 - m1 + 2, n1 - m1 + 1);
            (w, m1 * w.0 + (n2 - 1) * w.1)
        } else {
            ((n2, n2 - 1), m1 * n2 + (n2 - 1) * (n2 - 1))
        }
    } else {
        return Err(Error::NotCovered(format!(
            "second entry {m2} is neither 1 nor {}",
            n2 - 1
        )));
    };
    Ok(WeightedRepresentation {
        quota,
        class_weights: vec![w.0, w.1],
        classes: ci.classes().to_vec(),
    })
}

pub type Rational = Ratio<i64>;

fn serialize_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A winning type and a losing type attaining `M` or `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpWitness {
    pub winning: Vec<u32>,
    pub losing: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpParameters {
    #[serde(serialize_with = "serialize_ratio")]
    pub m: Rational,
    #[serde(serialize_with = "serialize_ratio")]
    pub p: Rational,
    pub m_witness: Option<MpWitness>,
    pub p_witness: Option<MpWitness>,
}

impl MpParameters {
    pub fn product(&self) -> Rational {
        self.m * self.p
    }
}

/// `M = max (x'−x)/(y−y')` over winning `(x,y)`, losing `(x',y')`, `x' ≥ x`;
/// `P = max (y'−y)/(x−x')` over `x' < x`. Ties prefer the smallest `x'−x`
/// (resp. `y'−y`), then the lexicographically smallest pair.
pub fn mp_parameters(ci: &CharacteristicInvariants) -> Result<MpParameters> {
    if ci.t() != 2 {
        return Err(Error::NotTwoClasses(ci.t()));
    }
    let table = ci.table();
    let winning = table.winning_types();
    let losing = table.losing_types();
    type Best = Option<(Rational, i64, Vec<u32>, Vec<u32>)>;
    let better = |cand: &(Rational, i64, Vec<u32>, Vec<u32>), best: &Best| match best {
        None => true,
        Some(b) => match cand.0.cmp(&b.0) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (cand.1, &cand.2, &cand.3) < (b.1, &b.2, &b.3),
        },
    };
    let mut best_m: Best = None;
    let mut best_p: Best = None;
    for w in &winning {
        let (x, y) = (w[0] as i64, w[1] as i64);
        for l in &losing {
            let (xl, yl) = (l[0] as i64, l[1] as i64);
            let cand = if xl >= x {
                // y > y' holds since (x', y') would otherwise dominate (x, y)
                (Rational::new(xl - x, y - yl), xl - x, w.clone(), l.clone())
            } else {
                (Rational::new(yl - y, x - xl), yl - y, w.clone(), l.clone())
            };
            let slot = if xl >= x { &mut best_m } else { &mut best_p };
            if better(&cand, slot) {
                *slot = Some(cand);
            }
        }
    }
    let split = |b: Best| match b {
        Some((v, _, w, l)) => (v, Some(MpWitness { winning: w, losing: l })),
        None => (Rational::from_integer(0), None),
    };
    let (m, m_witness) = split(best_m);
    let (p, p_witness) = split(best_p);
    Ok(MpParameters {
        m,
        p,
        m_witness,
        p_witness,
    })
}

pub fn mp_weighted_test(ci: &CharacteristicInvariants) -> Result<bool> {
    let mp = mp_parameters(ci)?;
    Ok(mp.product() < Rational::from_integer(1))
}

/// A 2-trade whose pre-trade types are rows of `𝓜`, built from the `M`/`P`
/// witnesses by the three-case construction and then shifted down until
/// both pre-trade types are shift-minimal.
pub fn two_trade_certificate_t2(ci: &CharacteristicInvariants) -> Result<VectorialTrade> {
    let mp = mp_parameters(ci)?;
    if mp.product() < Rational::from_integer(1) {
        return Err(Error::Weighted);
    }
    let table = ci.table();
    let (mw, pw) = match (&mp.m_witness, &mp.p_witness) {
        (Some(m), Some(p)) => (m, p),
        _ => return Err(Error::Weighted),
    };
    let (a, b) = (mw.winning[0] as i64, mw.winning[1] as i64);
    let (c, d) = (mw.losing[0] as i64, mw.losing[1] as i64);
    let (a1, b1) = (pw.winning[0] as i64, pw.winning[1] as i64);
    let (c1, d1) = (pw.losing[0] as i64, pw.losing[1] as i64);

    let (pre, post): ([[i64; 2]; 2], [[i64; 2]; 2]) = if c - a >= a1 - c1 && b - d <= d1 - b1 {
        // (a): the losing pair covers the winning pair; trim the excess
        let mut post = [[c, d], [c1, d1]];
        let target = [a + a1, b + b1];
        for k in 0..2 {
            let mut excess = post[0][k] + post[1][k] - target[k];
            for row in post.iter_mut() {
                let cut = excess.min(row[k]);
                row[k] -= cut;
                excess -= cut;
            }
        }
        ([[a, b], [a1, b1]], post)
    } else if c - a > a1 - c1 {
        // (b)
        let mid = [a + a1 - c1, b + b1 - d1];
        ([[a, b], [a1, b1]], [[c1, d1], mid])
    } else {
        // (c)
        let mid = [c + c1 - a, d + d1 - b];
        ([[a, b], mid], [[c, d], [c1, d1]])
    };
    let to_u = |v: [i64; 2]| vec![v[0] as u32, v[1] as u32];
    let mut pre: Vec<Vec<u32>> = pre.iter().map(|&v| to_u(v)).collect();
    let mut post: Vec<Vec<u32>> = post.iter().map(|&v| to_u(v)).collect();
    debug_assert!(pre.iter().all(|s| table.is_winning(s) == Some(true)));
    debug_assert!(post.iter().all(|s| table.is_losing(s)));
    lift_to_shift_minimal(ci, &table, &mut pre, &mut post);
    Ok(VectorialTrade::from_lists(&pre, &post))
}

/// Reduces winning pre-trade types to rows of `𝓜`, adjusting the losing
/// post-trade side so the trade stays balanced and losing.
pub(crate) fn lift_to_shift_minimal(
    ci: &CharacteristicInvariants,
    table: &TypeTable,
    pre: &mut [Vec<u32>],
    post: &mut [Vec<u32>],
) {
    let t = ci.t();
    loop {
        let mut changed = false;
        for p in pre.iter_mut() {
            // drop players while still winning
            for k in 0..t {
                while p[k] > 0 && {
                    let mut s = p.clone();
                    s[k] -= 1;
                    table.is_winning(&s) == Some(true)
                } {
                    p[k] -= 1;
                    let j = post.iter().position(|l| l[k] > 0).expect("balanced trade");
                    post[j][k] -= 1;
                    changed = true;
                }
            }
            // shift a member to the next class with room
            for k in 0..t.saturating_sub(1) {
                if p[k] == 0 {
                    continue;
                }
                let Some(to) = (k + 1..t).find(|&h| p[h] < ci.classes()[h]) else {
                    continue;
                };
                let mut s = p.clone();
                s[k] -= 1;
                s[to] += 1;
                if table.is_winning(&s) != Some(true) {
                    continue;
                }
                let j = post
                    .iter()
                    .position(|l| l[k] > 0 && l[to] < ci.classes()[to]);
                let Some(j) = j else {
                    // never happens with two classes
                    continue;
                };
                *p = s;
                post[j][k] -= 1;
                post[j][to] += 1;
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{canada, unsc};

    fn ci(classes: &[u32], rows: &[&[u32]]) -> CharacteristicInvariants {
        CharacteristicInvariants::new(classes.to_vec(), rows.iter().map(|r| r.to_vec()).collect())
            .unwrap()
    }

    #[test]
    fn unsc_is_weighted() {
        let rep = decide_weighted(&unsc()).unwrap();
        assert!(rep.verify(&unsc()));
        let fixed = WeightedRepresentation {
            quota: 39,
            class_weights: vec![7, 1],
            classes: vec![5, 10],
        };
        assert!(fixed.verify(&unsc()));
    }

    #[test]
    fn canada_is_not_weighted() {
        assert_eq!(decide_weighted(&canada()), None);
    }

    #[test]
    fn k_out_of_n_unit_weights() {
        let rep = decide_weighted(&ci(&[7], &[&[4]])).unwrap();
        assert_eq!((rep.quota, rep.class_weights.clone()), (4, vec![1]));
    }

    #[test]
    fn closed_form_examples() {
        let a = ci(&[3, 4], &[&[2, 1]]);
        let rep = closed_form_r1(&a).unwrap();
        assert_eq!((rep.class_weights.clone(), rep.quota), (vec![4, 1], 9));
        assert!(rep.verify(&a));
        let b = ci(&[3, 4], &[&[2, 3]]);
        let rep = closed_form_r1(&b).unwrap();
        assert_eq!((rep.class_weights.clone(), rep.quota), (vec![3, 2], 12));
        assert!(rep.verify(&b));
        assert!(matches!(closed_form_r1(&unsc()), Err(Error::NotCovered(_))));
        assert!(matches!(closed_form_r1(&ci(&[3, 5], &[&[2, 2]])), Err(Error::NotCovered(_))));
    }

    #[test]
    fn closed_form_agrees_with_lp() {
        for n1 in 1..6u32 {
            for n2 in 2..7u32 {
                for m1 in 1..=n1 {
                    for m2 in [1, n2 - 1] {
                        let Ok(c) = CharacteristicInvariants::new(vec![n1, n2], vec![vec![m1, m2]]) else {
                            continue;
                        };
                        if let Ok(rep) = closed_form_r1(&c) {
                            assert!(rep.verify(&c), "{c}");
                            assert!(decide_weighted(&c).is_some());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mp_values() {
        let mp = mp_parameters(&canada()).unwrap();
        assert_eq!(mp.m, Rational::new(1, 2));
        // the maximum is attained by (1,6) winning against (0,8) losing
        assert_eq!(mp.p, Rational::from_integer(2));
        assert_eq!(mp.product(), Rational::from_integer(1));
        assert!(!mp_weighted_test(&canada()).unwrap());
        let u = mp_parameters(&unsc()).unwrap();
        assert_eq!(u.m, Rational::from_integer(0));
        assert_eq!(u.p, Rational::from_integer(6));
        assert!(mp_weighted_test(&unsc()).unwrap());
        assert_eq!(mp_parameters(&ci(&[2, 2, 2], &[&[1, 1, 1]])).unwrap_err(), Error::NotTwoClasses(3));
    }

    #[test]
    fn canada_two_trade() {
        let cert = two_trade_certificate_t2(&canada()).unwrap();
        assert_eq!(
            cert,
            VectorialTrade::from_lists(&[vec![1, 6], vec![1, 6]], &[vec![2, 4], vec![0, 8]])
        );
        assert_eq!(two_trade_certificate_t2(&unsc()), Err(Error::Weighted));
    }
}
