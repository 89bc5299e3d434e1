//! End-to-end checks on explicit games: extraction, reconstruction,
//! weightedness and trade certificates, with randomized inputs.

mod common;

use proptest::prelude::*;

use threshold_lab::document::{weighted_game, ExplicitDocument, GameDocument};
use threshold_lab::invariants::{extract_invariants, isomorphic, reconstruct};
use threshold_lab::trades::{expand_vectorial, find_failure, verify_transform, TransformVerdict};
use threshold_lab::weightedness::{decide_weighted, decide_weighted_game, GameWeightedness};
use threshold_lab::{Coalition, SimpleGame, TradeMode};

fn game_from_masks(n: usize, masks: &[u64]) -> Option<SimpleGame> {
    let gens: Vec<Coalition> = masks
        .iter()
        .map(|m| Coalition::from_bits(m & ((1 << n) - 1)))
        .filter(|c| !c.is_empty())
        .collect();
    SimpleGame::from_generators(n, gens).ok()
}

fn shuffle(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s = seed | 1;
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        perm.swap(i, (s % (i as u64 + 1)) as usize);
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weighted_inputs_are_recognized(
        weights in prop::collection::vec(0u64..7, 1..9),
        frac in 0.0f64..1.0,
    ) {
        let total: u64 = weights.iter().sum();
        prop_assume!(total > 0);
        let quota = 1 + ((total - 1) as f64 * frac) as u64;
        let game = weighted_game(quota, &weights).unwrap();
        match decide_weighted_game(&game) {
            GameWeightedness::Weighted { representation, partition } => {
                let mut w = vec![0u64; game.n()];
                for (k, class) in partition.iter().enumerate() {
                    for &p in class {
                        w[p] = representation.class_weights[k];
                    }
                }
                let check = weighted_game(representation.quota, &w).unwrap();
                prop_assert_eq!(check, game.clone());
            }
            other => prop_assert!(false, "verdict {:?}", other),
        }
        let (ci, _) = extract_invariants(&game).unwrap();
        prop_assert!(find_failure(&ci, TradeMode::Trade, 3).failing_k().is_none());
    }

    #[test]
    fn invariants_survive_relabeling(n in 1usize..7, masks in prop::collection::vec(any::<u64>(), 1..6), seed in any::<u64>()) {
        let Some(game) = game_from_masks(n, &masks) else { return Ok(()); };
        let perm = shuffle(n, seed);
        let moved = game.relabel(&perm).unwrap();
        prop_assert_eq!(game.is_complete(), moved.is_complete());
        match extract_invariants(&game) {
            Ok((ci, _)) => {
                prop_assert_eq!(&extract_invariants(&moved).unwrap().0, &ci);
                let back = reconstruct(&ci).unwrap();
                prop_assert!(isomorphic(&back, &game).unwrap());
                prop_assert_eq!(back.min_winning().len(), game.min_winning().len());
            }
            Err(_) => {
                let cert = game.swap_certificate().unwrap();
                prop_assert!(cert.verify(&game));
            }
        }
    }

    #[test]
    fn certificates_expand_to_player_level(n in 2usize..7, masks in prop::collection::vec(any::<u64>(), 1..6)) {
        let Some(game) = game_from_masks(n, &masks) else { return Ok(()); };
        let Ok((ci, partition)) = extract_invariants(&game) else { return Ok(()); };
        let weighted = decide_weighted(&ci).is_some();
        let report = find_failure(&ci, TradeMode::Trade, 4);
        prop_assert!(!weighted || report.failing_k().is_none());
        if let Some(v) = report.certificate() {
            let t = expand_vectorial(v, &partition).unwrap();
            prop_assert_eq!(verify_transform(&game, &t), TransformVerdict::ValidCertificate);
        }
    }

    #[test]
    fn explicit_documents_round_trip(n in 1usize..7, masks in prop::collection::vec(any::<u64>(), 1..6)) {
        let Some(game) = game_from_masks(n, &masks) else { return Ok(()); };
        let text = serde_json::to_string(&ExplicitDocument::from_game(&game)).unwrap();
        prop_assert_eq!(GameDocument::parse(&text).unwrap().to_game().unwrap(), game);
    }
}

#[test]
fn brute_force_oracle_on_five_players() {
    for ci in threshold_lab::enumeration::enumerate_complete(5, Default::default()) {
        let lp = decide_weighted(&ci).is_some();
        assert_eq!(lp, common::brute_force_weights(&ci, 16).is_some(), "{ci:?}");
        for mode in [TradeMode::Trade, TradeMode::Invariant] {
            assert_eq!(
                find_failure(&ci, mode, 3).failing_k(),
                common::first_trade(&ci, 3, mode == TradeMode::Invariant),
                "{ci:?} {mode}"
            );
        }
    }
}

#[test]
fn games_that_are_not_complete() {
    // two disjoint pairs: players 0 and 2 are incomparable
    let g = SimpleGame::new(4, vec![Coalition::from_players([0, 1]), Coalition::from_players([2, 3])]).unwrap();
    assert!(!g.is_complete());
    match decide_weighted_game(&g) {
        GameWeightedness::NotComplete { certificate } => assert!(certificate.verify(&g)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn two_class_parameters_over_enumeration() {
    use threshold_lab::enumeration::{for_each_complete, EnumFilter};
    use threshold_lab::trades::verify_vectorial;
    use threshold_lab::weightedness::{mp_parameters, mp_weighted_test, two_trade_certificate_t2};

    let one = num::rational::Ratio::from_integer(1);
    for n in 2..=12 {
        for_each_complete(n, EnumFilter::t(2), |ci| {
            let mp = mp_parameters(&ci).unwrap();
            assert!(mp.p_witness.is_some() && mp.p >= one, "{ci:?}: P = {}", mp.p);
            let weighted = decide_weighted(&ci).is_some();
            assert_eq!(mp_weighted_test(&ci).unwrap(), weighted, "{ci:?}");
            if !weighted {
                let cert = two_trade_certificate_t2(&ci).unwrap();
                assert!(verify_vectorial(&ci, &cert, TradeMode::Invariant), "{ci:?}: {cert}");
            }
        });
    }
}
