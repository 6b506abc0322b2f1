mod common;

use common::{mpp_games, naive_attractor, penalty_games, shift_priorities};
use gamesolve::graph::{attractor, is_subarena, is_trap};
use gamesolve::mpp::{eval_p1_memoryless_mpp, eval_p2_memoryless_mpp, extract_p2_optimal, solve_mpp};
use gamesolve::oracle::StrategySpace;
use gamesolve::penalty::{bar_sets, reduce_exponential, BarMode};
use gamesolve::{Game, Owner, Rat, StateId, StateSet, Value};
use proptest::prelude::*;

fn subset(n: usize, mask: u64) -> StateSet {
    StateSet::from_mask(n, mask & ((1u64 << n) - 1))
}

/// `g` with every weight mapped by `f`, same states.
fn reweigh(g: &Game, f: impl Fn(i64) -> i64) -> Game {
    g.map_weights(f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn attractor_is_the_naive_fixed_point(g in mpp_games(8, 3, 4, 3), mask: u64) {
        let s = subset(g.num_states(), mask);
        for p in [Owner::P1, Owner::P2] {
            let a = attractor(&g, p, &s);
            prop_assert_eq!(&a.set, &naive_attractor(&g, p, &s));
            // strategy moves stay in the attractor and lower the rank
            for q in a.set.difference(&s).iter() {
                if g.owner(q) == p {
                    let d = a.strategy[q.0].unwrap();
                    prop_assert!(g.weight(q, d).is_some());
                    prop_assert!(a.rank[d.0].unwrap() < a.rank[q.0].unwrap());
                }
            }
        }
    }

    #[test]
    fn attractor_complement_is_a_trap(g in mpp_games(8, 3, 4, 3), mask: u64) {
        let s = subset(g.num_states(), mask);
        for p in [Owner::P1, Owner::P2] {
            let rest = attractor(&g, p, &s).set.complement();
            prop_assert!(is_trap(&g, p, &rest));
        }
    }

    #[test]
    fn translation_and_scaling(g in mpp_games(6, 3, 4, 3), c in -5i64..=5, k in 1i64..=4) {
        let v = solve_mpp(&g);
        let shifted = solve_mpp(&reweigh(&g, |w| w + c));
        let scaled = solve_mpp(&reweigh(&g, |w| w * k));
        for q in g.states() {
            prop_assert_eq!(shifted.at(q), v.at(q).shift(Rat::from_int(c)));
            prop_assert_eq!(scaled.at(q), v.at(q).scale(k));
        }
    }

    #[test]
    fn bar_set_identities(g in penalty_games(4, 3, 3, 2), a: u64, b: u64) {
        let gp = reduce_exponential(&g).unwrap();
        let n = g.num_states();
        let (a, b) = (subset(n, a), subset(n, b));
        let bar = |s: &StateSet, m| bar_sets(&g, &gp, s, m).unwrap();
        let (re, dre) = (BarMode::Rebar, BarMode::Drebar);
        prop_assert_eq!(bar(&a.intersection(&b), re), bar(&a, re).intersection(&bar(&b, re)));
        prop_assert!(bar(&a, re).union(&bar(&b, re)).is_subset(&bar(&a.union(&b), re)));
        prop_assert_eq!(bar(&a.union(&b), dre), bar(&a, dre).union(&bar(&b, dre)));
        prop_assert!(bar(&a.intersection(&b), dre).is_subset(&bar(&a, dre).intersection(&bar(&b, dre))));
        prop_assert_eq!(bar(&a.complement(), re), bar(&a, dre).complement());
        prop_assert_eq!(bar(&a.complement(), dre), bar(&a, re).complement());
        prop_assert!(bar(&StateSet::new(n), re).is_empty());
        if is_subarena(&g, &a) {
            prop_assert!(is_subarena(&gp, &bar(&a, re)));
            prop_assert!(is_subarena(&gp, &bar(&a, dre)));
        }
    }

    #[test]
    fn attractors_commute_with_bars(g in penalty_games(4, 3, 3, 2), mask: u64) {
        let gp = reduce_exponential(&g).unwrap();
        let f = subset(g.num_states(), mask);
        let lifted = StateSet::from_ids(gp.num_states(), f.iter());
        let bar = |s: &StateSet, m| bar_sets(&g, &gp, s, m).unwrap();
        let a1 = attractor(&g, Owner::P1, &f).set;
        let a1p = attractor(&gp, Owner::P1, &lifted).set;
        prop_assert_eq!(&bar(&a1, BarMode::Rebar), &a1p);
        prop_assert_eq!(&attractor(&gp, Owner::P1, &bar(&f, BarMode::Rebar)).set, &a1p);
        let a2 = attractor(&g, Owner::P2, &f).set;
        let a2p = attractor(&gp, Owner::P2, &lifted).set;
        prop_assert_eq!(&bar(&a2, BarMode::Drebar), &a2p);
        prop_assert_eq!(&attractor(&gp, Owner::P2, &bar(&f, BarMode::Drebar)).set, &a2p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn p2_strategies_bound_the_value_from_above(g in mpp_games(5, 3, 4, 3)) {
        let v = solve_mpp(&g);
        let mut best = vec![Value::PosInf; g.num_states()];
        for tau in StrategySpace::new(&g, Owner::P2).iter() {
            let e = eval_p2_memoryless_mpp(&g, &tau).unwrap();
            for q in g.states() {
                prop_assert!(e.at(q) >= v.at(q));
                best[q.0] = best[q.0].min(e.at(q));
            }
        }
        for q in g.states() {
            prop_assert_eq!(best[q.0], v.at(q));
        }
        // one strategy attains the minimum everywhere
        prop_assert_eq!(eval_p2_memoryless_mpp(&g, &extract_p2_optimal(&g)).unwrap(), v);
    }

    #[test]
    fn co_buchi_player1_needs_no_memory(g in mpp_games(5, 3, 4, 2)) {
        let g = shift_priorities(&g, 1);
        let v = solve_mpp(&g);
        let uniform = StrategySpace::new(&g, Owner::P1)
            .iter()
            .map(|s| eval_p1_memoryless_mpp(&g, &s).unwrap())
            .any(|e| e == v);
        prop_assert!(uniform);
    }
}

#[test]
fn empty_target_has_empty_attractor_on_sinkless_games() {
    let g = common::game(6, 2, 3, 2, gamesolve::GameKind::MeanPayoffParity, 3);
    let a = attractor(&g, Owner::P1, &StateSet::new(6));
    assert!(a.set.is_empty());
    assert!(a.strategy.iter().all(Option::is_none));
    let all = attractor(&g, Owner::P2, &g.all_states());
    assert_eq!(all.rank[StateId(0).0], Some(0));
}
