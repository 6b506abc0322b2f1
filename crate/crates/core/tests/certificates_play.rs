mod common;

use common::{mpp_games, penalty_games};
use gamesolve::certificates::{make_np_witness, search_np_witness, verify_conp, verify_np, Reject};
use gamesolve::mpp::{extract_p2_optimal, solve_mpp};
use gamesolve::oracle::StrategySpace;
use gamesolve::penalty::MultiStrategy;
use gamesolve::play::{simulate, simulate_penalty, FirstAllowed};
use gamesolve::{MemorylessStrategy, Owner, Rat, StateId, Value};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn witnesses_are_complete_and_sound(g in mpp_games(6, 3, 4, 3)) {
        let v = solve_mpp(&g);
        let n = g.num_states() as i64;
        let tau = extract_p2_optimal(&g);
        for q in g.states() {
            let Value::Fin(x) = v.at(q) else { continue };
            let w = make_np_witness(&g, x).unwrap();
            prop_assert_eq!(verify_np(&g, q, x, &w), Ok(()));
            prop_assert!(w.root.node_count() <= 2 * g.num_states());
            // a witness built for x is no evidence for anything higher
            let above = x + Rat::new(1, n + 1);
            prop_assert!(verify_np(&g, q, above, &w).is_err());
            if let Ok(w) = make_np_witness(&g, above) {
                prop_assert!(verify_np(&g, q, above, &w).is_err());
            }
            prop_assert!(verify_conp(&g, q, x + Rat::from_int(1), &tau).unwrap());
            prop_assert!(!verify_conp(&g, q, x, &tau).unwrap());
        }
    }

    #[test]
    fn no_witness_above_the_value(g in mpp_games(3, 3, 3, 3)) {
        let v = solve_mpp(&g);
        let step = Rat::new(1, g.num_states() as i64 + 1);
        for q in g.states() {
            if let Value::Fin(x) = v.at(q) {
                prop_assert!(search_np_witness(&g, q, x).is_some());
                prop_assert!(search_np_witness(&g, q, x + step).is_none());
            }
        }
    }

    #[test]
    fn traces_follow_edges(g in mpp_games(6, 3, 4, 3), i: u64, j: u64, horizon in 1usize..40) {
        let s1 = StrategySpace::new(&g, Owner::P1);
        let s2 = StrategySpace::new(&g, Owner::P2);
        let mut a = s1.get(i as u128 % s1.size());
        let mut b = s2.get(j as u128 % s2.size());
        let t = simulate(&g, &mut a, &mut b, horizon, StateId(0)).unwrap();
        prop_assert_eq!(t.horizon(), horizon);
        for k in 0..horizon {
            let w = g.weight(t.states[k], t.states[k + 1]);
            prop_assert_eq!(Some(t.sums[k + 1] - t.sums[k]), w);
            prop_assert_eq!(t.means[k + 1], Rat::new(t.sums[k + 1], k as i64 + 1));
        }
        // memoryless play is eventually periodic
        if horizon > g.num_states() {
            let last = t.states[horizon];
            prop_assert!(t.states[..horizon].contains(&last));
        }
    }

    #[test]
    fn penalty_traces_charge_blocked_edges(g in penalty_games(6, 3, 4, 2), horizon in 1usize..30) {
        let allowed = g
            .states()
            .map(|q| match g.owner(q) {
                Owner::P1 => Some(vec![g.successors(q).last().unwrap().0]),
                Owner::P2 => None,
            })
            .collect();
        let sigma = MultiStrategy::new(&g, allowed).unwrap();
        let t = simulate_penalty(&g, &mut sigma.clone(), &mut FirstAllowed, horizon, StateId(0)).unwrap();
        for k in 0..horizon {
            let q = t.states[k];
            let expect = if g.owner(q) == Owner::P1 { sigma.blocked_weight(&g, q) } else { 0 };
            prop_assert_eq!(t.blocked[k], expect);
            prop_assert!(g.weight(q, t.states[k + 1]).is_some());
            prop_assert_eq!(t.sums[k + 1], t.sums[k] + expect);
        }
        let permissive = simulate_penalty(
            &g, &mut MultiStrategy::permissive(&g), &mut FirstAllowed, horizon, StateId(0),
        ).unwrap();
        prop_assert!(permissive.sums.iter().all(|&s| s == 0));
    }
}

#[test]
fn witness_for_wrong_state_is_rejected() {
    let g = common::game(5, 2, 3, 2, gamesolve::GameKind::MeanPayoffParity, 42);
    let v = solve_mpp(&g);
    let finite: Vec<(StateId, Rat)> =
        g.states().filter_map(|q| v.at(q).as_rat().map(|x| (q, x))).collect();
    let &(low, xl) = finite.iter().min_by_key(|p| p.1).unwrap();
    let &(_, xh) = finite.iter().max_by_key(|p| p.1).unwrap();
    if xl < xh {
        let w = make_np_witness(&g, xh).unwrap();
        assert!(matches!(
            verify_np(&g, low, xh, &w),
            Err(Reject::NotATrap(_) | Reject::StrategyBelowThreshold(_))
        ));
    }
    let first = MemorylessStrategy::first_successor(&g, Owner::P1);
    assert!(verify_conp(&g, StateId(0), Rat::ZERO, &first).is_err());
}
