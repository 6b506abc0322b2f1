mod common;

use common::{mpp_games, penalty_games};
use gamesolve::graph::{max_mean_cycle, min_mean_cycle, scc_decompose};
use gamesolve::mp::{eval_p1_memoryless_mp, eval_p2_memoryless_mp, extract_optimal_memoryless_mp, solve_mp};
use gamesolve::mpp::solve_mpp;
use gamesolve::oracle::{brute_cycle_max_mean, oracle_mp_value, oracle_mpp_value, oracle_penalty_value};
use gamesolve::penalty::{
    eval_multi_strategy, reduce_exponential, reduce_polynomial, solve_penalty, ssolve_mp,
    ssolve_mp_strategy,
};
use gamesolve::{Rat, Value};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn karp_matches_cycle_enumeration(g in mpp_games(7, 3, 6, 1)) {
        for scc in scc_decompose(&g, &g.all_states()).iter().filter(|c| c.has_edge) {
            let brute = brute_cycle_max_mean(&g, scc).unwrap();
            prop_assert_eq!(max_mean_cycle(&g, scc).unwrap(), brute);
            let neg = g.map_weights(|w| -w).unwrap();
            prop_assert_eq!(min_mean_cycle(&neg, scc).unwrap(), -brute);
        }
    }

    #[test]
    fn mean_payoff_solver_matches_oracle(g in mpp_games(6, 3, 5, 1)) {
        let v = solve_mp(&g);
        prop_assert_eq!(&v, &oracle_mp_value(&g).unwrap());
        let (s1, s2) = extract_optimal_memoryless_mp(&g);
        prop_assert_eq!(&eval_p1_memoryless_mp(&g, &s1).unwrap(), &v);
        prop_assert_eq!(&eval_p2_memoryless_mp(&g, &s2).unwrap(), &v);
    }

    #[test]
    fn mpp_solver_matches_oracle(g in mpp_games(6, 3, 4, 3)) {
        prop_assert_eq!(solve_mpp(&g), oracle_mpp_value(&g).unwrap());
    }

    #[test]
    fn penalty_solvers_agree(g in penalty_games(4, 3, 3, 3)) {
        let n = g.num_states();
        let v = solve_penalty(&g);
        prop_assert_eq!(&v, &oracle_penalty_value(&g).unwrap());
        let gp = reduce_exponential(&g).unwrap();
        prop_assert_eq!(&solve_mpp(&gp).truncated(n).negated(), &v);
        let gpp = reduce_polynomial(&g).unwrap();
        prop_assert_eq!(&solve_mpp(&gpp).truncated(n).negated(), &v);
    }

    #[test]
    fn penalty_without_parity(g in penalty_games(5, 3, 3, 1)) {
        // every priority is 0, so parity holds on every play
        let v = ssolve_mp(&g);
        prop_assert_eq!(&v, &solve_penalty(&g));
        if let Some(sigma) = ssolve_mp_strategy(&g) {
            prop_assert_eq!(&eval_multi_strategy(&g, &sigma), &v);
        }
        for (_, x) in v.iter() {
            prop_assert!(x >= Value::Fin(Rat::ZERO));
        }
    }
}
