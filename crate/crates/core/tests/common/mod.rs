#![allow(dead_code)]

use gamesolve::gen::{gen_game, GenParams};
use gamesolve::{Game, GameBuilder, GameKind, Owner, StateSet};
use proptest::prelude::*;

pub fn game(states: usize, degree: usize, w: i64, prios: u32, kind: GameKind, seed: u64) -> Game {
    let p = GenParams {
        states,
        max_degree: degree,
        max_weight: w,
        priorities: prios,
        kind,
    };
    gen_game(&p, seed).unwrap()
}

/// Random mean-payoff parity games with at most `n` states.
pub fn mpp_games(n: usize, degree: usize, w: i64, prios: u32) -> impl Strategy<Value = Game> {
    (1..=n, 1..=degree, 0..=w, 1..=prios, any::<u64>())
        .prop_map(|(n, d, w, p, s)| game(n, d, w, p, GameKind::MeanPayoffParity, s))
}

pub fn penalty_games(n: usize, degree: usize, w: i64, prios: u32) -> impl Strategy<Value = Game> {
    (1..=n, 1..=degree, 0..=w, 1..=prios, any::<u64>())
        .prop_map(|(n, d, w, p, s)| game(n, d, w, p, GameKind::MeanPenaltyParity, s))
}

/// Least fixed point of `X = S ∪ CPre_player(X)` by plain iteration.
pub fn naive_attractor(g: &Game, player: Owner, target: &StateSet) -> StateSet {
    let mut x = target.clone();
    loop {
        let mut next = x.clone();
        for q in g.states() {
            let mut succ = g.successors(q).iter().map(|&(d, _)| x.contains(d));
            let hit = if g.owner(q) == player {
                succ.any(|b| b)
            } else {
                succ.all(|b| b)
            };
            if hit {
                next.insert(q);
            }
        }
        if next == x {
            return x;
        }
        x = next;
    }
}

/// The same game with every priority shifted up by `by`.
pub fn shift_priorities(g: &Game, by: u32) -> Game {
    let mut b = GameBuilder::new(g.kind());
    let ids: Vec<_> = g
        .states()
        .map(|q| b.state(g.name(q), g.owner(q), g.priority(q) + by))
        .collect();
    for e in g.edges() {
        b.edge(ids[e.src.0], ids[e.dst.0], e.weight);
    }
    b.build().unwrap()
}
