//! Seeded random games for differential testing.
//!
//! Scheme, per state `q0, q1, ...` in order: owner Player 1 or 2 with equal
//! probability, priority uniform in `0..d`. Then per state: out-degree
//! uniform in `1..=min(k, n)`, distinct successors sampled uniformly, each
//! weight uniform in `-W..=W` (`0..=W` for mean-penalty games). The
//! generator is ChaCha8 seeded with the 64-bit seed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{Edge, Game, GameKind, Owner, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub states: usize,
    pub max_degree: usize,
    pub max_weight: i64,
    pub priorities: u32,
    pub kind: GameKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid generator parameters: {0}")]
pub struct GenError(pub String);

pub fn gen_game(p: &GenParams, seed: u64) -> Result<Game, GenError> {
    if p.states == 0 || p.max_degree == 0 || p.priorities == 0 || p.max_weight < 0 {
        return Err(GenError(
            "need states >= 1, degree >= 1, priorities >= 1 and weight >= 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.states;
    let mut owners = Vec::with_capacity(n);
    let mut priorities = Vec::with_capacity(n);
    for _ in 0..n {
        owners.push(if rng.gen_bool(0.5) { Owner::P1 } else { Owner::P2 });
        priorities.push(rng.gen_range(0..p.priorities));
    }
    let low = match p.kind {
        GameKind::MeanPayoffParity => -p.max_weight,
        GameKind::MeanPenaltyParity => 0,
    };
    let mut edges = Vec::new();
    for q in 0..n {
        let deg = rng.gen_range(1..=p.max_degree.min(n));
        for d in sample(&mut rng, n, deg) {
            edges.push(Edge {
                src: StateId(q),
                dst: StateId(d),
                weight: rng.gen_range(low..=p.max_weight),
            });
        }
    }
    let names = (0..n).map(|i| format!("q{i}")).collect();
    Ok(Game::new(p.kind, names, owners, priorities, edges).expect("generated games are valid"))
}
