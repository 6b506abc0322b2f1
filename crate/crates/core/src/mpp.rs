//! Mean-payoff parity games: one-player values, the recursive solver and
//! memoryless strategy evaluation.

use thiserror::Error;

use crate::arena::{Adj, Arena};
use crate::game::{Game, Owner, StateId};
use crate::graph::{attr_set, karp, propagate, reachable_cycle_mean, tarjan};
use crate::mp::{expect_owner, solve_mp_arena};
use crate::strategy::{MemorylessStrategy, StrategyError};
use crate::value::{Rat, Value, ValueFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MppError {
    #[error("state `{0}` gives the non-maximizing player a choice")]
    NotOnePlayer(String),
}

/// Values of a game in which only `maximizer`'s opponent has no choices.
///
/// With `Owner::P1` this is the payoff Player 1 can secure alone; with
/// `Owner::P2` it is the payoff Player 2 can force down to, which is `-inf`
/// whenever she can reach a cycle with odd least priority.
pub fn one_player_value(g: &Game, maximizer: Owner) -> Result<ValueFunction, MppError> {
    if let Some(q) = g
        .states()
        .find(|&q| g.owner(q) != maximizer && g.successors(q).len() > 1)
    {
        return Err(MppError::NotOnePlayer(g.name(q).to_string()));
    }
    let a = Arena::from_game(g);
    let vals = match maximizer {
        Owner::P1 => one_player_max(&a.succ, &a.prio),
        Owner::P2 => one_player_min(&a.succ, &a.prio),
    };
    Ok(ValueFunction::from_values(vals))
}

/// Components of the subgraph on priorities `>= p` that contain priority
/// `p` and a cycle, for every `p` of the requested parity.
fn parity_components(succ: &Adj, prio: &[u32], even: bool) -> Vec<(u32, Vec<usize>)> {
    let mut ps: Vec<u32> = prio.iter().copied().filter(|p| (p % 2 == 0) == even).collect();
    ps.sort_unstable();
    ps.dedup();
    let mut out = Vec::new();
    for p in ps {
        let within: Vec<bool> = prio.iter().map(|&c| c >= p).collect();
        for comp in tarjan(succ, Some(&within)) {
            if comp.iter().any(|&q| prio[q] == p) && has_edge_within(succ, &comp, &within) {
                out.push((p, comp));
            }
        }
    }
    out
}

fn has_edge_within(succ: &Adj, comp: &[usize], within: &[bool]) -> bool {
    comp.len() > 1 || succ[comp[0]].iter().any(|&(d, _)| d == comp[0] && within[d])
}

/// Player 1 alone: best max-mean cycle over reachable components with an
/// even least priority.
pub(crate) fn one_player_max(succ: &Adj, prio: &[u32]) -> Vec<Value> {
    let n = succ.len();
    let mut label: Vec<Option<Rat>> = vec![None; n];
    for (_, comp) in parity_components(succ, prio, true) {
        let mu = karp(succ, &comp, true);
        for &q in &comp {
            label[q] = Some(label[q].map_or(mu, |l: Rat| l.max(mu)));
        }
    }
    let comps = tarjan(succ, None);
    let own: Vec<Option<Rat>> = comps
        .iter()
        .map(|c| c.iter().filter_map(|&q| label[q]).max())
        .collect();
    propagate(succ, &comps, &own, Rat::max)
        .into_iter()
        .map(|v| v.map_or(Value::NegInf, Value::Fin))
        .collect()
}

/// Player 2 alone: `-inf` if an odd cycle is reachable, else the least
/// reachable cycle mean.
pub(crate) fn one_player_min(succ: &Adj, prio: &[u32]) -> Vec<Value> {
    let n = succ.len();
    let mut odd = vec![false; n];
    for (_, comp) in parity_components(succ, prio, false) {
        for &q in &comp {
            odd[q] = true;
        }
    }
    let comps = tarjan(succ, None);
    let own: Vec<Option<bool>> = comps
        .iter()
        .map(|c| c.iter().any(|&q| odd[q]).then_some(true))
        .collect();
    let bad = propagate(succ, &comps, &own, |a, b| a || b);
    let means = reachable_cycle_mean(succ, false);
    (0..n)
        .map(|q| {
            if bad[q] == Some(true) {
                Value::NegInf
            } else {
                Value::Fin(means[q])
            }
        })
        .collect()
}

pub fn solve_mpp(g: &Game) -> ValueFunction {
    ValueFunction::from_values(solve_arena(&Arena::from_game(g)))
}

/// The recursive algorithm on an arena; values indexed by local state.
pub(crate) fn solve_arena(a: &Arena) -> Vec<Value> {
    let n = a.n();
    let Some(p) = a.min_priority() else {
        return Vec::new();
    };
    let at_p: Vec<bool> = a.prio.iter().map(|&c| c == p).collect();
    let mut out = vec![Value::NegInf; n];
    if p % 2 == 0 {
        let g: Vec<Value> = solve_mp_arena(a).values.into_iter().map(Value::Fin).collect();
        if at_p.iter().all(|&b| b) {
            return g;
        }
        let trap: Vec<bool> = attr_set(a, Owner::P1, &at_p).iter().map(|&b| !b).collect();
        let f = solve_sub(a, &trap);
        let x = (0..n)
            .filter_map(|q| f[q])
            .chain(g.iter().copied())
            .min()
            .unwrap();
        let seeds: Vec<bool> = (0..n).map(|q| f[q] == Some(x) || g[q] == x).collect();
        let attracted = attr_set(a, Owner::P2, &seeds);
        merge(a, &attracted, x, &mut out, Value::max);
    } else {
        let trap: Vec<bool> = attr_set(a, Owner::P2, &at_p).iter().map(|&b| !b).collect();
        if !trap.iter().any(|&b| b) {
            return out;
        }
        let f = solve_sub(a, &trap);
        let x = (0..n).filter_map(|q| f[q]).max().unwrap();
        let seeds: Vec<bool> = (0..n).map(|q| f[q] == Some(x)).collect();
        let attracted = attr_set(a, Owner::P1, &seeds);
        merge(a, &attracted, x, &mut out, Value::min);
    }
    out
}

/// Solves the subarena `keep`; entries outside it are `None`.
fn solve_sub(a: &Arena, keep: &[bool]) -> Vec<Option<Value>> {
    let (sub, map) = a.restrict(keep);
    let vals = solve_arena(&sub);
    let mut out = vec![None; a.n()];
    for (i, &q) in map.iter().enumerate() {
        out[q] = Some(vals[i]);
    }
    out
}

/// `x` on `attracted`, `op(x, ·)` of the recursive solution elsewhere.
fn merge(a: &Arena, attracted: &[bool], x: Value, out: &mut [Value], op: fn(Value, Value) -> Value) {
    let rest: Vec<bool> = attracted.iter().map(|&b| !b).collect();
    let r = if rest.iter().any(|&b| b) {
        solve_sub(a, &rest)
    } else {
        vec![None; a.n()]
    };
    for q in 0..a.n() {
        out[q] = match r[q] {
            Some(v) => op(x, v),
            None => x,
        };
    }
}

/// What Player 1 can secure against the memoryless `tau`.
pub fn eval_p2_memoryless_mpp(
    g: &Game,
    tau: &MemorylessStrategy,
) -> Result<ValueFunction, StrategyError> {
    expect_owner(tau, Owner::P2)?;
    tau.check(g)?;
    let prio: Vec<u32> = g.states().map(|q| g.priority(q)).collect();
    Ok(ValueFunction::from_values(one_player_max(
        &tau.restricted_adj(g),
        &prio,
    )))
}

/// What the memoryless `sigma` guarantees Player 1 against every Player 2
/// behaviour.
pub fn eval_p1_memoryless_mpp(
    g: &Game,
    sigma: &MemorylessStrategy,
) -> Result<ValueFunction, StrategyError> {
    expect_owner(sigma, Owner::P1)?;
    sigma.check(g)?;
    let prio: Vec<u32> = g.states().map(|q| g.priority(q)).collect();
    Ok(ValueFunction::from_values(one_player_min(
        &sigma.restricted_adj(g),
        &prio,
    )))
}

/// An optimal memoryless strategy for Player 2, found by committing one
/// state at a time to the first successor that keeps all values.
pub fn extract_p2_optimal(g: &Game) -> MemorylessStrategy {
    let mut work = Arena::from_game(g);
    let values = solve_arena(&work);
    let mut choice = vec![None; g.num_states()];
    for q in g.states_of(Owner::P2) {
        let options = work.succ[q.0].clone();
        if options.len() == 1 {
            choice[q.0] = Some(StateId(options[0].0));
            continue;
        }
        let mut committed = false;
        for &(d, w) in &options {
            let mut trial = work.clone();
            trial.set_successors(q.0, vec![(d, w)]);
            if solve_arena(&trial) == values {
                work = trial;
                choice[q.0] = Some(StateId(d));
                committed = true;
                break;
            }
        }
        assert!(committed, "Player 2 has a memoryless optimal strategy");
    }
    MemorylessStrategy::from_raw(Owner::P2, choice)
}
