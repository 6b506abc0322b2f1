//! Brute-force ground truth for small games.
//!
//! Values are obtained by enumerating every memoryless Player 2 strategy
//! and evaluating the remaining one-player game by listing simple cycles
//! and strongly connected state sets. Nothing here calls the solvers it is
//! meant to check; one-player games with more than
//! [`BRUTE_STATE_LIMIT`] states fall back to the component-based evaluator.

use rayon::prelude::*;
use thiserror::Error;

use crate::arena::Adj;
use crate::game::{Game, Owner, StateId};
use crate::graph::Scc;
use crate::mpp::one_player_max;
use crate::strategy::MemorylessStrategy;
use crate::value::{Rat, Value, ValueFunction};

pub const DEFAULT_MAX_ENUM: u128 = 1_000_000;

/// Largest one-player graph evaluated by pure enumeration.
pub const BRUTE_STATE_LIMIT: usize = 8;

/// Largest out-degree for which bar states are enumerated.
pub const DEFAULT_DEGREE_BOUND: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("strategy space has {size} elements, above the bound {bound}")]
    SpaceTooLarge { size: u128, bound: u128 },
    #[error("out-degree {degree} exceeds the bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("component has {0} states; brute-force cycle enumeration handles at most 8")]
    SccTooLarge(usize),
    #[error("component has no edge")]
    NoCycle,
}

/// All memoryless strategies of one player, enumerated odometer style:
/// the first state's choice varies fastest, successors in declaration order.
#[derive(Clone, Debug)]
pub struct StrategySpace {
    owner: Owner,
    n: usize,
    states: Vec<StateId>,
    options: Vec<Vec<StateId>>,
}

impl StrategySpace {
    pub fn new(g: &Game, owner: Owner) -> StrategySpace {
        let states: Vec<StateId> = g.states_of(owner).collect();
        let options = states
            .iter()
            .map(|&q| g.successors(q).iter().map(|&(d, _)| d).collect())
            .collect();
        StrategySpace {
            owner,
            n: g.num_states(),
            states,
            options,
        }
    }

    /// `Π deg(q)` over the owner's states (saturating).
    pub fn size(&self) -> u128 {
        self.options
            .iter()
            .fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128))
    }

    pub fn get(&self, mut index: u128) -> MemorylessStrategy {
        let mut choice = vec![None; self.n];
        for (q, opts) in self.states.iter().zip(&self.options) {
            let len = opts.len() as u128;
            choice[q.0] = Some(opts[(index % len) as usize]);
            index /= len;
        }
        MemorylessStrategy::from_raw(self.owner, choice)
    }

    pub fn iter(&self) -> impl Iterator<Item = MemorylessStrategy> + '_ {
        (0..self.size()).map(|i| self.get(i))
    }
}

fn check_bound(size: u128, bound: u128) -> Result<(), OracleError> {
    if size > bound {
        Err(OracleError::SpaceTooLarge { size, bound })
    } else {
        Ok(())
    }
}

fn pointwise_min(a: Vec<Value>, b: Vec<Value>) -> Vec<Value> {
    a.into_iter().zip(b).map(|(x, y)| x.min(y)).collect()
}

pub fn oracle_mpp_value(g: &Game) -> Result<ValueFunction, OracleError> {
    oracle_mpp_value_with(g, DEFAULT_MAX_ENUM)
}

/// Pointwise minimum over all memoryless Player 2 strategies of what
/// Player 1 can secure against each.
pub fn oracle_mpp_value_with(g: &Game, bound: u128) -> Result<ValueFunction, OracleError> {
    let space = StrategySpace::new(g, Owner::P2);
    check_bound(space.size(), bound)?;
    let prio: Vec<u32> = g.states().map(|q| g.priority(q)).collect();
    let vals = (0..space.size())
        .into_par_iter()
        .map(|i| parity_one_player(&space.get(i).restricted_adj(g), &prio))
        .reduce_with(pointwise_min)
        .expect("strategy space is never empty");
    Ok(ValueFunction::from_values(vals))
}

pub fn oracle_mp_value(g: &Game) -> Result<ValueFunction, OracleError> {
    oracle_mp_value_with(g, DEFAULT_MAX_ENUM)
}

/// As [`oracle_mpp_value_with`] with priorities ignored.
pub fn oracle_mp_value_with(g: &Game, bound: u128) -> Result<ValueFunction, OracleError> {
    let space = StrategySpace::new(g, Owner::P2);
    check_bound(space.size(), bound)?;
    let prio = vec![0u32; g.num_states()];
    let vals = (0..space.size())
        .into_par_iter()
        .map(|i| parity_one_player(&space.get(i).restricted_adj(g), &prio))
        .reduce_with(pointwise_min)
        .expect("strategy space is never empty");
    Ok(ValueFunction::from_values(vals))
}

pub fn oracle_penalty_value(g: &Game) -> Result<ValueFunction, OracleError> {
    oracle_penalty_value_with(g, DEFAULT_MAX_ENUM, DEFAULT_DEGREE_BOUND)
}

/// Penalty values through the blocking game: Player 1 picks an allowed
/// set `F`, Player 2 a member of `F`.
///
/// A memoryless Player 2 strategy on the bar states of a Player 1 state `q`
/// only matters through the vector `b(q, q')`, the best weight with which
/// Player 1 can make Player 2 move to `q'`. Lowering any entry can only
/// lower Player 1's payoff, so only pointwise-minimal vectors are kept.
/// Each collapsed edge stands for two steps of the blocking game, hence the
/// final halving.
pub fn oracle_penalty_value_with(
    g: &Game,
    bound: u128,
    degree_bound: usize,
) -> Result<ValueFunction, OracleError> {
    let n = g.num_states();
    let degree = g.states().map(|q| g.successors(q).len()).max().unwrap_or(0);
    if degree > degree_bound {
        return Err(OracleError::DegreeTooLarge {
            degree,
            bound: degree_bound,
        });
    }
    // per state: alternative successor lists of the collapsed graph
    let mut options: Vec<Vec<Vec<(usize, i64)>>> = Vec::with_capacity(n);
    for q in g.states() {
        let succ = g.successors(q);
        if g.owner(q) == Owner::P2 {
            options.push(succ.iter().map(|&(d, _)| vec![(d.0, 0)]).collect());
        } else {
            options.push(blocking_vectors(succ, bound)?);
        }
    }
    let size = options
        .iter()
        .fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128));
    check_bound(size, bound)?;
    let prio: Vec<u32> = g.states().map(|q| g.priority(q)).collect();
    let vals = (0..size)
        .into_par_iter()
        .map(|mut index| {
            let adj: Adj = options
                .iter()
                .map(|opts| {
                    let len = opts.len() as u128;
                    let pick = opts[(index % len) as usize].clone();
                    index /= len;
                    pick
                })
                .collect();
            parity_one_player(&adj, &prio)
        })
        .reduce_with(pointwise_min)
        .expect("strategy space is never empty");
    Ok(ValueFunction::from_values(
        vals.into_iter()
            .map(|v| match v {
                Value::Fin(r) => Value::Fin(-r.div_int(2)),
                other => -other,
            })
            .collect(),
    ))
}

/// Pointwise-minimal collapsed successor lists for a Player 1 state.
fn blocking_vectors(succ: &[(StateId, i64)], bound: u128) -> Result<Vec<Vec<(usize, i64)>>, OracleError> {
    let d = succ.len();
    let total: i64 = succ.iter().map(|&(_, w)| w).sum();
    // bar states (q, F): allowed set as a bitmask, weight -2 * blocked
    let bars: Vec<(u32, i64)> = (1u32..1 << d)
        .map(|f| {
            let allowed: i64 = (0..d)
                .filter(|&i| f >> i & 1 == 1)
                .map(|i| succ[i].1)
                .sum();
            (f, -2 * (total - allowed))
        })
        .collect();
    let size = bars
        .iter()
        .fold(1u128, |acc, &(f, _)| acc.saturating_mul(f.count_ones() as u128));
    check_bound(size, bound)?;
    let mut vectors: Vec<Vec<Option<i64>>> = Vec::new();
    for mut index in 0..size {
        let mut b: Vec<Option<i64>> = vec![None; d];
        for &(f, w) in &bars {
            let members: Vec<usize> = (0..d).filter(|&i| f >> i & 1 == 1).collect();
            let len = members.len() as u128;
            let target = members[(index % len) as usize];
            index /= len;
            b[target] = Some(b[target].map_or(w, |x| x.max(w)));
        }
        vectors.push(b);
    }
    vectors.sort();
    vectors.dedup();
    // None orders below every Some, matching "no way to reach q'"
    let leq = |a: &[Option<i64>], b: &[Option<i64>]| a.iter().zip(b).all(|(x, y)| x <= y);
    let minimal: Vec<&Vec<Option<i64>>> = vectors
        .iter()
        .filter(|v| !vectors.iter().any(|u| u != *v && leq(u, v)))
        .collect();
    Ok(minimal
        .into_iter()
        .map(|b| {
            b.iter()
                .enumerate()
                .filter_map(|(i, w)| w.map(|w| (succ[i].0 .0, w)))
                .collect()
        })
        .collect())
}

/// Player 1's value in a one-player parity graph (everything else fixed).
fn parity_one_player(adj: &Adj, prio: &[u32]) -> Vec<Value> {
    if adj.len() > BRUTE_STATE_LIMIT {
        return one_player_max(adj, prio);
    }
    brute_one_player(adj, prio)
}

/// A simple cycle: member mask, total weight, length.
type Cycle = (u32, i64, i64);

fn simple_cycles(adj: &Adj, allowed: u32) -> Vec<Cycle> {
    fn dfs(
        adj: &Adj,
        allowed: u32,
        start: usize,
        v: usize,
        mask: u32,
        sum: i64,
        len: i64,
        out: &mut Vec<Cycle>,
    ) {
        for &(d, w) in &adj[v] {
            if allowed >> d & 1 == 0 || d < start {
                continue;
            }
            if d == start {
                out.push((mask, sum + w, len + 1));
            } else if mask >> d & 1 == 0 {
                dfs(adj, allowed, start, d, mask | 1 << d, sum + w, len + 1, out);
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if allowed >> s & 1 == 1 {
            dfs(adj, allowed, s, s, 1 << s, 0, 0, &mut out);
        }
    }
    out
}

fn reach_mask(adj: &Adj, from: usize, within: u32) -> u32 {
    let mut seen = 1u32 << from;
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for &(d, _) in &adj[v] {
            if within >> d & 1 == 1 && seen >> d & 1 == 0 {
                seen |= 1 << d;
                stack.push(d);
            }
        }
    }
    seen
}

/// Player 1 can stay forever inside any strongly connected set `S` she can
/// reach, visiting all of it while mostly repeating its best cycle; such a
/// play wins iff the least priority in `S` is even.
fn brute_one_player(adj: &Adj, prio: &[u32]) -> Vec<Value> {
    let n = adj.len();
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let cycles = simple_cycles(adj, all);
    let reach: Vec<u32> = (0..n).map(|q| reach_mask(adj, q, all)).collect();
    let mut best = vec![Value::NegInf; n];
    for s in 1..=all {
        let low = s.trailing_zeros() as usize;
        if reach_mask(adj, low, s) != s {
            continue;
        }
        let min_prio = (0..n).filter(|&q| s >> q & 1 == 1).map(|q| prio[q]).min().unwrap();
        if min_prio % 2 == 1 {
            continue;
        }
        // strongly connected iff every member reaches the lowest one
        if (0..n).any(|q| s >> q & 1 == 1 && reach_mask(adj, q, s) >> low & 1 == 0) {
            continue;
        }
        let Some(mean) = cycles
            .iter()
            .filter(|c| c.0 & !s == 0)
            .map(|&(_, w, l)| Rat::new(w, l))
            .max()
        else {
            continue;
        };
        for q in 0..n {
            if reach[q] & s != 0 {
                best[q] = best[q].max(Value::Fin(mean));
            }
        }
    }
    best
}

/// Maximum mean over all simple cycles of a component, by enumeration.
pub fn brute_cycle_max_mean(g: &Game, scc: &Scc) -> Result<Rat, OracleError> {
    if scc.members.len() > BRUTE_STATE_LIMIT {
        return Err(OracleError::SccTooLarge(scc.members.len()));
    }
    let local: std::collections::HashMap<StateId, usize> = scc
        .members
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, i))
        .collect();
    let adj: Adj = scc
        .members
        .iter()
        .map(|&q| {
            g.successors(q)
                .iter()
                .filter_map(|(d, w)| local.get(d).map(|&i| (i, *w)))
                .collect()
        })
        .collect();
    let all = (1u32 << adj.len()) - 1;
    simple_cycles(&adj, all)
        .into_iter()
        .map(|(_, w, l)| Rat::new(w, l))
        .max()
        .ok_or(OracleError::NoCycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_game, GameBuilder, GameKind};
    use crate::graph::scc_decompose;

    #[test]
    fn delay_oracle() {
        let g = parse_game(
            "mppg v1\nkind mean-payoff-parity\nstate q1 owner=1 priority=1\nstate q2 owner=1 priority=0\nedge q1 q1 weight=1\nedge q1 q2 weight=0\nedge q2 q1 weight=0\n",
        )
        .unwrap();
        let v = oracle_mpp_value(&g).unwrap();
        assert_eq!(v.at(StateId(0)), Value::fin(1, 1));
        assert_eq!(v.at(StateId(1)), Value::fin(1, 1));
    }

    #[test]
    fn mp_oracle_small() {
        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let x = b.state("a", Owner::P1, 1);
        let y = b.state("b", Owner::P1, 1);
        b.edge(x, y, 1).edge(y, x, 3);
        let g = b.build().unwrap();
        assert_eq!(oracle_mp_value(&g).unwrap().at(x), Value::fin(2, 1));
        assert_eq!(oracle_mpp_value(&g).unwrap().at(x), Value::NegInf);
        let scc = &scc_decompose(&g, &g.all_states())[0];
        assert_eq!(brute_cycle_max_mean(&g, scc).unwrap(), Rat::from_int(2));
    }

    #[test]
    fn strategy_space_odometer() {
        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let x = b.state("a", Owner::P2, 0);
        let y = b.state("b", Owner::P2, 0);
        b.edge(x, x, 0).edge(x, y, 0).edge(y, x, 0).edge(y, y, 0);
        let g = b.build().unwrap();
        let space = StrategySpace::new(&g, Owner::P2);
        assert_eq!(space.size(), 4);
        let s1 = space.get(1);
        assert_eq!(s1.get(x), Some(y));
        assert_eq!(s1.get(y), Some(x));
        assert_eq!(space.iter().count(), 4);
    }

    #[test]
    fn space_bound() {
        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let x = b.state("a", Owner::P2, 0);
        let y = b.state("b", Owner::P2, 0);
        b.edge(x, x, 0).edge(x, y, 0).edge(y, x, 0).edge(y, y, 0);
        let g = b.build().unwrap();
        assert!(matches!(
            oracle_mpp_value_with(&g, 3),
            Err(OracleError::SpaceTooLarge { size: 4, .. })
        ));
    }

    #[test]
    fn blocking_vectors_keep_minimal_choices() {
        let succ = [(StateId(0), 2), (StateId(1), 2)];
        let v = blocking_vectors(&succ, DEFAULT_MAX_ENUM).unwrap();
        // singletons cost -4 and must go to their member; the full set costs
        // nothing and may go either way
        assert_eq!(v.len(), 2);
        assert!(v.contains(&vec![(0, 0), (1, -4)]));
        assert!(v.contains(&vec![(0, -4), (1, 0)]));
    }
}
