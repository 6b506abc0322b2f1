//! Mean-payoff games (priorities ignored): value iteration with exact
//! answers, and evaluation/extraction of memoryless strategies.
//!
//! Values come from the potentials `v_k(q)`, the optimal total weight of a
//! `k`-step play. At geometrically spaced horizons the greedy choices of the
//! last sweep are evaluated exactly; when the greedy Player 1 strategy
//! guarantees what the greedy Player 2 strategy concedes, both are optimal
//! and the common values are returned. If that never happens before
//! `4·|V|³·W` sweeps, values are recovered from `v_k / k` by rational
//! reconstruction.

use crate::arena::{Adj, Arena};
use crate::energy::{key, least_credits, need, Credit};
use crate::game::{Game, Owner, StateId};
use crate::graph::reachable_cycle_mean;
use crate::strategy::{MemorylessStrategy, StrategyError};
use crate::value::{Rat, Value, ValueFunction};

/// The potentials after `k` sweeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationTrace {
    pub k: u64,
    pub v: Vec<i64>,
}

/// Plain value iteration for `k` sweeps from `v_0 = 0`.
pub fn value_iteration(g: &Game, k: u64) -> IterationTrace {
    let a = Arena::from_game(g);
    let mut v = vec![0i64; a.n()];
    let mut next = v.clone();
    let mut choice = vec![(usize::MAX, 0); a.n()];
    for _ in 0..k {
        sweep(&a, &v, &mut next, &mut choice);
        std::mem::swap(&mut v, &mut next);
    }
    IterationTrace { k, v }
}

/// Sweep count after which reconstruction is guaranteed unambiguous.
pub fn iteration_cap(n: usize, max_weight: i64) -> u64 {
    4 * (n as u64).pow(3) * max_weight as u64
}

pub fn solve_mp(g: &Game) -> ValueFunction {
    let sol = solve_mp_arena(&Arena::from_game(g));
    ValueFunction::from_values(sol.values.into_iter().map(Value::Fin).collect())
}

/// Worst case, over all Player 2 behaviours, of the mean payoff of `sigma`.
pub fn eval_p1_memoryless_mp(
    g: &Game,
    sigma: &MemorylessStrategy,
) -> Result<ValueFunction, StrategyError> {
    expect_owner(sigma, Owner::P1)?;
    sigma.check(g)?;
    let vals = reachable_cycle_mean(&sigma.restricted_adj(g), false);
    Ok(ValueFunction::from_values(
        vals.into_iter().map(Value::Fin).collect(),
    ))
}

/// Best case, over all Player 1 behaviours, of the mean payoff against `tau`.
pub fn eval_p2_memoryless_mp(
    g: &Game,
    tau: &MemorylessStrategy,
) -> Result<ValueFunction, StrategyError> {
    expect_owner(tau, Owner::P2)?;
    tau.check(g)?;
    let vals = reachable_cycle_mean(&tau.restricted_adj(g), true);
    Ok(ValueFunction::from_values(
        vals.into_iter().map(Value::Fin).collect(),
    ))
}

pub(crate) fn expect_owner(s: &MemorylessStrategy, owner: Owner) -> Result<(), StrategyError> {
    if s.owner() == owner {
        Ok(())
    } else {
        Err(StrategyError::DomainMismatch(format!(
            "expected a strategy for player {owner}, got one for player {}",
            s.owner()
        )))
    }
}

/// Optimal memoryless strategies `(sigma, tau)` for both players.
pub fn extract_optimal_memoryless_mp(g: &Game) -> (MemorylessStrategy, MemorylessStrategy) {
    let a = Arena::from_game(g);
    let sol = solve_mp_arena(&a);
    let choice = match sol.choice {
        Some(c) => c,
        None => fix_successors(&a, &sol.values),
    };
    let pick = |owner: Owner| {
        MemorylessStrategy::from_raw(
            owner,
            (0..a.n())
                .map(|q| (a.owner[q] == owner).then_some(StateId(choice[q])))
                .collect(),
        )
    };
    (pick(Owner::P1), pick(Owner::P2))
}

/// Commits one state at a time to the first successor that leaves all
/// values unchanged.
fn fix_successors(a: &Arena, values: &[Rat]) -> Vec<usize> {
    let mut work = a.clone();
    let mut choice = vec![usize::MAX; a.n()];
    for q in 0..a.n() {
        if a.succ[q].len() == 1 {
            choice[q] = a.succ[q][0].0;
            continue;
        }
        let mut committed = false;
        for &(d, w) in &a.succ[q] {
            let mut trial = work.clone();
            trial.set_successors(q, vec![(d, w)]);
            if solve_mp_arena(&trial).values == values {
                work = trial;
                choice[q] = d;
                committed = true;
                break;
            }
        }
        assert!(committed, "some successor preserves optimal values");
    }
    choice
}

pub(crate) struct MpSolution {
    pub values: Vec<Rat>,
    /// Optimal successor per state (for its owner), when certified.
    pub choice: Option<Vec<usize>>,
}

fn sweep(a: &Arena, prev: &[i64], next: &mut [i64], choice: &mut [(usize, i64)]) {
    for q in 0..a.n() {
        let maximize = a.owner[q] == Owner::P1;
        let mut best: Option<(i64, usize, i64)> = None;
        for &(d, w) in &a.succ[q] {
            let c = w + prev[d];
            let better = match best {
                None => true,
                Some((b, _, _)) => (maximize && c > b) || (!maximize && c < b),
            };
            if better {
                best = Some((c, d, w));
            }
        }
        let (c, d, w) = best.expect("every state has a successor");
        next[q] = c;
        // on ties keep the previous choice; alternating ties otherwise keep
        // every single sweep's greedy strategy suboptimal
        let (pd, pw) = choice[q];
        let kept = a.succ[q].contains(&(pd, pw)) && pw + prev[pd] == c;
        if !kept {
            choice[q] = (d, w);
        }
    }
}

/// Exact values guaranteed by Player 1 fixing `choice` at her states and
/// conceded by Player 2 fixing it at his; `Some` when they coincide.
fn certify(a: &Arena, choice: &[usize]) -> Option<Vec<Rat>> {
    let fixed = |owner: Owner| -> Adj {
        (0..a.n())
            .map(|q| {
                if a.owner[q] == owner {
                    a.succ[q].iter().copied().filter(|&(d, _)| d == choice[q]).collect()
                } else {
                    a.succ[q].clone()
                }
            })
            .collect()
    };
    let lower = reachable_cycle_mean(&fixed(Owner::P1), false);
    let upper = reachable_cycle_mean(&fixed(Owner::P2), true);
    (lower == upper).then_some(lower)
}

/// A memoryless strategy for `player` securing the candidate values
/// `lambda`, read off the energy game that charges each step its value.
/// Moves into states of better value for `player` end the game; moves into
/// worse ones are never taken.
fn energy_choice(a: &Arena, lambda: &[Rat], player: Owner, budget: u64) -> Option<Vec<usize>> {
    let sign = if player == Owner::P1 { 1 } else { -1 };
    let step = |q: usize, d: usize, w: i64| -> Result<i64, bool> {
        match (lambda[d].cmp(&lambda[q]), player) {
            (std::cmp::Ordering::Equal, _) => {
                let (p, s) = (lambda[q].numer(), lambda[q].denom());
                Ok(sign * (w * s - p))
            }
            (std::cmp::Ordering::Greater, Owner::P1) | (std::cmp::Ordering::Less, Owner::P2) => {
                Err(true)
            }
            _ => Err(false),
        }
    };
    let top: i64 = (0..a.n())
        .map(|q| {
            a.succ[q]
                .iter()
                .filter_map(|&(d, w)| step(q, d, w).ok())
                .map(|r| (-r).max(0))
                .max()
                .unwrap_or(0)
        })
        .sum();
    let req = |q: usize, d: usize, w: i64, f: &[Credit]| match step(q, d, w) {
        Ok(r) => need(f[d], r, top),
        Err(exit) => exit.then_some(0),
    };
    let lift = |q: usize, f: &[Credit]| {
        let reqs = a.succ[q].iter().map(|&(d, w)| req(q, d, w, f));
        if a.owner[q] == player {
            reqs.min_by_key(|&c| key(c)).flatten()
        } else {
            reqs.max_by_key(|&c| key(c)).flatten()
        }
    };
    let f = least_credits(&a.pred, budget, lift)?;
    if f.iter().any(Option::is_none) {
        return None;
    }
    Some(
        (0..a.n())
            .map(|q| {
                if a.owner[q] != player {
                    return usize::MAX;
                }
                a.succ[q]
                    .iter()
                    .min_by_key(|&&(d, w)| key(req(q, d, w, &f)))
                    .map(|&(d, _)| d)
                    .unwrap()
            })
            .collect(),
    )
}

/// Tries the values nearest to `v / k` as exact values.
fn certify_candidate(a: &Arena, v: &[i64], k: u64, budget: u64) -> Option<MpSolution> {
    let n = a.n() as i128;
    let radius = 2 * n * a.max_abs_weight() as i128;
    let lambda: Vec<Rat> = v
        .iter()
        .map(|&x| reconstruct(x as i128, k as i128, n, radius))
        .collect::<Option<_>>()?;
    let sigma = energy_choice(a, &lambda, Owner::P1, budget)?;
    let tau = energy_choice(a, &lambda, Owner::P2, budget)?;
    let choice: Vec<usize> = (0..a.n())
        .map(|q| if a.owner[q] == Owner::P1 { sigma[q] } else { tau[q] })
        .collect();
    let values = certify(a, &choice)?;
    Some(MpSolution {
        values,
        choice: Some(choice),
    })
}

pub(crate) fn solve_mp_arena(a: &Arena) -> MpSolution {
    let n = a.n();
    if n == 0 {
        return MpSolution {
            values: Vec::new(),
            choice: Some(Vec::new()),
        };
    }
    let w = a.max_abs_weight();
    let cap = iteration_cap(n, w);
    let edges: u64 = a.succ.iter().map(|s| s.len() as u64).sum();
    let mut v = vec![0i64; n];
    let mut next = vec![0i64; n];
    let mut choice = vec![(usize::MAX, 0i64); n];
    let mut checkpoint = (n as u64).max(2);
    let mut k = 0u64;
    while k < cap {
        sweep(a, &v, &mut next, &mut choice);
        std::mem::swap(&mut v, &mut next);
        k += 1;
        if k == checkpoint || k == checkpoint + 1 {
            let dst: Vec<usize> = choice.iter().map(|&(d, _)| d).collect();
            if let Some(values) = certify(a, &dst) {
                return MpSolution {
                    values,
                    choice: Some(dst),
                };
            }
            if k == checkpoint + 1 {
                // energy work is kept proportional to the sweeps so far
                if let Some(sol) = certify_candidate(a, &v, k, k * (n as u64 + edges)) {
                    return sol;
                }
                checkpoint *= 2;
            }
        }
    }
    let radius = 2 * n as i128 * w as i128;
    MpSolution {
        values: v
            .iter()
            .map(|&x| {
                reconstruct(x as i128, k as i128, n as i128, radius)
                    .expect("value iteration stays within the proven radius")
            })
            .collect(),
        choice: None,
    }
}

/// The rational with denominator at most `max_den` closest to `v / k`,
/// among those within `radius / k`.
pub(crate) fn reconstruct(v: i128, k: i128, max_den: i128, radius: i128) -> Option<Rat> {
    let mut best: Option<(i128, i128, i128)> = None; // (r, s, |r k - v s|)
    for s in 1..=max_den {
        let r = (2 * v * s + k).div_euclid(2 * k);
        for r in [r, r + 1] {
            let err = (r * k - v * s).abs();
            if err > radius * s {
                continue;
            }
            // compare err/s against best_err/best_s
            if best.is_none_or(|(_, bs, be)| err * bs < be * s) {
                best = Some((r, s, err));
            }
        }
    }
    best.map(|(r, s, _)| Rat::from_i128(r, s))
}
