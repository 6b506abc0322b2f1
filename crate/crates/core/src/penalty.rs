//! Mean-penalty parity games: multi-strategies, the two reductions to
//! mean-payoff parity games, and the direct solver.
//!
//! Player 1 picks a nonempty set of allowed successors at each of her
//! states and pays the total weight of the edges she blocks; the opponent
//! picks among the allowed ones. A play's penalty is the limsup average of
//! these payments, or `inf` when it fails the parity condition.

use thiserror::Error;

use crate::arena::{Adj, Arena};
use crate::game::{Edge, Game, GameKind, Owner, StateId};
use crate::graph::{attr_set, reachable_cycle_mean};
use crate::energy::{key, least_credits, need, Credit};
use crate::mp::reconstruct;
use crate::mpp::one_player_min;
use crate::set::StateSet;
use crate::value::{Rat, Value, ValueFunction};

/// Default cap on out-degree for the exponential reduction.
pub const DEFAULT_DEGREE_BOUND: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PenaltyError {
    #[error("not a mean-penalty parity game")]
    WrongKind,
    #[error("invalid multi-strategy: {0}")]
    InvalidMultiStrategy(String),
    #[error("prefix inconsistent with the multi-strategy at step {step}: {reason}")]
    InconsistentPrefix { step: usize, reason: String },
    #[error("out-degree {degree} exceeds the bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("the second game is not the exponential reduction of the first")]
    MismatchedGames,
}

/// A memoryless multi-strategy: a nonempty set of allowed successors for
/// every Player 1 state, kept in successor declaration order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiStrategy {
    allowed: Vec<Option<Vec<StateId>>>,
}

impl MultiStrategy {
    pub fn new(g: &Game, allowed: Vec<Option<Vec<StateId>>>) -> Result<MultiStrategy, PenaltyError> {
        let bad = |m: String| Err(PenaltyError::InvalidMultiStrategy(m));
        if allowed.len() != g.num_states() {
            return bad(format!(
                "covers {} states, game has {}",
                allowed.len(),
                g.num_states()
            ));
        }
        let mut norm = Vec::with_capacity(allowed.len());
        for (q, set) in g.states().zip(allowed) {
            match (g.owner(q), set) {
                (Owner::P1, Some(set)) => {
                    if set.is_empty() {
                        return bad(format!("empty set at `{}`", g.name(q)));
                    }
                    if let Some(d) = set.iter().find(|&&d| g.weight(q, d).is_none()) {
                        return bad(format!("`{}` is not a successor of `{}`", g.name(*d), g.name(q)));
                    }
                    let ordered: Vec<StateId> = g
                        .successors(q)
                        .iter()
                        .map(|&(d, _)| d)
                        .filter(|d| set.contains(d))
                        .collect();
                    norm.push(Some(ordered));
                }
                (Owner::P1, None) => return bad(format!("no set at `{}`", g.name(q))),
                (Owner::P2, Some(_)) => {
                    return bad(format!("set at `{}`, a Player 2 state", g.name(q)))
                }
                (Owner::P2, None) => norm.push(None),
            }
        }
        Ok(MultiStrategy { allowed: norm })
    }

    /// Allows every edge.
    pub fn permissive(g: &Game) -> MultiStrategy {
        MultiStrategy {
            allowed: g
                .states()
                .map(|q| {
                    (g.owner(q) == Owner::P1)
                        .then(|| g.successors(q).iter().map(|&(d, _)| d).collect())
                })
                .collect(),
        }
    }

    pub fn allowed(&self, q: StateId) -> Option<&[StateId]> {
        self.allowed.get(q.0).and_then(|s| s.as_deref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &[StateId])> + '_ {
        self.allowed
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_deref().map(|s| (StateId(i), s)))
    }

    /// Weight blocked at `q` (0 for Player 2 states).
    pub fn blocked_weight(&self, g: &Game, q: StateId) -> i64 {
        match self.allowed(q) {
            None => 0,
            Some(set) => g
                .successors(q)
                .iter()
                .filter(|(d, _)| !set.contains(d))
                .map(|&(_, w)| w)
                .sum(),
        }
    }
}

/// Total weight blocked along `prefix`, charged at every Player 1 state of
/// the prefix including the last.
pub fn penalty_of_prefix(
    g: &Game,
    sigma: &MultiStrategy,
    prefix: &[StateId],
) -> Result<Rat, PenaltyError> {
    let mut total = 0i64;
    for (i, &q) in prefix.iter().enumerate() {
        total += sigma.blocked_weight(g, q);
        let Some(&next) = prefix.get(i + 1) else {
            break;
        };
        let reason = if g.weight(q, next).is_none() {
            Some(format!("no edge `{}` -> `{}`", g.name(q), g.name(next)))
        } else if sigma.allowed(q).is_some_and(|s| !s.contains(&next)) {
            Some(format!("`{}` -> `{}` is blocked", g.name(q), g.name(next)))
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(PenaltyError::InconsistentPrefix { step: i, reason });
        }
    }
    Ok(Rat::from_int(total))
}

/// Worst-case mean penalty of a memoryless multi-strategy: `inf` where the
/// opponent can reach a cycle with odd least priority, otherwise the
/// heaviest reachable cycle of per-step blocking costs.
pub fn eval_multi_strategy(g: &Game, sigma: &MultiStrategy) -> ValueFunction {
    let adj: Adj = g
        .states()
        .map(|q| {
            let cost = sigma.blocked_weight(g, q);
            match sigma.allowed(q) {
                Some(set) => set.iter().map(|d| (d.0, cost)).collect(),
                None => g.successors(q).iter().map(|&(d, _)| (d.0, 0)).collect(),
            }
        })
        .collect();
    let prio: Vec<u32> = g.states().map(|q| g.priority(q)).collect();
    let odd = one_player_min(&adj, &prio);
    let worst = reachable_cycle_mean(&adj, true);
    ValueFunction::from_values(
        (0..g.num_states())
            .map(|q| match odd[q] {
                Value::NegInf => Value::PosInf,
                _ => Value::Fin(worst[q]),
            })
            .collect(),
    )
}

fn expect_penalty(g: &Game) -> Result<(), PenaltyError> {
    match g.kind() {
        GameKind::MeanPenaltyParity => Ok(()),
        GameKind::MeanPayoffParity => Err(PenaltyError::WrongKind),
    }
}

/// Bar states of the exponential reduction in the order they are created:
/// per original state, allowed sets as bitmasks over its successor list.
fn bar_layout(g: &Game) -> Vec<(StateId, u32)> {
    g.states()
        .flat_map(|q| (1u32..1 << g.successors(q).len()).map(move |f| (q, f)))
        .collect()
}

fn bar_name(g: &Game, q: StateId, f: u32) -> String {
    let members: Vec<&str> = g
        .successors(q)
        .iter()
        .enumerate()
        .filter(|(i, _)| f >> i & 1 == 1)
        .map(|(_, &(d, _))| g.name(d))
        .collect();
    format!("{}[{}]", g.name(q), members.join(","))
}

pub fn reduce_exponential(g: &Game) -> Result<Game, PenaltyError> {
    reduce_exponential_with(g, DEFAULT_DEGREE_BOUND)
}

/// The blocking game: original states keep owner and priority; a Player 1
/// state `q` moves to a bar state `(q, F)` for every nonempty `F ⊆ qE` at
/// weight `-2 · Σ_{qE∖F} w`, a Player 2 state moves to `(q, {q'})` at
/// weight 0, and `(q, F)` (Player 2, top priority) moves to each member of
/// `F` at weight 0. Bar states exist for every `q` and `F`, reachable or not.
pub fn reduce_exponential_with(g: &Game, degree_bound: usize) -> Result<Game, PenaltyError> {
    expect_penalty(g)?;
    let degree = g.stats().max_degree;
    if degree > degree_bound {
        return Err(PenaltyError::DegreeTooLarge {
            degree,
            bound: degree_bound,
        });
    }
    let n = g.num_states();
    let top = g.max_priority();
    let mut names: Vec<String> = g.states().map(|q| g.name(q).to_string()).collect();
    let mut owners: Vec<Owner> = g.states().map(|q| g.owner(q)).collect();
    let mut priorities: Vec<u32> = g.states().map(|q| g.priority(q)).collect();
    let layout = bar_layout(g);
    let mut first_bar = vec![0usize; n];
    for (i, &(q, f)) in layout.iter().enumerate() {
        if f == 1 {
            first_bar[q.0] = n + i;
        }
        names.push(bar_name(g, q, f));
        owners.push(Owner::P2);
        priorities.push(top);
    }
    let mut edges = Vec::new();
    for q in g.states() {
        let succ = g.successors(q);
        let total: i64 = succ.iter().map(|&(_, w)| w).sum();
        for f in 1u32..1 << succ.len() {
            let bar = StateId(first_bar[q.0] + f as usize - 1);
            match g.owner(q) {
                Owner::P1 => {
                    let allowed: i64 = (0..succ.len())
                        .filter(|&i| f >> i & 1 == 1)
                        .map(|i| succ[i].1)
                        .sum();
                    edges.push(Edge {
                        src: q,
                        dst: bar,
                        weight: -2 * (total - allowed),
                    });
                }
                Owner::P2 if f.is_power_of_two() => edges.push(Edge {
                    src: q,
                    dst: bar,
                    weight: 0,
                }),
                Owner::P2 => {}
            }
        }
    }
    for (i, &(q, f)) in layout.iter().enumerate() {
        for (j, &(d, _)) in g.successors(q).iter().enumerate() {
            if f >> j & 1 == 1 {
                edges.push(Edge {
                    src: StateId(n + i),
                    dst: d,
                    weight: 0,
                });
            }
        }
    }
    Ok(Game::new(GameKind::MeanPayoffParity, names, owners, priorities, edges)
        .expect("reduction yields a valid game"))
}

/// The polynomial blocking game. For each state `q` with successor list
/// `q_1..q_k` (`k` the maximal out-degree) Player 1 walks through select
/// states `(q, select, i, m)` deciding per edge whether to block it (only
/// at her own states, and never the last edge when nothing was allowed so
/// far); allowed edges are offered to Player 2 at `(q, allow, i, m)`, whose
/// choice is remembered in `m`; the play finally continues to `q_m`.
/// Blocking edge `i` costs `-2(k+1) · w(q, q_i)`. Gadget states carry the
/// top priority. Their names are `q.select.i.m`, `q.allow.i.m` and
/// `q.block.i.m`.
///
/// States with fewer than `k` successors are padded by repeating their last
/// successor; padded entries cost nothing to block, since blocking them
/// removes no edge.
pub fn reduce_polynomial(g: &Game) -> Result<Game, PenaltyError> {
    expect_penalty(g)?;
    let n = g.num_states();
    let k = g.stats().max_degree;
    let top = g.max_priority();
    let scale = -2 * (k as i64 + 1);
    let per_state = (k + 1) * (k + 1) + 2 * k * (k + 1);
    // local offsets inside one gadget
    let select = |i: usize, m: usize| (i - 1) * (k + 1) + m;
    let allow = |i: usize, m: usize| (k + 1) * (k + 1) + (i - 1) * (k + 1) + m;
    let block = |i: usize, m: usize| (k + 1) * (k + 1) + k * (k + 1) + (i - 1) * (k + 1) + m;

    let mut names: Vec<String> = g.states().map(|q| g.name(q).to_string()).collect();
    let mut owners: Vec<Owner> = g.states().map(|q| g.owner(q)).collect();
    let mut priorities: Vec<u32> = g.states().map(|q| g.priority(q)).collect();
    for q in g.states() {
        let base = g.name(q);
        for i in 1..=k + 1 {
            for m in 0..=k {
                names.push(format!("{base}.select.{i}.{m}"));
                owners.push(Owner::P1);
            }
        }
        for tag in ["allow", "block"] {
            for i in 1..=k {
                for m in 0..=k {
                    names.push(format!("{base}.{tag}.{i}.{m}"));
                    owners.push(Owner::P2);
                }
            }
        }
        priorities.extend(std::iter::repeat_n(top, per_state));
    }

    let mut edges = Vec::new();
    for q in g.states() {
        let off = n + q.0 * per_state;
        let id = |local: usize| StateId(off + local);
        let succ = g.successors(q);
        // padded successor list q_1..q_k with per-entry blocking weight
        let entry = |i: usize| -> (StateId, i64) {
            if i <= succ.len() {
                succ[i - 1]
            } else {
                (succ[succ.len() - 1].0, 0)
            }
        };
        let mut push = |src: StateId, dst: StateId, weight: i64| {
            if !edges
                .iter()
                .rev()
                .take(4)
                .any(|e: &Edge| e.src == src && e.dst == dst)
            {
                edges.push(Edge { src, dst, weight });
            }
        };
        push(q, id(select(1, 0)), 0);
        for i in 1..=k {
            for m in 0..=k {
                push(id(select(i, m)), id(allow(i, m)), 0);
                if g.owner(q) == Owner::P1 && !(i == k && m == 0) {
                    push(id(select(i, m)), id(block(i, m)), 0);
                }
            }
        }
        for m in 0..=k {
            let target = if m == 0 { entry(1).0 } else { entry(m).0 };
            push(id(select(k + 1, m)), target, 0);
        }
        for i in 1..=k {
            for m in 0..=k {
                push(id(allow(i, m)), id(select(i + 1, i)), 0);
                if m >= 1 {
                    push(id(allow(i, m)), id(select(i + 1, m)), 0);
                }
            }
        }
        for i in 1..=k {
            for m in 0..=k {
                push(id(block(i, m)), id(select(i + 1, m)), scale * entry(i).1);
            }
        }
    }
    Ok(Game::new(GameKind::MeanPayoffParity, names, owners, priorities, edges)
        .expect("reduction yields a valid game"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarMode {
    /// `S ∪ {(q, F) | F ⊆ S}`
    Rebar,
    /// `S ∪ {(q, F) | F ∩ S ≠ ∅}`
    Drebar,
}

/// Lifts a state set of `g` to its exponential reduction `gprime`.
pub fn bar_sets(
    g: &Game,
    gprime: &Game,
    s: &StateSet,
    mode: BarMode,
) -> Result<StateSet, PenaltyError> {
    let n = g.num_states();
    let layout = bar_layout(g);
    let consistent = s.universe() == n
        && gprime.num_states() == n + layout.len()
        && g.states().all(|q| gprime.name(q) == g.name(q))
        && layout
            .iter()
            .enumerate()
            .all(|(i, &(q, f))| gprime.name(StateId(n + i)) == bar_name(g, q, f));
    if !consistent {
        return Err(PenaltyError::MismatchedGames);
    }
    let mut out = StateSet::new(gprime.num_states());
    for q in s.iter() {
        out.insert(q);
    }
    for (i, &(q, f)) in layout.iter().enumerate() {
        let succ = g.successors(q);
        let mut members = (0..succ.len())
            .filter(|&j| f >> j & 1 == 1)
            .map(|j| s.contains(succ[j].0));
        let hit = match mode {
            BarMode::Rebar => members.all(|b| b),
            BarMode::Drebar => members.any(|b| b),
        };
        if hit {
            out.insert(StateId(n + i));
        }
    }
    Ok(out)
}

pub fn ssolve_mp(g: &Game) -> ValueFunction {
    let a = Arena::from_game(g);
    ValueFunction::from_values(ssolve_mp_arena(&a).values.into_iter().map(Value::Fin).collect())
}

/// An optimal memoryless multi-strategy for the game with priorities
/// ignored, when value iteration certified one (it does in practice; the
/// fallback path only yields values).
pub fn ssolve_mp_strategy(g: &Game) -> Option<MultiStrategy> {
    let a = Arena::from_game(g);
    let allowed = ssolve_mp_arena(&a).allowed?;
    Some(MultiStrategy {
        allowed: g
            .states()
            .map(|q| {
                (g.owner(q) == Owner::P1).then(|| {
                    g.successors(q)
                        .iter()
                        .map(|&(d, _)| d)
                        .filter(|d| allowed[q.0].contains(&d.0))
                        .collect()
                })
            })
            .collect(),
    })
}

pub(crate) struct PenaltySolution {
    pub values: Vec<Rat>,
    /// Allowed successors per Player 1 state of a certified optimal
    /// multi-strategy.
    pub allowed: Option<Vec<Vec<usize>>>,
}

/// One two-step sweep of the blocking game's value iteration, evaluated on
/// the original states only. Returns the chosen suffix start (Player 1) or
/// successor (Player 2) per state, as positions in `order`.
fn penalty_sweep(
    a: &Arena,
    prev: &[i64],
    next: &mut [i64],
    order: &mut [Vec<(usize, i64)>],
    choice: &mut [usize],
) {
    for q in 0..a.n() {
        let ord = &mut order[q];
        ord.clear();
        ord.extend_from_slice(&a.succ[q]);
        ord.sort_by_key(|&(d, _)| prev[d]);
        if a.owner[q] == Owner::P2 {
            next[q] = prev[ord[0].0];
            choice[q] = 0;
            continue;
        }
        let mut blocked = a.dropped[q];
        let mut best = (i64::MIN, 0);
        for (i, &(d, w)) in ord.iter().enumerate() {
            let c = -2 * blocked + prev[d];
            if c > best.0 {
                best = (c, i);
            }
            blocked += w;
        }
        next[q] = best.0;
        choice[q] = best.1;
    }
}

fn blocked_before(a: &Arena, ord: &[(usize, i64)], q: usize, i: usize) -> i64 {
    a.dropped[q] + ord[..i].iter().map(|&(_, w)| w).sum::<i64>()
}

/// Worst-case penalty of the multi-strategy allowing `allowed[q]` at each
/// Player 1 state.
fn upper_bound(a: &Arena, allowed: &[Vec<usize>]) -> Vec<Rat> {
    let adj: Adj = (0..a.n())
        .map(|q| {
            if a.owner[q] == Owner::P2 {
                return a.succ[q].iter().map(|&(d, _)| (d, 0)).collect();
            }
            let cost = a.dropped[q]
                + a.succ[q]
                    .iter()
                    .filter(|(d, _)| !allowed[q].contains(d))
                    .map(|&(_, w)| w)
                    .sum::<i64>();
            allowed[q].iter().map(|&d| (d, cost)).collect()
        })
        .collect();
    reachable_cycle_mean(&adj, true)
}

/// Least penalty Player 1 can achieve when Player 2 moves to `pick[q]` at
/// his states and, at hers, to the earliest allowed successor in
/// `pref[q]`. Allowing a suffix of `pref[q]` is then her cheapest way to
/// send the play to its first element.
fn lower_bound(a: &Arena, pref: &[Vec<(usize, i64)>], pick: &[usize]) -> Vec<Rat> {
    let adj: Adj = (0..a.n())
        .map(|q| {
            if a.owner[q] == Owner::P2 {
                vec![(pick[q], 0)]
            } else {
                (0..pref[q].len())
                    .map(|i| (pref[q][i].0, blocked_before(a, &pref[q], q, i)))
                    .collect()
            }
        })
        .collect();
    reachable_cycle_mean(&adj, false)
}

/// Exact penalties of the greedy multi-strategy (upper bound) and of the
/// best response to the greedy opponent (lower bound); `Some` when equal.
fn certify_penalty(
    a: &Arena,
    order: &[Vec<(usize, i64)>],
    choice: &[usize],
) -> Option<(Vec<Rat>, Vec<Vec<usize>>)> {
    let allowed: Vec<Vec<usize>> = (0..a.n())
        .map(|q| order[q][choice[q]..].iter().map(|&(d, _)| d).collect())
        .collect();
    let pick: Vec<usize> = (0..a.n()).map(|q| order[q][choice[q]].0).collect();
    let hi = upper_bound(a, &allowed);
    let lo = lower_bound(a, order, &pick);
    (hi == lo).then_some((hi, allowed))
}

/// Energy-game strategies for both players securing the candidate
/// penalties `lambda`, as allowed sets for Player 1 and a preference order
/// plus successor choice for Player 2. Each step earns the class value
/// minus the blocked weight (Player 1) or the reverse (Player 2).
#[allow(clippy::type_complexity)]
fn penalty_energy(
    a: &Arena,
    lambda: &[Rat],
    budget: u64,
) -> Option<(Vec<Vec<usize>>, Vec<Vec<(usize, i64)>>, Vec<usize>)> {
    use std::cmp::Ordering;
    let n = a.n();
    let top: i64 = (0..n)
        .map(|q| {
            let total = a.dropped[q] + a.succ[q].iter().map(|&(_, w)| w).sum::<i64>();
            lambda[q].numer().abs() + lambda[q].denom() * total
        })
        .sum();
    // the credit a move into d needs, seen from q by the player who does
    // better with `better` values
    let into = |q: usize, d: usize, better: Ordering, f: &[Credit]| -> Credit {
        match lambda[d].cmp(&lambda[q]) {
            Ordering::Equal => f[d],
            o if o == better => Some(0),
            _ => None,
        }
    };
    let sorted = |q: usize, better: Ordering, f: &[Credit]| -> Vec<(usize, i64, Credit)> {
        let mut out: Vec<(usize, i64, Credit)> = a.succ[q]
            .iter()
            .map(|&(d, w)| (d, w, into(q, d, better, f)))
            .collect();
        out.sort_by_key(|&(_, _, c)| key(c));
        out
    };
    let total = |q: usize| a.dropped[q] + a.succ[q].iter().map(|&(_, w)| w).sum::<i64>();

    // Player 1 allows a prefix of her successors by increasing need
    let p1_options = |q: usize, f: &[Credit]| -> Vec<(usize, Credit)> {
        let (p, s) = (lambda[q].numer(), lambda[q].denom());
        let ord = sorted(q, Ordering::Less, f);
        let mut kept = 0;
        let mut out = Vec::new();
        for (i, &(_, w, c)) in ord.iter().enumerate() {
            if c.is_none() {
                break;
            }
            kept += w;
            let blocked = total(q) - kept;
            let worst = ord[..=i].iter().map(|&(_, _, c)| key(c)).max().unwrap();
            out.push((i + 1, need(Some(worst), p - s * blocked, top)));
        }
        out
    };
    let lift1 = |q: usize, f: &[Credit]| -> Credit {
        if a.owner[q] == Owner::P2 {
            let p = lambda[q].numer();
            return a.succ[q]
                .iter()
                .map(|&(d, _)| need(into(q, d, Ordering::Less, f), p, top))
                .max_by_key(|&c| key(c))
                .flatten();
        }
        p1_options(q, f).into_iter().map(|(_, c)| c).min_by_key(|&c| key(c)).flatten()
    };
    let f = least_credits(&a.pred, budget, lift1)?;
    if f.iter().any(Option::is_none) {
        return None;
    }
    let allowed: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            if a.owner[q] == Owner::P2 {
                return Vec::new();
            }
            let (len, _) = p1_options(q, &f)
                .into_iter()
                .min_by_key(|&(_, c)| key(c))
                .unwrap();
            sorted(q, Ordering::Less, &f)[..len].iter().map(|&(d, _, _)| d).collect()
        })
        .collect();

    // Player 2 answers any allowed set with its least-need member; Player 1
    // then allows the cheapest suffix
    let lift2 = |q: usize, f: &[Credit]| -> Credit {
        let (p, s) = (lambda[q].numer(), lambda[q].denom());
        if a.owner[q] == Owner::P2 {
            return a.succ[q]
                .iter()
                .map(|&(d, _)| need(into(q, d, Ordering::Greater, f), -p, top))
                .min_by_key(|&c| key(c))
                .flatten();
        }
        let ord = sorted(q, Ordering::Greater, f);
        let mut blocked = a.dropped[q];
        let mut worst = Some(0);
        for &(_, w, c) in &ord {
            let here = need(c, s * blocked - p, top);
            if key(here) > key(worst) {
                worst = here;
            }
            blocked += w;
        }
        worst
    };
    let g = least_credits(&a.pred, budget, lift2)?;
    if g.iter().any(Option::is_none) {
        return None;
    }
    let pref: Vec<Vec<(usize, i64)>> = (0..n)
        .map(|q| {
            sorted(q, Ordering::Greater, &g)
                .into_iter()
                .map(|(d, w, _)| (d, w))
                .collect()
        })
        .collect();
    let pick: Vec<usize> = (0..n)
        .map(|q| {
            a.succ[q]
                .iter()
                .map(|&(d, _)| d)
                .min_by_key(|&d| key(into(q, d, Ordering::Greater, &g)))
                .unwrap()
        })
        .collect();
    Some((allowed, pref, pick))
}

/// Tries the penalties nearest to the potentials after `k` two-step sweeps
/// as exact values.
fn certify_penalty_candidate(a: &Arena, v: &[i64], k: u64, budget: u64) -> Option<PenaltySolution> {
    let n = a.n() as i128;
    let radius = 2 * (2 * n) * penalty_weight_bound(a) as i128;
    let lambda: Vec<Rat> = v
        .iter()
        .map(|&x| reconstruct(x as i128, 2 * k as i128, 2 * n, radius).map(|r| -r))
        .collect::<Option<_>>()?;
    let (allowed, pref, pick) = penalty_energy(a, &lambda, budget)?;
    let hi = upper_bound(a, &allowed);
    let lo = lower_bound(a, &pref, &pick);
    (hi == lo).then_some(PenaltySolution {
        values: hi,
        allowed: Some(allowed),
    })
}

pub(crate) fn penalty_iteration_cap(a: &Arena) -> u64 {
    let n = a.n() as u64;
    let w = penalty_weight_bound(a) as u64;
    16 * n * n * (2 * n - 1) * w + 1
}

/// Largest weight magnitude in the blocking game: twice the heaviest
/// total out-weight.
fn penalty_weight_bound(a: &Arena) -> i64 {
    (0..a.n())
        .map(|q| 2 * (a.dropped[q] + a.succ[q].iter().map(|&(_, w)| w).sum::<i64>()))
        .max()
        .unwrap_or(0)
        .max(1)
}

/// Penalty values with all priorities ignored.
pub(crate) fn ssolve_mp_arena(a: &Arena) -> PenaltySolution {
    let n = a.n();
    if n == 0 {
        return PenaltySolution {
            values: Vec::new(),
            allowed: Some(Vec::new()),
        };
    }
    let cap = penalty_iteration_cap(a);
    let edges: u64 = a.succ.iter().map(|s| s.len() as u64).sum();
    let mut v = vec![0i64; n];
    let mut next = vec![0i64; n];
    let mut order: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    let mut choice = vec![0usize; n];
    let mut checkpoint = (n as u64).max(2);
    let mut k = 0u64;
    while k < cap {
        penalty_sweep(a, &v, &mut next, &mut order, &mut choice);
        std::mem::swap(&mut v, &mut next);
        k += 1;
        if k == checkpoint || k == checkpoint + 1 {
            if let Some((values, allowed)) = certify_penalty(a, &order, &choice) {
                return PenaltySolution {
                    values,
                    allowed: Some(allowed),
                };
            }
            if k == checkpoint + 1 {
                let budget = k * (n as u64 + edges);
                if let Some(sol) = certify_penalty_candidate(a, &v, k, budget) {
                    return sol;
                }
                checkpoint *= 2;
            }
        }
    }
    let steps = 2 * k as i128;
    let radius = 2 * (2 * n as i128) * penalty_weight_bound(a) as i128;
    PenaltySolution {
        values: v
            .iter()
            .map(|&x| {
                -reconstruct(x as i128, steps, 2 * n as i128, radius)
                    .expect("value iteration stays within the proven radius")
            })
            .collect(),
        allowed: None,
    }
}

pub fn solve_penalty(g: &Game) -> ValueFunction {
    ValueFunction::from_values(ssolve_arena(&Arena::from_game(g)))
}

/// The recursive penalty solver: the payoff solver's recursion with the
/// roles of minimum and maximum exchanged and `inf` for losing regions.
/// Restriction keeps the cost of edges leaving the subarena, which Player 1
/// must block to stay inside.
pub(crate) fn ssolve_arena(a: &Arena) -> Vec<Value> {
    let n = a.n();
    let Some(p) = a.min_priority() else {
        return Vec::new();
    };
    let at_p: Vec<bool> = a.prio.iter().map(|&c| c == p).collect();
    let mut out = vec![Value::PosInf; n];
    if p % 2 == 0 {
        let g: Vec<Value> = ssolve_mp_arena(a).values.into_iter().map(Value::Fin).collect();
        if at_p.iter().all(|&b| b) {
            return g;
        }
        let trap: Vec<bool> = attr_set(a, Owner::P1, &at_p).iter().map(|&b| !b).collect();
        let f = ssolve_sub(a, &trap);
        let x = (0..n)
            .filter_map(|q| f[q])
            .chain(g.iter().copied())
            .max()
            .unwrap();
        let seeds: Vec<bool> = (0..n).map(|q| f[q] == Some(x) || g[q] == x).collect();
        let attracted = attr_set(a, Owner::P2, &seeds);
        merge(a, &attracted, x, &mut out, Value::min);
    } else {
        let trap: Vec<bool> = attr_set(a, Owner::P2, &at_p).iter().map(|&b| !b).collect();
        if !trap.iter().any(|&b| b) {
            return out;
        }
        let f = ssolve_sub(a, &trap);
        let x = (0..n).filter_map(|q| f[q]).min().unwrap();
        let seeds: Vec<bool> = (0..n).map(|q| f[q] == Some(x)).collect();
        let attracted = attr_set(a, Owner::P1, &seeds);
        merge(a, &attracted, x, &mut out, Value::max);
    }
    out
}

fn ssolve_sub(a: &Arena, keep: &[bool]) -> Vec<Option<Value>> {
    let (sub, map) = a.restrict(keep);
    let vals = ssolve_arena(&sub);
    let mut out = vec![None; a.n()];
    for (i, &q) in map.iter().enumerate() {
        out[q] = Some(vals[i]);
    }
    out
}

fn merge(a: &Arena, attracted: &[bool], x: Value, out: &mut [Value], op: fn(Value, Value) -> Value) {
    let rest: Vec<bool> = attracted.iter().map(|&b| !b).collect();
    let r = if rest.iter().any(|&b| b) {
        ssolve_sub(a, &rest)
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
