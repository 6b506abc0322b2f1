//! Certificates for the value problem of mean-payoff parity games.
//!
//! `val(q0) >= x` is certified by a tree of guesses checked by [`verify_np`]:
//! a 2-trap containing `q0`, then per nonempty subarena either a memoryless
//! mean-payoff strategy (least priority even) or a nested 2-trap (least
//! priority odd). The verifier recomputes every attractor itself.
//! `val(q0) < x` is certified by a memoryless Player 2 strategy.

use thiserror::Error;

use crate::game::{restrict_with_map, Game, Owner, StateId};
use crate::graph::{attractor, is_trap};
use crate::mp::{eval_p1_memoryless_mp, extract_optimal_memoryless_mp};
use crate::mpp::{eval_p2_memoryless_mpp, solve_mpp};
use crate::oracle::StrategySpace;
use crate::set::StateSet;
use crate::strategy::{MemorylessStrategy, StrategyError};
use crate::value::{Rat, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessNode {
    /// The empty subarena.
    Empty,
    /// Least priority even: Player 1's mean-payoff strategy on the node's
    /// subarena as `(state, successor)` pairs, and the witness for what
    /// remains outside her attractor to that priority.
    Even {
        strategy: Vec<(StateId, StateId)>,
        child: Box<WitnessNode>,
    },
    /// Least priority odd: a nonempty 2-trap avoiding Player 2's attractor
    /// to that priority, its witness, and the witness for what remains
    /// outside Player 1's attractor to the trap.
    Odd {
        trap: StateSet,
        inside: Box<WitnessNode>,
        rest: Box<WitnessNode>,
    },
}

impl WitnessNode {
    pub fn node_count(&self) -> usize {
        match self {
            WitnessNode::Empty => 1,
            WitnessNode::Even { child, .. } => 1 + child.node_count(),
            WitnessNode::Odd { inside, rest, .. } => 1 + inside.node_count() + rest.node_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpWitness {
    pub threshold: Rat,
    /// The top 2-trap; must contain the queried state.
    pub trap: StateSet,
    pub root: WitnessNode,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Reject {
    #[error("not a 2-trap: {0}")]
    NotATrap(String),
    #[error("strategy secures less than the threshold at `{0}`")]
    StrategyBelowThreshold(String),
    #[error("node parity does not match least priority {0}")]
    WrongParity(u32),
    #[error("malformed witness: {0}")]
    Malformed(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("every state has value below {0}")]
pub struct NoWitness(pub Rat);

/// `S` restricted, with local ids mapped back.
fn sub(g: &Game, s: &StateSet) -> (Game, Vec<StateId>) {
    restrict_with_map(g, s).expect("witness subarenas are checked before restriction")
}

/// Attractor of `player` to `target` inside the subarena `s`, as a set of `g`.
fn attr_within(g: &Game, s: &StateSet, player: Owner, target: &StateSet) -> StateSet {
    let (h, map) = sub(g, s);
    let local = StateSet::from_ids(h.num_states(), (0..map.len()).filter(|&i| target.contains(map[i])).map(StateId));
    let a = attractor(&h, player, &local);
    StateSet::from_ids(g.num_states(), a.set.iter().map(|q| map[q.0]))
}

fn least_priority(g: &Game, s: &StateSet) -> Option<u32> {
    s.iter().map(|q| g.priority(q)).min()
}

fn with_priority(g: &Game, s: &StateSet, p: u32) -> StateSet {
    StateSet::from_ids(g.num_states(), s.iter().filter(|&q| g.priority(q) == p))
}

/// Is `t` a nonempty 2-trap of the subarena `s`?
fn is_trap_within(g: &Game, s: &StateSet, t: &StateSet) -> bool {
    if !t.is_subset(s) {
        return false;
    }
    let (h, map) = sub(g, s);
    let local = StateSet::from_ids(h.num_states(), (0..map.len()).filter(|&i| t.contains(map[i])).map(StateId));
    is_trap(&h, Owner::P2, &local)
}

/// What `strategy` secures on every state of `s` in the game restricted to
/// `s` with priorities ignored.
fn strategy_values(
    g: &Game,
    s: &StateSet,
    strategy: &[(StateId, StateId)],
) -> Result<Vec<(StateId, Rat)>, Reject> {
    let (h, map) = sub(g, s);
    let mut local = vec![usize::MAX; g.num_states()];
    for (i, q) in map.iter().enumerate() {
        local[q.0] = i;
    }
    let mut choice = vec![None; h.num_states()];
    for &(q, d) in strategy {
        let (lq, ld) = (local.get(q.0), local.get(d.0));
        match (lq, ld) {
            (Some(&lq), Some(&ld)) if lq != usize::MAX && ld != usize::MAX => {
                if choice[lq].replace(StateId(ld)).is_some() {
                    return Err(Reject::Malformed(format!("two moves at `{}`", g.name(q))));
                }
            }
            _ => {
                return Err(Reject::Malformed(format!(
                    "move at state {} leaves the subarena",
                    q.0
                )))
            }
        }
    }
    let sigma = MemorylessStrategy::new(&h, Owner::P1, choice)
        .map_err(|e| Reject::Malformed(e.to_string()))?;
    let vals = eval_p1_memoryless_mp(&h, &sigma).expect("validated above");
    Ok(vals
        .iter()
        .map(|(i, v)| (map[i.0], v.as_rat().expect("mean payoffs are finite")))
        .collect())
}

/// Checks that `w` certifies `val(q0) >= x`. The witness's own threshold
/// is not consulted.
pub fn verify_np(g: &Game, q0: StateId, x: Rat, w: &NpWitness) -> Result<(), Reject> {
    if w.trap.universe() != g.num_states() || q0.0 >= g.num_states() {
        return Err(Reject::Malformed("state set over a different game".into()));
    }
    if !w.trap.contains(q0) {
        return Err(Reject::Malformed(format!("`{}` is not in the top trap", g.name(q0))));
    }
    if !is_trap(g, Owner::P2, &w.trap) {
        return Err(Reject::NotATrap("top trap".into()));
    }
    check(g, &w.trap, x, &w.root)
}

fn check(g: &Game, s: &StateSet, x: Rat, node: &WitnessNode) -> Result<(), Reject> {
    let Some(p) = least_priority(g, s) else {
        return match node {
            WitnessNode::Empty => Ok(()),
            _ => Err(Reject::Malformed("node for an empty set".into())),
        };
    };
    let at_p = with_priority(g, s, p);
    match node {
        WitnessNode::Empty => Err(Reject::Malformed("empty node for a nonempty set".into())),
        WitnessNode::Even { strategy, child } => {
            if p % 2 == 1 {
                return Err(Reject::WrongParity(p));
            }
            for (q, v) in strategy_values(g, s, strategy)? {
                if v < x {
                    return Err(Reject::StrategyBelowThreshold(g.name(q).to_string()));
                }
            }
            let a = attr_within(g, s, Owner::P1, &at_p);
            check(g, &s.difference(&a), x, child)
        }
        WitnessNode::Odd { trap, inside, rest } => {
            if p % 2 == 0 {
                return Err(Reject::WrongParity(p));
            }
            if trap.universe() != g.num_states() {
                return Err(Reject::Malformed("state set over a different game".into()));
            }
            let r = s.difference(&attr_within(g, s, Owner::P2, &at_p));
            if trap.is_empty() || !is_trap_within(g, &r, trap) {
                return Err(Reject::NotATrap(format!("nested trap at priority {p}")));
            }
            check(g, trap, x, inside)?;
            let a = attr_within(g, s, Owner::P1, trap);
            check(g, &s.difference(&a), x, rest)
        }
    }
}

/// The witness for `val >= x` built from the solver's values; it is
/// accepted for every state whose value is at least `x`.
pub fn make_np_witness(g: &Game, x: Rat) -> Result<NpWitness, NoWitness> {
    let vals = solve_mpp(g);
    let at_least = Value::Fin(x);
    let trap = StateSet::from_ids(
        g.num_states(),
        g.states().filter(|&q| vals.at(q) >= at_least),
    );
    if trap.is_empty() {
        return Err(NoWitness(x));
    }
    Ok(NpWitness {
        threshold: x,
        root: build(g, &trap, x),
        trap,
    })
}

fn build(g: &Game, s: &StateSet, x: Rat) -> WitnessNode {
    let Some(p) = least_priority(g, s) else {
        return WitnessNode::Empty;
    };
    let at_p = with_priority(g, s, p);
    if p % 2 == 0 {
        let (h, map) = sub(g, s);
        let (sigma, _) = extract_optimal_memoryless_mp(&h);
        let strategy = sigma.iter().map(|(q, d)| (map[q.0], map[d.0])).collect();
        let a = attr_within(g, s, Owner::P1, &at_p);
        WitnessNode::Even {
            strategy,
            child: Box::new(build(g, &s.difference(&a), x)),
        }
    } else {
        let r = s.difference(&attr_within(g, s, Owner::P2, &at_p));
        let (hr, rmap) = sub(g, &r);
        let vals = solve_mpp(&hr);
        let trap = StateSet::from_ids(
            g.num_states(),
            hr.states().filter(|&q| vals.at(q) >= Value::Fin(x)).map(|q| rmap[q.0]),
        );
        let a = attr_within(g, s, Owner::P1, &trap);
        WitnessNode::Odd {
            inside: Box::new(build(g, &trap, x)),
            rest: Box::new(build(g, &s.difference(&a), x)),
            trap,
        }
    }
}

/// Searches every witness the verifier could be given, for tiny games.
/// Returns an accepted one if any exists.
pub fn search_np_witness(g: &Game, q0: StateId, x: Rat) -> Option<NpWitness> {
    let n = g.num_states();
    assert!(n <= 16, "exhaustive witness search is for tiny games");
    (1u64..1 << n)
        .map(|m| StateSet::from_mask(n, m))
        .filter(|t| t.contains(q0) && is_trap(g, Owner::P2, t))
        .find_map(|trap| {
            search(g, &trap, x).map(|root| NpWitness {
                threshold: x,
                trap,
                root,
            })
        })
}

fn search(g: &Game, s: &StateSet, x: Rat) -> Option<WitnessNode> {
    let Some(p) = least_priority(g, s) else {
        return Some(WitnessNode::Empty);
    };
    let at_p = with_priority(g, s, p);
    if p % 2 == 0 {
        let a = attr_within(g, s, Owner::P1, &at_p);
        let child = search(g, &s.difference(&a), x)?;
        let (h, map) = sub(g, s);
        let space = StrategySpace::new(&h, Owner::P1);
        let found = space.iter().find_map(|sigma| {
            let strategy: Vec<(StateId, StateId)> =
                sigma.iter().map(|(q, d)| (map[q.0], map[d.0])).collect();
            let vals = strategy_values(g, s, &strategy).ok()?;
            vals.iter().all(|&(_, v)| v >= x).then(|| WitnessNode::Even {
                strategy,
                child: Box::new(child.clone()),
            })
        });
        found
    } else {
        let r = s.difference(&attr_within(g, s, Owner::P2, &at_p));
        let members: Vec<StateId> = r.iter().collect();
        (1u64..1 << members.len()).find_map(|m| {
            let trap = StateSet::from_ids(
                g.num_states(),
                (0..members.len()).filter(|i| m >> i & 1 == 1).map(|i| members[i]),
            );
            if !is_trap_within(g, &r, &trap) {
                return None;
            }
            let inside = search(g, &trap, x)?;
            let a = attr_within(g, s, Owner::P1, &trap);
            let rest = search(g, &s.difference(&a), x)?;
            Some(WitnessNode::Odd {
                trap,
                inside: Box::new(inside),
                rest: Box::new(rest),
            })
        })
    }
}

/// Accepts iff `tau` holds Player 1 strictly below `x` from `q0`, which
/// certifies `val(q0) < x`.
pub fn verify_conp(
    g: &Game,
    q0: StateId,
    x: Rat,
    tau: &MemorylessStrategy,
) -> Result<bool, StrategyError> {
    let vals = eval_p2_memoryless_mpp(g, tau)?;
    Ok(vals.at(q0) < Value::Fin(x))
}
