//! Finite plays between (possibly stateful) strategies, and the strategy
//! played in rounds that approaches the value with infinite memory.
//!
//! A round first forces a visit to a target state of least even priority
//! with an attractor strategy, then follows a pumping strategy for as many
//! steps as the round's index. Pumping steps are counted from the visit to
//! the target.

use thiserror::Error;

use crate::game::{restrict_with_map, Game, Owner, StateId};
use crate::graph::{attractor, is_subarena};
use crate::mp::extract_optimal_memoryless_mp;
use crate::penalty::{ssolve_mp_strategy, MultiStrategy};
use crate::set::StateSet;
use crate::strategy::MemorylessStrategy;
use crate::value::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlayError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("step {step}: `{from}` -> `{to}` is not a legal move")]
    IllegalMove { step: usize, from: String, to: String },
    #[error("bad component: {0}")]
    BadComponent(String),
}

/// A strategy for one player, told about every state the play visits.
pub trait Player {
    /// Called once per visited state, in order, before any choice there.
    fn observe(&mut self, _g: &Game, _q: StateId) {}
    /// Successor at `q`, a state of this player.
    fn choose(&mut self, g: &Game, q: StateId) -> StateId;
}

impl Player for MemorylessStrategy {
    fn choose(&mut self, g: &Game, q: StateId) -> StateId {
        self.get(q).unwrap_or_else(|| g.successors(q)[0].0)
    }
}

/// Always the first declared successor.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstSuccessor;

impl Player for FirstSuccessor {
    fn choose(&mut self, g: &Game, q: StateId) -> StateId {
        g.successors(q)[0].0
    }
}

/// A finite play with its running payoff statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayTrace {
    /// `horizon + 1` states.
    pub states: Vec<StateId>,
    /// `sums[j]`: total weight of the first `j` steps.
    pub sums: Vec<i64>,
    /// `means[j] = sums[j] / j`; `means[0]` is 0.
    pub means: Vec<Rat>,
    /// Least priority among the last `|V|` states.
    pub window_min_priority: u32,
}

impl PlayTrace {
    fn new(g: &Game, states: Vec<StateId>, step_weights: &[i64]) -> PlayTrace {
        let mut sums = vec![0i64];
        for &w in step_weights {
            sums.push(sums.last().unwrap() + w);
        }
        let means = prefix_means(&sums);
        let from = states.len().saturating_sub(g.num_states());
        let window_min_priority = states[from..].iter().map(|&q| g.priority(q)).min().unwrap();
        PlayTrace {
            states,
            sums,
            means,
            window_min_priority,
        }
    }

    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    /// Least priority among the states from index `start` on.
    pub fn min_priority_since(&self, g: &Game, start: usize) -> Option<u32> {
        self.states.get(start..)?.iter().map(|&q| g.priority(q)).min()
    }
}

fn prefix_means(sums: &[i64]) -> Vec<Rat> {
    sums.iter()
        .enumerate()
        .map(|(j, &s)| if j == 0 { Rat::ZERO } else { Rat::new(s, j as i64) })
        .collect()
}

fn illegal(g: &Game, step: usize, from: StateId, to: StateId) -> PlayError {
    PlayError::IllegalMove {
        step,
        from: g.name(from).to_string(),
        to: g.name(to).to_string(),
    }
}

/// The play of `horizon` steps from `start` where `s1` moves at Player 1
/// states and `s2` at Player 2 states.
pub fn simulate(
    g: &Game,
    s1: &mut dyn Player,
    s2: &mut dyn Player,
    horizon: usize,
    start: StateId,
) -> Result<PlayTrace, PlayError> {
    if horizon == 0 {
        return Err(PlayError::ZeroHorizon);
    }
    let mut states = vec![start];
    let mut weights = Vec::with_capacity(horizon);
    let mut q = start;
    for step in 0..horizon {
        s1.observe(g, q);
        s2.observe(g, q);
        let next = match g.owner(q) {
            Owner::P1 => s1.choose(g, q),
            Owner::P2 => s2.choose(g, q),
        };
        let w = g.weight(q, next).ok_or_else(|| illegal(g, step, q, next))?;
        weights.push(w);
        states.push(next);
        q = next;
    }
    Ok(PlayTrace::new(g, states, &weights))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    ToTarget,
    Pump,
}

/// Phase bookkeeping shared by the payoff and penalty round strategies.
#[derive(Clone, Debug)]
struct Rounds {
    target: StateId,
    phase: Phase,
    round: usize,
    pumped: usize,
    visited: usize,
    round_ends: Vec<usize>,
}

impl Rounds {
    fn new(target: StateId) -> Rounds {
        Rounds {
            target,
            phase: Phase::ToTarget,
            round: 1,
            pumped: 0,
            visited: 0,
            round_ends: Vec::new(),
        }
    }

    fn observe(&mut self, q: StateId) {
        if self.visited > 0 && self.phase == Phase::Pump {
            self.pumped += 1;
            if self.pumped == self.round {
                self.round_ends.push(self.visited);
                self.round += 1;
                self.pumped = 0;
                self.phase = Phase::ToTarget;
            }
        }
        self.visited += 1;
        if self.phase == Phase::ToTarget && q == self.target {
            self.phase = Phase::Pump;
        }
    }
}

/// Checks the component and returns it as a game with the id map.
fn component_game(
    g: &Game,
    component: &StateSet,
    q_min: StateId,
) -> Result<(Game, Vec<StateId>, StateId), PlayError> {
    let bad = |m: String| Err(PlayError::BadComponent(m));
    if component.universe() != g.num_states() {
        return bad("state set over a different game".into());
    }
    if !component.contains(q_min) {
        return bad(format!("`{}` is not in the component", g.name(q_min)));
    }
    if !is_subarena(g, component) {
        return bad("not a subarena".into());
    }
    let p = g.priority(q_min);
    if p % 2 == 1 || component.iter().any(|q| g.priority(q) < p) {
        return bad(format!(
            "`{}` does not have the least priority of the component, or it is odd",
            g.name(q_min)
        ));
    }
    let (sub, map) = restrict_with_map(g, component).map_err(|e| PlayError::BadComponent(e.to_string()))?;
    let local = map.iter().position(|&q| q == q_min).unwrap();
    Ok((sub, map, StateId(local)))
}

/// Attractor strategy to `target` inside `sub`, in original ids.
fn attract_choices(g: &Game, sub: &Game, map: &[StateId], target: StateId) -> Vec<Option<StateId>> {
    let attr = attractor(sub, Owner::P1, &StateSet::from_ids(sub.num_states(), [target]));
    let mut out = vec![None; g.num_states()];
    for (i, c) in attr.strategy.iter().enumerate() {
        out[map[i].0] = c.map(|d| map[d.0]);
    }
    out
}

/// Player 1's strategy played in rounds on a component.
#[derive(Clone, Debug)]
pub struct RoundsStrategy {
    rounds: Rounds,
    attract: Vec<Option<StateId>>,
    pump: Vec<Option<StateId>>,
}

impl RoundsStrategy {
    pub fn phase(&self) -> Phase {
        self.rounds.phase
    }

    /// Index of the round being played, from 1.
    pub fn round(&self) -> usize {
        self.rounds.round
    }

    /// Trace index at which each completed round ended.
    pub fn round_ends(&self) -> &[usize] {
        &self.rounds.round_ends
    }

    pub fn pump(&self, q: StateId) -> Option<StateId> {
        self.pump[q.0]
    }
}

impl Player for RoundsStrategy {
    fn observe(&mut self, _g: &Game, q: StateId) {
        self.rounds.observe(q);
    }

    fn choose(&mut self, g: &Game, q: StateId) -> StateId {
        let attract = match self.rounds.phase {
            Phase::ToTarget => self.attract[q.0],
            Phase::Pump => None,
        };
        attract
            .or(self.pump[q.0])
            .unwrap_or_else(|| g.successors(q)[0].0)
    }
}

/// Rounds strategy on `component` with target `q_min`; the pumping
/// strategy is an optimal memoryless mean-payoff strategy of the component
/// with priorities ignored.
pub fn rounds_strategy(
    g: &Game,
    component: &StateSet,
    q_min: StateId,
) -> Result<RoundsStrategy, PlayError> {
    let (sub, map, target) = component_game(g, component, q_min)?;
    let (sigma, _) = extract_optimal_memoryless_mp(&sub);
    let mut pump = vec![None; g.num_states()];
    for (i, d) in sigma.iter() {
        pump[map[i.0].0] = Some(map[d.0]);
    }
    Ok(RoundsStrategy {
        rounds: Rounds::new(q_min),
        attract: attract_choices(g, &sub, &map, target),
        pump,
    })
}

/// Player 1 in a mean-penalty game: an allowed set at each of her states.
pub trait MultiPlayer {
    fn observe(&mut self, _g: &Game, _q: StateId) {}
    /// Nonempty set of successors of `q` to allow.
    fn allow(&mut self, g: &Game, q: StateId) -> Vec<StateId>;
}

impl MultiPlayer for MultiStrategy {
    fn allow(&mut self, g: &Game, q: StateId) -> Vec<StateId> {
        match self.allowed(q) {
            Some(set) => set.to_vec(),
            None => g.successors(q).iter().map(|&(d, _)| d).collect(),
        }
    }
}

/// Player 2 in a mean-penalty game: picks among the allowed successors, or
/// among all successors at his own states.
pub trait Resolver {
    fn observe(&mut self, _g: &Game, _q: StateId) {}
    fn resolve(&mut self, g: &Game, q: StateId, allowed: &[StateId]) -> StateId;
}

/// The allowed successor declared first.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstAllowed;

impl Resolver for FirstAllowed {
    fn resolve(&mut self, _g: &Game, _q: StateId, allowed: &[StateId]) -> StateId {
        allowed[0]
    }
}

/// A Player 2 memoryless strategy at his states, first allowed elsewhere.
impl Resolver for MemorylessStrategy {
    fn resolve(&mut self, _g: &Game, q: StateId, allowed: &[StateId]) -> StateId {
        self.get(q)
            .filter(|d| allowed.contains(d))
            .unwrap_or(allowed[0])
    }
}

/// A finite play of a mean-penalty game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PenaltyTrace {
    /// `horizon + 1` states.
    pub states: Vec<StateId>,
    /// Weight blocked at each step, charged to the step's source state.
    pub blocked: Vec<i64>,
    /// `sums[j]`: total blocked weight of the first `j` steps.
    pub sums: Vec<i64>,
    /// `means[j] = sums[j] / j`; `means[0]` is 0.
    pub means: Vec<Rat>,
}

pub fn simulate_penalty(
    g: &Game,
    s1: &mut dyn MultiPlayer,
    s2: &mut dyn Resolver,
    horizon: usize,
    start: StateId,
) -> Result<PenaltyTrace, PlayError> {
    if horizon == 0 {
        return Err(PlayError::ZeroHorizon);
    }
    let mut states = vec![start];
    let mut blocked = Vec::with_capacity(horizon);
    let mut q = start;
    for step in 0..horizon {
        s1.observe(g, q);
        s2.observe(g, q);
        let all: Vec<StateId> = g.successors(q).iter().map(|&(d, _)| d).collect();
        let allowed = match g.owner(q) {
            Owner::P1 => s1.allow(g, q),
            Owner::P2 => all.clone(),
        };
        if let Some(&d) = allowed.iter().find(|&&d| g.weight(q, d).is_none()) {
            return Err(illegal(g, step, q, d));
        }
        let next = s2.resolve(g, q, &allowed);
        if !allowed.contains(&next) {
            return Err(illegal(g, step, q, next));
        }
        let cost = match g.owner(q) {
            Owner::P1 => g
                .successors(q)
                .iter()
                .filter(|(d, _)| !allowed.contains(d))
                .map(|&(_, w)| w)
                .sum(),
            Owner::P2 => 0,
        };
        blocked.push(cost);
        states.push(next);
        q = next;
    }
    let mut sums = vec![0i64];
    for &c in &blocked {
        sums.push(sums.last().unwrap() + c);
    }
    let means = prefix_means(&sums);
    Ok(PenaltyTrace {
        states,
        blocked,
        sums,
        means,
    })
}

/// Player 1's multi-strategy played in rounds: while heading for the
/// target she allows only the attractor move; while pumping she allows an
/// optimal memoryless multi-strategy of the component, always blocking
/// edges that leave it.
#[derive(Clone, Debug)]
pub struct PenaltyRoundsStrategy {
    rounds: Rounds,
    attract: Vec<Option<StateId>>,
    pump: Vec<Option<Vec<StateId>>>,
}

impl PenaltyRoundsStrategy {
    pub fn phase(&self) -> Phase {
        self.rounds.phase
    }

    pub fn round(&self) -> usize {
        self.rounds.round
    }

    pub fn round_ends(&self) -> &[usize] {
        &self.rounds.round_ends
    }
}

impl MultiPlayer for PenaltyRoundsStrategy {
    fn observe(&mut self, _g: &Game, q: StateId) {
        self.rounds.observe(q);
    }

    fn allow(&mut self, g: &Game, q: StateId) -> Vec<StateId> {
        if self.rounds.phase == Phase::ToTarget {
            if let Some(d) = self.attract[q.0] {
                return vec![d];
            }
        }
        match &self.pump[q.0] {
            Some(set) => set.clone(),
            None => g.successors(q).iter().map(|&(d, _)| d).collect(),
        }
    }
}

pub fn penalty_rounds_strategy(
    g: &Game,
    component: &StateSet,
    q_min: StateId,
) -> Result<PenaltyRoundsStrategy, PlayError> {
    let (sub, map, target) = component_game(g, component, q_min)?;
    let sigma = ssolve_mp_strategy(&sub).unwrap_or_else(|| MultiStrategy::permissive(&sub));
    let mut pump = vec![None; g.num_states()];
    for (i, set) in sigma.iter() {
        pump[map[i.0].0] = Some(set.iter().map(|d| map[d.0]).collect());
    }
    Ok(PenaltyRoundsStrategy {
        rounds: Rounds::new(q_min),
        attract: attract_choices(g, &sub, &map, target),
        pump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_game, GameBuilder, GameKind};

    const DELAY: &str = "mppg v1
kind mean-payoff-parity
state q1 owner=1 priority=1
state q2 owner=1 priority=0
edge q1 q1 weight=1
edge q1 q2 weight=0
edge q2 q1 weight=0
";

    #[test]
    fn memoryless_plays_are_lasso_shaped() {
        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let x = b.state("a", Owner::P1, 0);
        let y = b.state("b", Owner::P2, 0);
        let z = b.state("c", Owner::P1, 0);
        b.edge(x, y, 4).edge(y, z, 1).edge(z, y, 3);
        let g = b.build().unwrap();
        let t = simulate(&g, &mut FirstSuccessor, &mut FirstSuccessor, 9, x).unwrap();
        assert_eq!(t.states.len(), 10);
        assert_eq!(t.sums[9], 4 + 4 * 4);
        // tail cycle mean 2
        assert_eq!(Rat::new(t.sums[9] - t.sums[1], 8), Rat::from_int(2));
        assert_eq!(t.means[1], Rat::from_int(4));
        assert_eq!(t.window_min_priority, 0);
    }

    #[test]
    fn zero_horizon_rejected() {
        let g = parse_game(DELAY).unwrap();
        let r = simulate(&g, &mut FirstSuccessor, &mut FirstSuccessor, 0, StateId(0));
        assert_eq!(r, Err(PlayError::ZeroHorizon));
    }

    #[test]
    fn illegal_move_reported() {
        struct Teleport;
        impl Player for Teleport {
            fn choose(&mut self, _g: &Game, _q: StateId) -> StateId {
                StateId(1)
            }
        }
        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let x = b.state("a", Owner::P1, 0);
        b.state("b", Owner::P1, 0);
        b.edge(x, x, 0).edge(StateId(1), StateId(1), 0);
        let g = b.build().unwrap();
        let r = simulate(&g, &mut Teleport, &mut FirstSuccessor, 3, x);
        assert!(matches!(r, Err(PlayError::IllegalMove { step: 0, .. })));
    }

    #[test]
    fn delay_rounds() {
        let g = parse_game(DELAY).unwrap();
        let all = StateSet::full(2);
        let mut s = rounds_strategy(&g, &all, StateId(1)).unwrap();
        assert_eq!(s.pump(StateId(0)), Some(StateId(0)));
        let t = simulate(&g, &mut s, &mut FirstSuccessor, 200, StateId(0)).unwrap();
        // round i: one step to q2, then i pumping steps of which i - 1 loop
        for (r, &end) in s.round_ends().iter().enumerate() {
            let r = r as i64 + 1;
            assert_eq!(end as i64, r * (r + 3) / 2);
            assert_eq!(t.means[end], Rat::new(r - 1, r + 3));
        }
        assert!(s.round_ends().len() >= 15);
        assert_eq!(t.min_priority_since(&g, 150), Some(0));
    }

    #[test]
    fn single_loop_component() {
        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let x = b.state("a", Owner::P1, 2);
        let y = b.state("b", Owner::P2, 1);
        b.edge(x, x, 3).edge(x, y, 0).edge(y, x, 0);
        let g = b.build().unwrap();
        let c = StateSet::from_ids(2, [x]);
        let mut s = rounds_strategy(&g, &c, x).unwrap();
        let t = simulate(&g, &mut s, &mut FirstSuccessor, 25, x).unwrap();
        assert!(t.means[1..].iter().all(|&m| m == Rat::from_int(3)));
    }

    #[test]
    fn bad_components() {
        let g = parse_game(DELAY).unwrap();
        let all = StateSet::full(2);
        // q1 has odd priority
        assert!(rounds_strategy(&g, &all, StateId(0)).is_err());
        // {q2} alone has no successor inside
        let q2 = StateSet::from_ids(2, [StateId(1)]);
        assert!(rounds_strategy(&g, &q2, StateId(1)).is_err());
    }

    const BLOCKING: &str = "mppg v1
kind mean-penalty-parity
state q1 owner=1 priority=1
state q2 owner=2 priority=0
edge q1 q1 weight=2
edge q1 q2 weight=2
edge q2 q1 weight=0
";

    #[test]
    fn blocking_penalty_rounds() {
        let g = parse_game(BLOCKING).unwrap();
        let all = StateSet::full(2);
        let mut s = penalty_rounds_strategy(&g, &all, StateId(1)).unwrap();
        let t = simulate_penalty(&g, &mut s, &mut FirstAllowed, 300, StateId(0)).unwrap();
        // round i blocks the loop once, then pumps i steps
        for (r, &end) in s.round_ends().iter().enumerate() {
            let r = r as i64 + 1;
            assert_eq!(t.means[end], Rat::new(4, r + 3));
        }
        assert!(s.round_ends().len() >= 20);
    }

    #[test]
    fn memoryless_multi_strategy_play() {
        let g = parse_game(BLOCKING).unwrap();
        let mut block = MultiStrategy::new(&g, vec![Some(vec![StateId(1)]), None]).unwrap();
        let t = simulate_penalty(&g, &mut block, &mut FirstAllowed, 10, StateId(0)).unwrap();
        assert_eq!(t.blocked, vec![2, 0, 2, 0, 2, 0, 2, 0, 2, 0]);
        assert_eq!(t.means[10], Rat::from_int(1));
    }
}
