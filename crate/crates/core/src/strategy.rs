//! Memoryless strategies.

use thiserror::Error;

use crate::game::{Game, Owner, StateId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy does not match the game: {0}")]
    DomainMismatch(String),
}

/// A memoryless strategy: one successor per state of `owner`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MemorylessStrategy {
    owner: Owner,
    choice: Vec<Option<StateId>>,
}

impl MemorylessStrategy {
    /// Validates that `choice` is defined exactly on the states of `owner`
    /// and always picks a successor.
    pub fn new(
        g: &Game,
        owner: Owner,
        choice: Vec<Option<StateId>>,
    ) -> Result<MemorylessStrategy, StrategyError> {
        let s = MemorylessStrategy { owner, choice };
        s.check(g)?;
        Ok(s)
    }

    /// Builds a strategy from a choice function on `owner`'s states.
    pub fn from_fn(
        g: &Game,
        owner: Owner,
        f: impl Fn(StateId) -> StateId,
    ) -> Result<MemorylessStrategy, StrategyError> {
        let choice = g
            .states()
            .map(|q| (g.owner(q) == owner).then(|| f(q)))
            .collect();
        MemorylessStrategy::new(g, owner, choice)
    }

    /// The strategy picking the first declared successor everywhere.
    pub fn first_successor(g: &Game, owner: Owner) -> MemorylessStrategy {
        MemorylessStrategy::from_fn(g, owner, |q| g.successors(q)[0].0)
            .expect("first successors form a strategy")
    }

    pub(crate) fn from_raw(owner: Owner, choice: Vec<Option<StateId>>) -> MemorylessStrategy {
        MemorylessStrategy { owner, choice }
    }

    pub fn owner(&self) -> Owner {
        self.owner
    }

    pub fn get(&self, q: StateId) -> Option<StateId> {
        self.choice.get(q.0).copied().flatten()
    }

    pub fn choices(&self) -> &[Option<StateId>] {
        &self.choice
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (StateId(i), c)))
    }

    pub fn check(&self, g: &Game) -> Result<(), StrategyError> {
        if self.choice.len() != g.num_states() {
            return Err(StrategyError::DomainMismatch(format!(
                "strategy covers {} states, game has {}",
                self.choice.len(),
                g.num_states()
            )));
        }
        for q in g.states() {
            match (g.owner(q) == self.owner, self.choice[q.0]) {
                (true, None) => {
                    return Err(StrategyError::DomainMismatch(format!(
                        "no choice at `{}`",
                        g.name(q)
                    )))
                }
                (false, Some(_)) => {
                    return Err(StrategyError::DomainMismatch(format!(
                        "choice at `{}`, which belongs to the other player",
                        g.name(q)
                    )))
                }
                (true, Some(d)) if g.weight(q, d).is_none() => {
                    return Err(StrategyError::DomainMismatch(format!(
                        "`{}` is not a successor of `{}`",
                        g.name(d),
                        g.name(q)
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Successor lists of `g` with this strategy's owner restricted to its
    /// choices.
    pub(crate) fn restricted_adj(&self, g: &Game) -> crate::arena::Adj {
        g.states()
            .map(|q| match self.choice[q.0] {
                Some(d) => vec![(d.0, g.weight(q, d).unwrap())],
                None => g.successors(q).iter().map(|&(d, w)| (d.0, w)).collect(),
            })
            .collect()
    }
}
