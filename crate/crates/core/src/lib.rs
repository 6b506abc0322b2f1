//! Exact solvers for mean-payoff parity and mean-penalty parity games.

mod arena;
mod energy;
pub mod certificates;
pub mod game;
pub mod gen;
pub mod graph;
pub mod io;
pub mod mp;
pub mod mpp;
pub mod oracle;
pub mod penalty;
pub mod play;
pub mod set;
pub mod strategy;
pub mod value;

pub use game::{
    game_stats, parse_game, restrict, restrict_with_map, serialize_game, Edge, Game, GameBuilder,
    GameError, GameKind, GameStats, Owner, StateId,
};
pub use set::StateSet;
pub use strategy::{MemorylessStrategy, StrategyError};
pub use value::{Rat, Value, ValueFunction};
