//! Game graphs: states with owners and priorities, weighted edges, the text
//! file format and restriction to subarenas.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::set::StateSet;

/// Dense state index; `0..n` in declaration order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Owner {
    P1,
    P2,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::P1 => Owner::P2,
            Owner::P2 => Owner::P1,
        }
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::P1 => f.write_str("1"),
            Owner::P2 => f.write_str("2"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GameKind {
    MeanPayoffParity,
    MeanPenaltyParity,
}

impl GameKind {
    pub fn keyword(self) -> &'static str {
        match self {
            GameKind::MeanPayoffParity => "mean-payoff-parity",
            GameKind::MeanPenaltyParity => "mean-penalty-parity",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub src: StateId,
    pub dst: StateId,
    pub weight: i64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: edge endpoint `{name}` is not a declared state")]
    DanglingEndpoint { line: usize, name: String },
    #[error("state without successor: `{0}`")]
    NoSuccessor(String),
    #[error("negative weight {weight} on edge `{src}` -> `{dst}` in a mean-penalty game")]
    NegativeWeight { src: String, dst: String, weight: i64 },
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("invalid state name `{0}`")]
    InvalidName(String),
    #[error("state index {0} out of range")]
    UnknownState(usize),
    #[error("state set is not a subarena: `{0}` has no successor inside it")]
    NotASubarena(String),
}

/// A weighted two-player game graph with a priority per state.
///
/// Immutable once built. Successor lists keep edge declaration order, which
/// every algorithm in the crate uses for tie-breaking.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Game {
    kind: GameKind,
    names: Vec<String>,
    owners: Vec<Owner>,
    priorities: Vec<u32>,
    edges: Vec<Edge>,
    succ: Vec<Vec<(StateId, i64)>>,
    pred: Vec<Vec<StateId>>,
    index: HashMap<String, StateId>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GameStats {
    /// `max(1, max |w(e)|)`.
    pub max_weight: i64,
    /// Maximal out-degree.
    pub max_degree: usize,
    /// Number of distinct priorities.
    pub priority_count: usize,
    /// `|V| + |E| * ceil(log2 W)`.
    pub size: usize,
}

/// Incremental construction of a [`Game`]; validation happens in
/// [`GameBuilder::build`].
#[derive(Clone, Debug)]
pub struct GameBuilder {
    kind: GameKind,
    names: Vec<String>,
    owners: Vec<Owner>,
    priorities: Vec<u32>,
    edges: Vec<Edge>,
}

impl GameBuilder {
    pub fn new(kind: GameKind) -> GameBuilder {
        GameBuilder {
            kind,
            names: Vec::new(),
            owners: Vec::new(),
            priorities: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn state(&mut self, name: impl Into<String>, owner: Owner, priority: u32) -> StateId {
        self.names.push(name.into());
        self.owners.push(owner);
        self.priorities.push(priority);
        StateId(self.names.len() - 1)
    }

    pub fn edge(&mut self, src: StateId, dst: StateId, weight: i64) -> &mut GameBuilder {
        self.edges.push(Edge { src, dst, weight });
        self
    }

    pub fn build(self) -> Result<Game, GameError> {
        Game::new(self.kind, self.names, self.owners, self.priorities, self.edges)
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains('#') && !name.chars().any(char::is_whitespace)
}

impl Game {
    pub fn new(
        kind: GameKind,
        names: Vec<String>,
        owners: Vec<Owner>,
        priorities: Vec<u32>,
        edges: Vec<Edge>,
    ) -> Result<Game, GameError> {
        let n = names.len();
        assert!(owners.len() == n && priorities.len() == n);
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(GameError::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), StateId(i)).is_some() {
                return Err(GameError::DuplicateState(name.clone()));
            }
        }
        let mut succ: Vec<Vec<(StateId, i64)>> = vec![Vec::new(); n];
        let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for e in &edges {
            for end in [e.src, e.dst] {
                if end.0 >= n {
                    return Err(GameError::UnknownState(end.0));
                }
            }
            if succ[e.src.0].iter().any(|&(d, _)| d == e.dst) {
                return Err(GameError::DuplicateEdge(
                    names[e.src.0].clone(),
                    names[e.dst.0].clone(),
                ));
            }
            if kind == GameKind::MeanPenaltyParity && e.weight < 0 {
                return Err(GameError::NegativeWeight {
                    src: names[e.src.0].clone(),
                    dst: names[e.dst.0].clone(),
                    weight: e.weight,
                });
            }
            succ[e.src.0].push((e.dst, e.weight));
            pred[e.dst.0].push(e.src);
        }
        if let Some(q) = succ.iter().position(Vec::is_empty) {
            return Err(GameError::NoSuccessor(names[q].clone()));
        }
        Ok(Game {
            kind,
            names,
            owners,
            priorities,
            edges,
            succ,
            pred,
            index,
        })
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states()).map(StateId)
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q.0]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn owner(&self, q: StateId) -> Owner {
        self.owners[q.0]
    }

    pub fn priority(&self, q: StateId) -> u32 {
        self.priorities[q.0]
    }

    /// Successors with edge weights, in declaration order.
    pub fn successors(&self, q: StateId) -> &[(StateId, i64)] {
        &self.succ[q.0]
    }

    pub fn predecessors(&self, q: StateId) -> &[StateId] {
        &self.pred[q.0]
    }

    pub fn weight(&self, src: StateId, dst: StateId) -> Option<i64> {
        self.succ[src.0]
            .iter()
            .find(|&&(d, _)| d == dst)
            .map(|&(_, w)| w)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn states_of(&self, owner: Owner) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(move |&q| self.owner(q) == owner)
    }

    pub fn max_priority(&self) -> u32 {
        self.priorities.iter().copied().max().unwrap_or(0)
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.num_states())
    }

    /// Same graph with every weight replaced by `f(weight)`.
    pub fn map_weights(&self, f: impl Fn(i64) -> i64) -> Result<Game, GameError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                weight: f(e.weight),
                ..*e
            })
            .collect();
        Game::new(
            self.kind,
            self.names.clone(),
            self.owners.clone(),
            self.priorities.clone(),
            edges,
        )
    }

    pub fn with_kind(&self, kind: GameKind) -> Result<Game, GameError> {
        Game::new(
            kind,
            self.names.clone(),
            self.owners.clone(),
            self.priorities.clone(),
            self.edges.clone(),
        )
    }

    pub fn stats(&self) -> GameStats {
        game_stats(self)
    }
}

pub fn game_stats(g: &Game) -> GameStats {
    let max_weight = g
        .edges
        .iter()
        .map(|e| e.weight.abs())
        .max()
        .unwrap_or(0)
        .max(1);
    let max_degree = g.succ.iter().map(Vec::len).max().unwrap_or(0);
    let mut prios = g.priorities.clone();
    prios.sort_unstable();
    prios.dedup();
    // ceil(log2 W) for W >= 1
    let bits = (64 - (max_weight as u64 - 1).leading_zeros()) as usize;
    GameStats {
        max_weight,
        max_degree,
        priority_count: prios.len(),
        size: g.num_states() + g.num_edges() * bits,
    }
}

/// Restriction of `g` to the subarena `s`; states keep their relative order.
pub fn restrict(g: &Game, s: &StateSet) -> Result<Game, GameError> {
    restrict_with_map(g, s).map(|(h, _)| h)
}

/// As [`restrict`], also returning the original id of every new state.
pub fn restrict_with_map(g: &Game, s: &StateSet) -> Result<(Game, Vec<StateId>), GameError> {
    let kept: Vec<StateId> = s.iter().collect();
    let mut local = vec![usize::MAX; g.num_states()];
    for (i, q) in kept.iter().enumerate() {
        local[q.0] = i;
    }
    for &q in &kept {
        if !g.successors(q).iter().any(|(d, _)| s.contains(*d)) {
            return Err(GameError::NotASubarena(g.name(q).to_string()));
        }
    }
    let edges = g
        .edges
        .iter()
        .filter(|e| s.contains(e.src) && s.contains(e.dst))
        .map(|e| Edge {
            src: StateId(local[e.src.0]),
            dst: StateId(local[e.dst.0]),
            weight: e.weight,
        })
        .collect();
    let h = Game::new(
        g.kind,
        kept.iter().map(|&q| g.names[q.0].clone()).collect(),
        kept.iter().map(|&q| g.owners[q.0]).collect(),
        kept.iter().map(|&q| g.priorities[q.0]).collect(),
        edges,
    )?;
    Ok((h, kept))
}

const HEADER: &str = "mppg v1";

pub fn parse_game(text: &str) -> Result<Game, GameError> {
    let mut kind = None;
    let mut seen_header = false;
    let mut names = Vec::new();
    let mut owners = Vec::new();
    let mut priorities = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut raw_edges: Vec<(usize, String, String, i64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: String| GameError::Syntax { line: line_no, msg };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !seen_header {
            if tokens != ["mppg", "v1"] {
                return Err(syntax(format!("expected header `{HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        if kind.is_none() {
            kind = match tokens.as_slice() {
                ["kind", "mean-payoff-parity"] => Some(GameKind::MeanPayoffParity),
                ["kind", "mean-penalty-parity"] => Some(GameKind::MeanPenaltyParity),
                _ => {
                    return Err(syntax(
                        "expected `kind mean-payoff-parity` or `kind mean-penalty-parity`".into(),
                    ))
                }
            };
            continue;
        }
        match tokens[0] {
            "state" => {
                if tokens.len() != 4 {
                    return Err(syntax(
                        "expected `state <name> owner=<1|2> priority=<uint>`".into(),
                    ));
                }
                let name = tokens[1];
                let mut owner = None;
                let mut priority = None;
                for kv in &tokens[2..] {
                    match kv.split_once('=') {
                        Some(("owner", "1")) => owner = Some(Owner::P1),
                        Some(("owner", "2")) => owner = Some(Owner::P2),
                        Some(("priority", p)) => {
                            priority = Some(p.parse::<u32>().map_err(|_| {
                                syntax(format!("invalid priority `{p}`"))
                            })?)
                        }
                        _ => return Err(syntax(format!("unexpected attribute `{kv}`"))),
                    }
                }
                let (Some(owner), Some(priority)) = (owner, priority) else {
                    return Err(syntax("state needs both owner= and priority=".into()));
                };
                if index.insert(name.to_string(), names.len()).is_some() {
                    return Err(GameError::DuplicateState(name.to_string()));
                }
                names.push(name.to_string());
                owners.push(owner);
                priorities.push(priority);
            }
            "edge" => {
                let weight = match tokens.as_slice() {
                    [_, _, _, w] => w
                        .strip_prefix("weight=")
                        .and_then(|w| w.parse::<i64>().ok())
                        .ok_or_else(|| syntax(format!("invalid weight `{w}`")))?,
                    _ => return Err(syntax("expected `edge <src> <dst> weight=<int>`".into())),
                };
                raw_edges.push((line_no, tokens[1].to_string(), tokens[2].to_string(), weight));
            }
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    let kind = match (seen_header, kind) {
        (true, Some(k)) => k,
        (false, _) => {
            return Err(GameError::Syntax {
                line: 1,
                msg: format!("expected header `{HEADER}`"),
            })
        }
        (true, None) => {
            return Err(GameError::Syntax {
                line: 2,
                msg: "missing `kind` line".into(),
            })
        }
    };
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (line, src, dst, weight) in raw_edges {
        let lookup = |name: &str| {
            index
                .get(name)
                .map(|&i| StateId(i))
                .ok_or_else(|| GameError::DanglingEndpoint {
                    line,
                    name: name.to_string(),
                })
        };
        edges.push(Edge {
            src: lookup(&src)?,
            dst: lookup(&dst)?,
            weight,
        });
    }
    Game::new(kind, names, owners, priorities, edges)
}

pub fn serialize_game(g: &Game) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "kind {}", g.kind.keyword()).unwrap();
    for q in g.states() {
        writeln!(
            out,
            "state {} owner={} priority={}",
            g.name(q),
            g.owner(q),
            g.priority(q)
        )
        .unwrap();
    }
    for e in &g.edges {
        writeln!(
            out,
            "edge {} {} weight={}",
            g.name(e.src),
            g.name(e.dst),
            e.weight
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DELAY: &str = "mppg v1
kind mean-payoff-parity
state q1 owner=1 priority=1
state q2 owner=1 priority=0
edge q1 q1 weight=1
edge q1 q2 weight=0
edge q2 q1 weight=0
";

    #[test]
    fn parse_delay() {
        let g = parse_game(DELAY).unwrap();
        assert_eq!(g.num_states(), 2);
        assert_eq!(g.num_edges(), 3);
        let s = g.stats();
        assert_eq!((s.max_weight, s.max_degree, s.priority_count), (1, 2, 2));
        assert_eq!(serialize_game(&g), DELAY);
    }

    #[test]
    fn no_successor() {
        let err = parse_game("mppg v1\nkind mean-payoff-parity\nstate a owner=1 priority=0\n")
            .unwrap_err();
        assert!(err.to_string().contains("state without successor"));
    }

    #[test]
    fn negative_penalty_weight() {
        let text = "mppg v1\nkind mean-penalty-parity\nstate a owner=1 priority=0\nedge a a weight=-1\n";
        assert!(parse_game(text)
            .unwrap_err()
            .to_string()
            .contains("negative weight"));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_game("mppg v2\n"),
            Err(GameError::Syntax { line: 1, .. })
        ));
        let dangling = "mppg v1\nkind mean-payoff-parity\nstate a owner=1 priority=0\nedge a b weight=0\n";
        assert!(matches!(
            parse_game(dangling),
            Err(GameError::DanglingEndpoint { line: 4, .. })
        ));
        let dup = "mppg v1\nkind mean-payoff-parity\nstate a owner=1 priority=0\nedge a a weight=0\nedge a a weight=1\n";
        assert!(matches!(parse_game(dup), Err(GameError::DuplicateEdge(..))));
        let dup_state = "mppg v1\nkind mean-payoff-parity\nstate a owner=1 priority=0\nstate a owner=2 priority=0\n";
        assert!(matches!(
            parse_game(dup_state),
            Err(GameError::DuplicateState(_))
        ));
        let bad_owner = "mppg v1\nkind mean-payoff-parity\nstate a owner=3 priority=0\n";
        assert!(matches!(
            parse_game(bad_owner),
            Err(GameError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a game\nmppg v1\n\nkind mean-payoff-parity # payoff\nstate a owner=2 priority=4\nedge a a weight=-3 # loop\n";
        let g = parse_game(text).unwrap();
        assert_eq!(g.owner(StateId(0)), Owner::P2);
        assert_eq!(g.priority(StateId(0)), 4);
        assert_eq!(g.weight(StateId(0), StateId(0)), Some(-3));
    }

    #[test]
    fn restrict_delay() {
        let g = parse_game(DELAY).unwrap();
        assert_eq!(restrict(&g, &g.all_states()).unwrap(), g);
        let q1 = StateSet::from_ids(2, [StateId(0)]);
        let h = restrict(&g, &q1).unwrap();
        assert_eq!(h.num_states(), 1);
        assert_eq!(h.successors(StateId(0)), &[(StateId(0), 1)]);
        let q2 = StateSet::from_ids(2, [StateId(1)]);
        assert!(matches!(
            restrict(&g, &q2),
            Err(GameError::NotASubarena(_))
        ));
    }

    #[test]
    fn stats_formula() {
        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let a = b.state("a", Owner::P1, 0);
        b.edge(a, a, -8);
        let s = b.build().unwrap().stats();
        assert_eq!((s.max_weight, s.size), (8, 4));

        let mut b = GameBuilder::new(GameKind::MeanPayoffParity);
        let a = b.state("a", Owner::P1, 0);
        b.edge(a, a, 0);
        assert_eq!(b.build().unwrap().stats().max_weight, 1);
    }
}
