//! Attractors, traps, strongly connected components and mean cycles.

use std::collections::VecDeque;

use thiserror::Error;

use crate::arena::{Adj, Arena};
use crate::game::{Game, Owner, StateId};
use crate::set::StateSet;
use crate::value::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("component has no edge, so it contains no cycle")]
    NoCycle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractorResult {
    pub set: StateSet,
    /// Attractor strategy, defined on the attracting player's states in
    /// `set` minus the target.
    pub strategy: Vec<Option<StateId>>,
    /// Level at which each state entered the attractor (0 for the target).
    pub rank: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scc {
    /// Members in increasing index order.
    pub members: Vec<StateId>,
    /// False only for a single state without a self-loop.
    pub has_edge: bool,
}

pub fn attractor(g: &Game, player: Owner, target: &StateSet) -> AttractorResult {
    let a = Arena::from_game(g);
    let r = attractor_in(&a, player, target.bits());
    AttractorResult {
        set: StateSet::from_bits(r.set),
        strategy: r
            .strategy
            .into_iter()
            .map(|s| s.map(StateId))
            .collect(),
        rank: r.rank,
    }
}

/// Is `s` a trap for `player`, i.e. a subarena the opponent can keep the
/// play in? A 2-trap is `is_trap(g, Owner::P2, s)`.
pub fn is_trap(g: &Game, player: Owner, s: &StateSet) -> bool {
    s.iter().all(|q| {
        let mut inside = g.successors(q).iter().map(|&(d, _)| s.contains(d));
        if g.owner(q) == player {
            inside.all(|b| b)
        } else {
            inside.any(|b| b)
        }
    })
}

pub fn is_subarena(g: &Game, s: &StateSet) -> bool {
    s.iter()
        .all(|q| g.successors(q).iter().any(|&(d, _)| s.contains(d)))
}

/// Maximal SCCs of the subgraph induced by `s`, in reverse topological
/// order (every component comes after all components it can reach).
pub fn scc_decompose(g: &Game, s: &StateSet) -> Vec<Scc> {
    let a = Arena::from_game(g);
    tarjan(&a.succ, Some(s.bits()))
        .into_iter()
        .map(|members| Scc {
            has_edge: has_edge(&a.succ, &members),
            members: members.into_iter().map(StateId).collect(),
        })
        .collect()
}

pub fn max_mean_cycle(g: &Game, scc: &Scc) -> Result<Rat, GraphError> {
    if !scc.has_edge {
        return Err(GraphError::NoCycle);
    }
    let a = Arena::from_game(g);
    let members: Vec<usize> = scc.members.iter().map(|q| q.0).collect();
    Ok(karp(&a.succ, &members, true))
}

pub fn min_mean_cycle(g: &Game, scc: &Scc) -> Result<Rat, GraphError> {
    if !scc.has_edge {
        return Err(GraphError::NoCycle);
    }
    let a = Arena::from_game(g);
    let members: Vec<usize> = scc.members.iter().map(|q| q.0).collect();
    Ok(karp(&a.succ, &members, false))
}

pub(crate) struct Attr {
    pub set: Vec<bool>,
    pub strategy: Vec<Option<usize>>,
    pub rank: Vec<Option<usize>>,
}

pub(crate) fn attractor_in(a: &Arena, player: Owner, target: &[bool]) -> Attr {
    let n = a.n();
    let mut set = target.to_vec();
    let mut rank: Vec<Option<usize>> = target.iter().map(|&t| t.then_some(0)).collect();
    let mut strategy = vec![None; n];
    let mut count: Vec<usize> = a.succ.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| target[q]).collect();
    while let Some(q) = queue.pop_front() {
        let r = rank[q].unwrap() + 1;
        for &p in &a.pred[q] {
            if set[p] {
                continue;
            }
            if a.owner[p] == player {
                strategy[p] = Some(q);
            } else {
                count[p] -= 1;
                if count[p] > 0 {
                    continue;
                }
            }
            set[p] = true;
            rank[p] = Some(r);
            queue.push_back(p);
        }
    }
    Attr {
        set,
        strategy,
        rank,
    }
}

/// Attractor set only.
pub(crate) fn attr_set(a: &Arena, player: Owner, target: &[bool]) -> Vec<bool> {
    attractor_in(a, player, target).set
}

/// Iterative Tarjan over the nodes marked in `within` (all when `None`).
/// Components come out in reverse topological order, members sorted.
pub(crate) fn tarjan(succ: &Adj, within: Option<&[bool]>) -> Vec<Vec<usize>> {
    let n = succ.len();
    let inside = |q: usize| within.is_none_or(|w| w[q]);
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut calls: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    let mut out = Vec::new();

    for root in 0..n {
        if !inside(root) || index[root] != UNSEEN {
            continue;
        }
        calls.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            if let Some(&(w, _)) = succ[v].get(*pos) {
                *pos += 1;
                if !inside(w) {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

pub(crate) fn has_edge(succ: &Adj, members: &[usize]) -> bool {
    members.len() > 1 || succ[members[0]].iter().any(|&(d, _)| d == members[0])
}

/// Karp's characterisation of the extreme cycle mean of a strongly
/// connected component with at least one edge, in exact arithmetic.
/// Walks start at the lowest-index member.
pub(crate) fn karp(succ: &Adj, members: &[usize], maximize: bool) -> Rat {
    let m = members.len();
    let sign = if maximize { 1 } else { -1 };
    let mut local = std::collections::HashMap::with_capacity(m);
    for (i, &q) in members.iter().enumerate() {
        local.insert(q, i);
    }
    let edges: Vec<(usize, usize, i64)> = members
        .iter()
        .enumerate()
        .flat_map(|(i, &q)| {
            succ[q]
                .iter()
                .filter_map(|(d, w)| local.get(d).map(|&j| (i, j, sign * w)))
                .collect::<Vec<_>>()
        })
        .collect();
    // d[j][v]: heaviest walk of exactly j edges from the source to v
    let mut d: Vec<Vec<Option<i64>>> = vec![vec![None; m]; m + 1];
    d[0][0] = Some(0);
    for j in 1..=m {
        for &(u, v, w) in &edges {
            if let Some(du) = d[j - 1][u] {
                let cand = du + w;
                if d[j][v].is_none_or(|dv| cand > dv) {
                    d[j][v] = Some(cand);
                }
            }
        }
    }
    let mut best: Option<Rat> = None;
    for v in 0..m {
        let Some(dn) = d[m][v] else { continue };
        let worst = (0..m)
            .filter_map(|j| d[j][v].map(|dj| Rat::new(dn - dj, (m - j) as i64)))
            .min()
            .expect("a length-m walk to v implies a shorter one from the source");
        if best.is_none_or(|b| worst > b) {
            best = Some(worst);
        }
    }
    let mu = best.expect("strongly connected component with an edge has a cycle");
    if maximize {
        mu
    } else {
        -mu
    }
}

/// Per node, the best per-component value over all components reachable
/// from it; `comps` must be in reverse topological order.
pub(crate) fn propagate<T: Copy>(
    succ: &Adj,
    comps: &[Vec<usize>],
    own: &[Option<T>],
    pick: impl Fn(T, T) -> T,
) -> Vec<Option<T>> {
    let n = succ.len();
    let mut comp_of = vec![usize::MAX; n];
    for (c, members) in comps.iter().enumerate() {
        for &q in members {
            comp_of[q] = c;
        }
    }
    let mut best: Vec<Option<T>> = own.to_vec();
    for (c, members) in comps.iter().enumerate() {
        let mut acc = best[c];
        for &q in members {
            for &(d, _) in &succ[q] {
                let dc = comp_of[d];
                if dc == usize::MAX || dc == c {
                    continue;
                }
                debug_assert!(dc < c);
                if let Some(v) = best[dc] {
                    acc = Some(acc.map_or(v, |a| pick(a, v)));
                }
            }
        }
        best[c] = acc;
    }
    let mut out = vec![None; n];
    for q in 0..n {
        if comp_of[q] != usize::MAX {
            out[q] = best[comp_of[q]];
        }
    }
    out
}

/// For every node, the maximum (or minimum) cycle mean over the cycles
/// reachable from it. Every node must have a successor, so the result is
/// total.
pub(crate) fn reachable_cycle_mean(succ: &Adj, maximize: bool) -> Vec<Rat> {
    let comps = tarjan(succ, None);
    let own: Vec<Option<Rat>> = comps
        .iter()
        .map(|c| has_edge(succ, c).then(|| karp(succ, c, maximize)))
        .collect();
    let pick = |a: Rat, b: Rat| if maximize { a.max(b) } else { a.min(b) };
    propagate(succ, &comps, &own, pick)
        .into_iter()
        .map(|v| v.expect("every node reaches a cycle"))
        .collect()
}
