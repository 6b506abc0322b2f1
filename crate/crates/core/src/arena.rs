//! Index-local view of a game or of one of its subarenas, used by the
//! solvers so recursion does not have to rebuild named games.

use crate::game::{Game, Owner, StateId};

/// Successor lists with weights; the shape every graph routine works on.
pub(crate) type Adj = Vec<Vec<(usize, i64)>>;

#[derive(Clone, Debug)]
pub(crate) struct Arena {
    pub owner: Vec<Owner>,
    pub prio: Vec<u32>,
    pub succ: Adj,
    pub pred: Vec<Vec<usize>>,
    /// Total weight of the edges of each state that restriction removed.
    /// Only meaningful for penalty games, where leaving a subarena is paid
    /// for by blocking.
    pub dropped: Vec<i64>,
    /// Original id of each local state.
    pub orig: Vec<StateId>,
}

impl Arena {
    pub fn from_game(g: &Game) -> Arena {
        let succ: Adj = g
            .states()
            .map(|q| g.successors(q).iter().map(|&(d, w)| (d.0, w)).collect())
            .collect();
        Arena {
            owner: g.states().map(|q| g.owner(q)).collect(),
            prio: g.states().map(|q| g.priority(q)).collect(),
            pred: preds(&succ),
            succ,
            dropped: vec![0; g.num_states()],
            orig: g.states().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.owner.len()
    }

    /// Restriction to the states marked in `keep`, which must form a
    /// subarena. Returns the arena and the local-to-parent index map.
    pub fn restrict(&self, keep: &[bool]) -> (Arena, Vec<usize>) {
        let map: Vec<usize> = (0..self.n()).filter(|&q| keep[q]).collect();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &q) in map.iter().enumerate() {
            local[q] = i;
        }
        let mut succ = Vec::with_capacity(map.len());
        let mut dropped = Vec::with_capacity(map.len());
        for &q in &map {
            let mut out = Vec::new();
            let mut lost = self.dropped[q];
            for &(d, w) in &self.succ[q] {
                if keep[d] {
                    out.push((local[d], w));
                } else {
                    lost += w;
                }
            }
            debug_assert!(!out.is_empty(), "restriction to a non-subarena");
            succ.push(out);
            dropped.push(lost);
        }
        let arena = Arena {
            owner: map.iter().map(|&q| self.owner[q]).collect(),
            prio: map.iter().map(|&q| self.prio[q]).collect(),
            pred: preds(&succ),
            succ,
            dropped,
            orig: map.iter().map(|&q| self.orig[q]).collect(),
        };
        (arena, map)
    }

    /// Replaces the successor list of `q`, keeping predecessors in sync.
    pub fn set_successors(&mut self, q: usize, out: Vec<(usize, i64)>) {
        self.succ[q] = out;
        self.pred = preds(&self.succ);
    }

    pub fn min_priority(&self) -> Option<u32> {
        self.prio.iter().copied().min()
    }

    /// `max(1, max |w|)` over the arena's edges.
    pub fn max_abs_weight(&self) -> i64 {
        self.succ
            .iter()
            .flatten()
            .map(|&(_, w)| w.abs())
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

pub(crate) fn preds(succ: &Adj) -> Vec<Vec<usize>> {
    let mut pred = vec![Vec::new(); succ.len()];
    for (q, out) in succ.iter().enumerate() {
        for &(d, _) in out {
            pred[d].push(q);
        }
    }
    pred
}
