//! Least-credit progress measures for energy games.
//!
//! Once value iteration suggests candidate values, each player's optimal
//! strategy is read off an energy game in which every step earns the edge
//! weight minus the candidate value of its class, scaled to integers. A
//! player who can keep the running total bounded from below with finite
//! initial credit guarantees the candidate.

use std::collections::VecDeque;

/// Initial credit a player needs from a state; `None` when no finite
/// credit suffices.
pub(crate) type Credit = Option<i64>;

/// Credit needed before a step earning `reward` into a state that needs
/// `after`, or `None` past `top`.
pub(crate) fn need(after: Credit, reward: i64, top: i64) -> Credit {
    after.and_then(|x| {
        let c = (x - reward).max(0);
        (c <= top).then_some(c)
    })
}

/// Total order on credits with `None` largest.
pub(crate) fn key(c: Credit) -> i64 {
    c.unwrap_or(i64::MAX)
}

/// Least fixed point of `lift` above zero, by chaotic iteration over a
/// worklist. `None` when more than `budget` lifts were needed.
pub(crate) fn least_credits(
    pred: &[Vec<usize>],
    budget: u64,
    lift: impl Fn(usize, &[Credit]) -> Credit,
) -> Option<Vec<Credit>> {
    let n = pred.len();
    let mut f: Vec<Credit> = vec![Some(0); n];
    let mut queued = vec![true; n];
    let mut work: VecDeque<usize> = (0..n).collect();
    let mut spent = 0u64;
    while let Some(q) = work.pop_front() {
        queued[q] = false;
        let c = lift(q, &f);
        if key(c) <= key(f[q]) {
            continue;
        }
        spent += 1;
        if spent > budget {
            return None;
        }
        f[q] = c;
        for &p in &pred[q] {
            if !queued[p] && f[p].is_some() {
                queued[p] = true;
                work.push_back(p);
            }
        }
    }
    Some(f)
}
