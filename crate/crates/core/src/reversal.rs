//! Data-flow reversal under a persistent-memory budget.
//!
//! Execution model: the inputs X are always persistent and count toward the
//! budget. Values live in one of two places: the persistent store (bounded by
//! the budget) or the working set of the current sweep (unbounded, cleared by
//! every `adjoin`). The first sweep, before the first `adjoin`, must evaluate
//! every non-source vertex exactly once and is free; every later `evaluate`
//! costs 1. Adjoints run in strictly decreasing vertex order and need all
//! predecessor values of their vertex to be live.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elimination::LinearizedDag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReversalError {
    #[error("step {step}: persistent memory {used} exceeds budget {budget}")]
    MemoryExceeded { step: usize, used: usize, budget: usize },
    #[error("step {step}: value of vertex {vertex} is not live")]
    ValueNotLive { step: usize, vertex: usize },
    #[error("schedule ends with {remaining} adjoints outstanding")]
    IncompleteReversal { remaining: usize },
    #[error("step {step}: {reason}")]
    IllegalAction { step: usize, reason: String },
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("budget {budget} is below the {sources} always-persistent inputs")]
    Infeasible { budget: usize, sources: usize },
}

pub type Result<T> = std::result::Result<T, ReversalError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Evaluate(usize),
    Store(usize),
    Restore(usize),
    Adjoin(usize),
    Free(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReversalSchedule {
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub peak_persistent_memory: usize,
    pub computational_cost: usize,
}

/// Replay `schedule` on `dag` with persistent budget `memory`.
pub fn simulate_reversal(dag: &LinearizedDag, schedule: &ReversalSchedule, memory: usize) -> Result<CostReport> {
    let n = dag.n();
    let total = dag.vertex_count();
    if memory < n {
        return Err(ReversalError::MemoryExceeded {
            step: 0,
            used: n,
            budget: memory,
        });
    }
    let mut stored = vec![false; total];
    let mut working = vec![false; total];
    let mut primal_done = vec![false; total];
    let mut in_primal = true;
    let mut next_adjoin = total;
    let mut stored_count = 0;
    let mut peak = n;
    let mut cost = 0;
    let live = |v: usize, stored: &[bool], working: &[bool]| v < n || stored[v] || working[v];

    for (step, &action) in schedule.actions.iter().enumerate() {
        let v = match action {
            Action::Evaluate(v) | Action::Store(v) | Action::Restore(v) | Action::Adjoin(v) | Action::Free(v) => v,
        };
        if v >= total {
            return Err(ReversalError::IllegalAction {
                step,
                reason: format!("vertex {v} out of range"),
            });
        }
        if v < n {
            return Err(ReversalError::IllegalAction {
                step,
                reason: format!("vertex {v} is an input"),
            });
        }
        match action {
            Action::Evaluate(_) => {
                if let Some(&u) = dag.preds(v).iter().find(|&&u| !live(u, &stored, &working)) {
                    return Err(ReversalError::ValueNotLive { step, vertex: u });
                }
                working[v] = true;
                if in_primal && !primal_done[v] {
                    primal_done[v] = true;
                } else {
                    cost += 1;
                }
            }
            Action::Store(_) => {
                if !working[v] {
                    return Err(ReversalError::ValueNotLive { step, vertex: v });
                }
                if !stored[v] {
                    stored[v] = true;
                    stored_count += 1;
                    if n + stored_count > memory {
                        return Err(ReversalError::MemoryExceeded {
                            step,
                            used: n + stored_count,
                            budget: memory,
                        });
                    }
                    peak = peak.max(n + stored_count);
                }
            }
            Action::Restore(_) | Action::Free(_) => {
                if !stored[v] {
                    return Err(ReversalError::ValueNotLive { step, vertex: v });
                }
                stored[v] = false;
                stored_count -= 1;
                if matches!(action, Action::Restore(_)) {
                    working[v] = true;
                }
            }
            Action::Adjoin(_) => {
                if in_primal {
                    if let Some(u) = (n..total).find(|&u| !primal_done[u]) {
                        return Err(ReversalError::IllegalAction {
                            step,
                            reason: format!("first sweep never evaluated vertex {u}"),
                        });
                    }
                    in_primal = false;
                }
                if v + 1 != next_adjoin {
                    return Err(ReversalError::IllegalAction {
                        step,
                        reason: format!("adjoin of {v} out of order; expected {}", next_adjoin - 1),
                    });
                }
                if let Some(&u) = dag.preds(v).iter().find(|&&u| !live(u, &stored, &working)) {
                    return Err(ReversalError::ValueNotLive { step, vertex: u });
                }
                next_adjoin = v;
                working.iter_mut().for_each(|w| *w = false);
            }
        }
    }
    if next_adjoin > n {
        return Err(ReversalError::IncompleteReversal {
            remaining: next_adjoin - n,
        });
    }
    Ok(CostReport {
        peak_persistent_memory: peak,
        computational_cost: cost,
    })
}

/// Store every intermediate during the first sweep; no recomputation.
pub fn store_all_schedule(dag: &LinearizedDag) -> ReversalSchedule {
    let mut actions = Vec::new();
    for v in dag.n()..dag.vertex_count() {
        actions.push(Action::Evaluate(v));
        if dag.is_intermediate(v) {
            actions.push(Action::Store(v));
        }
    }
    actions.extend((dag.n()..dag.vertex_count()).rev().map(Action::Adjoin));
    ReversalSchedule { actions }
}

/// Non-source vertices needed to rebuild the predecessors of `v` from X, in
/// increasing order.
fn recompute_closure(dag: &LinearizedDag, v: usize) -> Vec<usize> {
    let mut need: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = dag.preds(v).iter().copied().filter(|&u| u >= dag.n()).collect();
    while let Some(u) = stack.pop() {
        if need.insert(u) {
            stack.extend(dag.preds(u).iter().copied().filter(|&w| w >= dag.n()));
        }
    }
    need.into_iter().collect()
}

/// Keep only the inputs; before each adjoint after the first, re-evaluate
/// everything it needs from X.
pub fn recompute_all_schedule(dag: &LinearizedDag) -> ReversalSchedule {
    let mut actions: Vec<Action> = (dag.n()..dag.vertex_count()).map(Action::Evaluate).collect();
    for (k, v) in (dag.n()..dag.vertex_count()).rev().enumerate() {
        if k > 0 {
            actions.extend(recompute_closure(dag, v).into_iter().map(Action::Evaluate));
        }
        actions.push(Action::Adjoin(v));
    }
    ReversalSchedule { actions }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Plan {
    Sweep,
    Split(usize),
}

/// Optimal checkpoint tables for a chain.
///
/// A segment of length `l` at base `a` (value x_a live) must deliver
/// x_{a+l-1}, …, x_a in that order. `T(l, c)` is its cost with `c` free slots;
/// `F(l, c)` is the same when the segment starts inside the first sweep, where
/// placing checkpoints costs nothing.
#[derive(Debug, Clone)]
pub struct RevolveTable {
    t: Vec<Vec<(usize, Plan)>>,
    f: Vec<Vec<(usize, Plan)>>,
}

impl RevolveTable {
    pub fn new(p: usize, c: usize) -> Self {
        let sweep = |l: usize| (l * l.saturating_sub(1) / 2, Plan::Sweep);
        let mut t = vec![vec![(0, Plan::Sweep); c + 1]; p + 1];
        let mut f = t.clone();
        for l in 0..=p {
            for k in 0..=c {
                t[l][k] = sweep(l);
                f[l][k] = sweep(l);
                if l <= 1 || k == 0 {
                    continue;
                }
                for j in 1..l {
                    let ct = j + t[l - j][k - 1].0 + t[j][k].0;
                    if ct < t[l][k].0 {
                        t[l][k] = (ct, Plan::Split(j));
                    }
                    let cf = f[l - j][k - 1].0 + t[j][k].0;
                    if cf < f[l][k].0 {
                        f[l][k] = (cf, Plan::Split(j));
                    }
                }
            }
        }
        Self { t, f }
    }

    /// Reversal cost of a chain with `p` intermediates and `c` checkpoint slots.
    pub fn cost(&self, p: usize, c: usize) -> usize {
        self.f[p][c].0
    }

    fn emit_t(&self, a: usize, l: usize, c: usize, out: &mut Vec<Action>) {
        if l == 0 {
            return;
        }
        match self.t[l][c].1 {
            Plan::Sweep => emit_sweep(a, l, out),
            Plan::Split(j) => {
                out.extend((a + 1..=a + j).map(Action::Evaluate));
                out.push(Action::Store(a + j));
                self.emit_t(a + j, l - j, c - 1, out);
                out.push(Action::Free(a + j));
                self.emit_t(a, j, c, out);
            }
        }
    }

    fn checkpoints_f(&self, a: usize, l: usize, c: usize, out: &mut Vec<usize>) {
        if let Plan::Split(j) = self.f[l][c].1 {
            out.push(a + j);
            self.checkpoints_f(a + j, l - j, c - 1, out);
        }
    }

    fn emit_f(&self, a: usize, l: usize, c: usize, out: &mut Vec<Action>) {
        if l == 0 {
            return;
        }
        match self.f[l][c].1 {
            Plan::Sweep => emit_sweep(a, l, out),
            Plan::Split(j) => {
                self.emit_f(a + j, l - j, c - 1, out);
                out.push(Action::Free(a + j));
                self.emit_t(a, j, c, out);
            }
        }
    }
}

/// Deliver x_{a+l-1}, …, x_a by re-evaluating from x_a each time. Delivering
/// x_v means running the adjoint of vertex v + 1.
fn emit_sweep(a: usize, l: usize, out: &mut Vec<Action>) {
    for k in (1..l).rev() {
        out.extend((a + 1..=a + k).map(Action::Evaluate));
        out.push(Action::Adjoin(a + k + 1));
    }
    out.push(Action::Adjoin(a + 1));
}

/// Checkpointed reversal of `LinearizedDag::chain(p)` with at most `c` stored
/// intermediates (persistent memory n + c).
pub fn chain_revolve(p: usize, c: usize) -> ReversalSchedule {
    let table = RevolveTable::new(p, c);
    let mut checkpoints = Vec::new();
    table.checkpoints_f(0, p, c, &mut checkpoints);
    let mut actions = Vec::new();
    for v in 1..=p + 1 {
        actions.push(Action::Evaluate(v));
        if checkpoints.contains(&v) {
            actions.push(Action::Store(v));
        }
    }
    // x_p is still in the working set for the sink's adjoint.
    actions.push(Action::Adjoin(p + 1));
    table.emit_f(0, p, c, &mut actions);
    ReversalSchedule { actions }
}

/// Optimal cost of [`chain_revolve`].
pub fn chain_revolve_cost(p: usize, c: usize) -> usize {
    RevolveTable::new(p, c).cost(p, c)
}

/// Caps for [`optimal_reversal_bruteforce`].
pub const BRUTE_FORCE_MAX_INTERMEDIATES: usize = 8;
pub const BRUTE_FORCE_MAX_SINKS: usize = 8;

/// Minimum-cost schedule under budget `memory`, by 0-1 shortest path over
/// (stored set, working set, adjoints done). Every choice of stores in the
/// first sweep is a start state.
pub fn optimal_reversal_bruteforce(dag: &LinearizedDag, memory: usize) -> Result<(ReversalSchedule, usize)> {
    let (n, p, m) = (dag.n(), dag.p(), dag.m());
    if p > BRUTE_FORCE_MAX_INTERMEDIATES || m > BRUTE_FORCE_MAX_SINKS {
        return Err(ReversalError::InstanceTooLarge(format!(
            "p = {p}, m = {m}; caps are {BRUTE_FORCE_MAX_INTERMEDIATES} and {BRUTE_FORCE_MAX_SINKS}"
        )));
    }
    if memory < n {
        return Err(ReversalError::Infeasible { budget: memory, sources: n });
    }
    let slots = (memory - n).min(p);
    let total = dag.vertex_count();
    let adjoins = p + m;
    let bit = |v: usize| 1usize << (v - n);
    let zmask = |set: &BTreeSet<usize>| {
        set.iter()
            .filter(|&&u| dag.is_intermediate(u))
            .fold(0usize, |acc, &u| acc | bit(u))
    };
    let pred_mask: Vec<usize> = (0..total).map(|v| zmask(dag.preds(v))).collect();
    let side = 1usize << p;
    let states = side * side * (adjoins + 1);
    let index = |stored: usize, work: usize, done: usize| (done * side + stored) * side + work;
    let unpack = |s: usize| (s / side % side, s % side, s / (side * side));

    let mut dist = vec![u32::MAX; states];
    let mut parent: Vec<(u32, Option<Action>)> = vec![(u32::MAX, None); states];
    let mut deque = VecDeque::new();
    let all = side - 1;
    for stored in 0..side {
        if (stored.count_ones() as usize) <= slots {
            let s = index(stored, all & !stored, 0);
            dist[s] = 0;
            deque.push_back(s);
        }
    }
    let mut goal = None;
    while let Some(s) = deque.pop_front() {
        let (stored, work, done) = unpack(s);
        let d = dist[s];
        if done == adjoins {
            goal = Some(s);
            break;
        }
        let live = stored | work;
        let mut relax = |next: usize, w: u32, action: Action, deque: &mut VecDeque<usize>| {
            if d + w < dist[next] {
                dist[next] = d + w;
                parent[next] = (s as u32, Some(action));
                if w == 0 {
                    deque.push_front(next);
                } else {
                    deque.push_back(next);
                }
            }
        };
        let v = total - 1 - done;
        if pred_mask[v] & !live == 0 {
            relax(index(stored, 0, done + 1), 0, Action::Adjoin(v), &mut deque);
        }
        for b in 0..p {
            let u = n + b;
            let ub = 1 << b;
            if live & ub == 0 && pred_mask[u] & !live == 0 {
                relax(index(stored, work | ub, done), 1, Action::Evaluate(u), &mut deque);
            }
            if work & ub != 0 && (stored.count_ones() as usize) < slots {
                relax(index(stored | ub, work & !ub, done), 0, Action::Store(u), &mut deque);
            }
            if stored & ub != 0 {
                relax(index(stored & !ub, work | ub, done), 0, Action::Restore(u), &mut deque);
                relax(index(stored & !ub, work, done), 0, Action::Free(u), &mut deque);
            }
        }
    }
    let goal = goal.expect("recompute-all is always feasible when memory >= n");
    let cost = dist[goal] as usize;
    let mut tail = Vec::new();
    let mut s = goal;
    while let (prev, Some(action)) = parent[s] {
        tail.push(action);
        s = prev as usize;
    }
    tail.reverse();
    let (first_stored, _, _) = unpack(s);
    let mut actions = Vec::new();
    for v in n..total {
        actions.push(Action::Evaluate(v));
        if dag.is_intermediate(v) && first_stored & bit(v) != 0 {
            actions.push(Action::Store(v));
        }
    }
    actions.extend(tail);
    Ok((ReversalSchedule { actions }, cost))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_all_chain() {
        let g = LinearizedDag::chain(3);
        let r = simulate_reversal(&g, &store_all_schedule(&g), 4).unwrap();
        assert_eq!(r, CostReport { peak_persistent_memory: 4, computational_cost: 0 });
        assert!(matches!(
            simulate_reversal(&g, &store_all_schedule(&g), 3),
            Err(ReversalError::MemoryExceeded { budget: 3, .. })
        ));
        let bare = LinearizedDag::chain(0);
        let r = simulate_reversal(&bare, &store_all_schedule(&bare), 1).unwrap();
        assert_eq!(r, CostReport { peak_persistent_memory: 1, computational_cost: 0 });
    }

    #[test]
    fn recompute_all_chain() {
        for (p, cost) in [(1, 0), (3, 3), (10, 45)] {
            let g = LinearizedDag::chain(p);
            let r = simulate_reversal(&g, &recompute_all_schedule(&g), 1).unwrap();
            assert_eq!(r.computational_cost, cost, "p = {p}");
            assert_eq!(r.peak_persistent_memory, 1);
        }
    }

    #[test]
    fn simulator_catches_dead_values_and_missing_adjoints() {
        let g = LinearizedDag::chain(2);
        let mut s = store_all_schedule(&g);
        s.actions.retain(|a| *a != Action::Store(1));
        assert!(matches!(
            simulate_reversal(&g, &s, 10),
            Err(ReversalError::ValueNotLive { vertex: 1, .. })
        ));
        let mut s = store_all_schedule(&g);
        s.actions.pop();
        assert_eq!(
            simulate_reversal(&g, &s, 10),
            Err(ReversalError::IncompleteReversal { remaining: 1 })
        );
        let s = ReversalSchedule {
            actions: vec![Action::Evaluate(1), Action::Evaluate(2), Action::Evaluate(3), Action::Adjoin(2)],
        };
        assert!(matches!(simulate_reversal(&g, &s, 10), Err(ReversalError::IllegalAction { .. })));
    }

    #[test]
    fn revolve_small_cases() {
        assert_eq!(chain_revolve_cost(3, 1), 1);
        assert_eq!(chain_revolve_cost(3, 2), 0);
        assert_eq!(chain_revolve_cost(5, 0), 10);
        for (p, c) in [(3, 1), (10, 2), (7, 3), (4, 4)] {
            let g = LinearizedDag::chain(p);
            let r = simulate_reversal(&g, &chain_revolve(p, c), 1 + c).unwrap();
            assert_eq!(r.computational_cost, chain_revolve_cost(p, c));
            assert!(r.peak_persistent_memory <= 1 + c);
        }
    }

    #[test]
    fn brute_force_small_chains() {
        let g = LinearizedDag::chain(3);
        assert_eq!(optimal_reversal_bruteforce(&g, 4).unwrap().1, 0);
        let (s, cost) = optimal_reversal_bruteforce(&g, 1).unwrap();
        assert_eq!(cost, 3);
        assert_eq!(simulate_reversal(&g, &s, 1).unwrap().computational_cost, 3);
        let g5 = LinearizedDag::chain(5);
        assert_eq!(optimal_reversal_bruteforce(&g5, 2).unwrap().1, chain_revolve_cost(5, 1));
        assert_eq!(
            optimal_reversal_bruteforce(&g, 0),
            Err(ReversalError::Infeasible { budget: 0, sources: 1 })
        );
        assert!(matches!(
            optimal_reversal_bruteforce(&LinearizedDag::chain(9), 3),
            Err(ReversalError::InstanceTooLarge(_))
        ));
    }
}
