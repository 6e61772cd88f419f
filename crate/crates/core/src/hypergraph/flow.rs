//! Directed flow networks, Dinic max-flow, and the two graph reductions of
//! the hypergraph cut objective.

use std::collections::VecDeque;

use serde::Serialize;

use super::{CutSolution, HyperError, Hypergraph, Result};

/// Residual capacities below this are treated as saturated.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: f64,
}

/// Network with a designated source and sink.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectedFlowGraph {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<Arc>,
}

impl DirectedFlowGraph {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source != sink && source < nodes && sink < nodes);
        Self {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    /// Append `count` fresh nodes and return the index of the first.
    pub fn add_nodes(&mut self, count: usize) -> usize {
        let first = self.nodes;
        self.nodes += count;
        first
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: f64) {
        assert!(capacity >= 0.0, "negative capacity");
        if capacity > 0.0 {
            self.arcs.push(Arc { from, to, capacity });
        }
    }

    /// Max-flow value and the source side of a minimum cut (nodes reachable in
    /// the final residual network).
    pub fn max_flow(&self) -> (f64, Vec<bool>) {
        let mut dinic = Dinic::new(self);
        let value = dinic.run(self.source, self.sink);
        let side = dinic.reachable(self.source);
        (value, side)
    }
}

struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    level: Vec<i64>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(g: &DirectedFlowGraph) -> Self {
        let mut d = Dinic {
            head: vec![Vec::new(); g.nodes],
            to: Vec::with_capacity(2 * g.arcs.len()),
            cap: Vec::with_capacity(2 * g.arcs.len()),
            level: vec![-1; g.nodes],
            next: vec![0; g.nodes],
        };
        for a in &g.arcs {
            d.head[a.from].push(d.to.len());
            d.to.push(a.to);
            d.cap.push(a.capacity);
            d.head[a.to].push(d.to.len());
            d.to.push(a.from);
            d.cap.push(0.0);
        }
        d
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.head[v] {
                let u = self.to[e];
                if self.cap[e] > EPS && self.level[u] < 0 {
                    self.level[u] = self.level[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: f64) -> f64 {
        if v == t {
            return pushed;
        }
        while self.next[v] < self.head[v].len() {
            let e = self.head[v][self.next[v]];
            let u = self.to[e];
            if self.cap[e] > EPS && self.level[u] == self.level[v] + 1 {
                let got = self.dfs(u, t, pushed.min(self.cap[e]));
                if got > 0.0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.next[v] += 1;
        }
        0.0
    }

    fn run(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|n| *n = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in &self.head[v] {
                let u = self.to[e];
                if self.cap[e] > EPS && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

fn solution_from(h: &Hypergraph, net: &DirectedFlowGraph) -> CutSolution {
    let (value, side) = net.max_flow();
    let side = (0..h.vertex_count()).filter(|&v| side[v]).collect();
    CutSolution { value, side }
}

/// Node pair per hyperedge: v → e′ and e″ → v infinite, e′ → e″ unit.
pub fn lawler_network(h: &Hypergraph) -> DirectedFlowGraph {
    let mut net = DirectedFlowGraph::new(h.vertex_count(), h.s(), h.t());
    let infinite = h.edges().len() as f64 + 1.0;
    for e in h.edges() {
        let first = net.add_nodes(2);
        for &v in e {
            net.add_arc(v, first, infinite);
            net.add_arc(first + 1, v, infinite);
        }
        net.add_arc(first, first + 1, 1.0);
    }
    net
}

/// Minimum cut with every w_i = 1 (i > 0).
pub fn lawler_min_cut(h: &Hypergraph) -> CutSolution {
    solution_from(h, &lawler_network(h))
}

/// Cardinality gadget with split penalty `a * min(i, b)` on one hyperedge:
/// auxiliary pair (e′, e″), arcs v → e′ and e″ → v of capacity `a`, and
/// e′ → e″ of capacity `a * b`.
pub fn add_cardinality_gadget(net: &mut DirectedFlowGraph, members: &[usize], a: f64, b: f64) {
    if a == 0.0 {
        return;
    }
    let first = net.add_nodes(2);
    for &v in members {
        net.add_arc(v, first, a);
        net.add_arc(first + 1, v, a);
    }
    net.add_arc(first, first + 1, a * b);
}

/// Coefficients (a₁, a₂) with a₁·min(i,1) + a₂·min(i,2) matching (w₁, w₂) = (1, w₂).
pub fn gadget_coefficients(w2: f64) -> Result<(f64, f64)> {
    if !(1.0..=2.0).contains(&w2) {
        return Err(HyperError::WeightOutOfRange(w2));
    }
    Ok((2.0 - w2, w2 - 1.0))
}

pub fn gadget_network(h: &Hypergraph, w2: f64) -> Result<DirectedFlowGraph> {
    h.require_uniform(4)?;
    let (a1, a2) = gadget_coefficients(w2)?;
    let mut net = DirectedFlowGraph::new(h.vertex_count(), h.s(), h.t());
    for e in h.edges() {
        add_cardinality_gadget(&mut net, e, a1, 1.0);
        add_cardinality_gadget(&mut net, e, a2, 2.0);
    }
    Ok(net)
}

/// Minimum cut of a 4-uniform hypergraph with w = (0, 1, w₂), 1 ≤ w₂ ≤ 2.
pub fn gadget_min_cut_4uniform(h: &Hypergraph, w2: f64) -> Result<CutSolution> {
    Ok(solution_from(h, &gadget_network(h, w2)?))
}
