//! Linearized DAGs with front/back edge elimination, vertex elimination and
//! exhaustive sequence search.
//!
//! Vertices are 0-based: sources `0..n`, intermediates `n..n+p`, sinks
//! `n+p..n+p+m`. The JSON form uses 1-based numbering by default.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElimError {
    #[error("invalid dag: {0}")]
    InvalidDag(String),
    #[error("step not eliminatable: {0}")]
    NotEliminatable(String),
    #[error("step {index} is illegal: {reason}")]
    IllegalStep { index: usize, reason: String },
    #[error("arc ({0}, {1}) has no label")]
    MissingLabel(usize, usize),
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
}

pub type Result<T> = std::result::Result<T, ElimError>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedDag {
    n: usize,
    p: usize,
    m: usize,
    arcs: BTreeMap<(usize, usize), Option<f64>>,
    preds: Vec<BTreeSet<usize>>,
    succs: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EliminationStep {
    Front { i: usize, j: usize },
    Back { i: usize, j: usize },
    Vertex { j: usize },
}

impl LinearizedDag {
    pub fn new(n: usize, p: usize, m: usize, arcs: Vec<(usize, usize, Option<f64>)>) -> Result<Self> {
        let total = n + p + m;
        let mut dag = Self {
            n,
            p,
            m,
            arcs: BTreeMap::new(),
            preds: vec![BTreeSet::new(); total],
            succs: vec![BTreeSet::new(); total],
            alive: vec![true; total],
        };
        for (i, j, label) in arcs {
            if j >= total {
                return Err(ElimError::InvalidDag(format!("arc ({i}, {j}) leaves the vertex range 0..{total}")));
            }
            if i >= j {
                return Err(ElimError::InvalidDag(format!("arc ({i}, {j}) is not forward (need i < j)")));
            }
            if dag.is_source(j) {
                return Err(ElimError::InvalidDag(format!("arc ({i}, {j}) enters source {j}")));
            }
            if dag.is_sink(i) {
                return Err(ElimError::InvalidDag(format!("arc ({i}, {j}) leaves sink {i}")));
            }
            if let Some(x) = label {
                if !x.is_finite() {
                    return Err(ElimError::InvalidDag(format!("arc ({i}, {j}) has label {x}")));
                }
            }
            if dag.arcs.insert((i, j), label).is_some() {
                return Err(ElimError::InvalidDag(format!("duplicate arc ({i}, {j})")));
            }
            dag.succs[i].insert(j);
            dag.preds[j].insert(i);
        }
        for z in n..n + p {
            if dag.preds[z].is_empty() || dag.succs[z].is_empty() {
                return Err(ElimError::InvalidDag(format!(
                    "intermediate {z} needs at least one predecessor and one successor"
                )));
            }
        }
        Ok(dag)
    }

    /// x → z₁ → … → z_p → y.
    pub fn chain(p: usize) -> Self {
        Self::new(1, p, 1, (0..=p).map(|i| (i, i + 1, None)).collect()).expect("chain is valid")
    }

    /// Random dag in which every intermediate has a predecessor and a
    /// successor. Labels, when requested, are uniform on [-2, 2].
    pub fn random(n: usize, p: usize, m: usize, density: f64, labeled: bool, seed: u64) -> Result<Self> {
        if p > 0 && (n == 0 || m == 0) {
            return Err(ElimError::InvalidDag("intermediates need at least one source and one sink".into()));
        }
        if !(0.0..=1.0).contains(&density) {
            return Err(ElimError::InvalidDag(format!("density {density} not in [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = n + p + m;
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for i in 0..n + p {
            for j in (i + 1).max(n)..total {
                if rng.random_bool(density) {
                    pairs.insert((i, j));
                }
            }
        }
        for z in n..n + p {
            if !pairs.iter().any(|&(_, j)| j == z) {
                pairs.insert((rng.random_range(0..z), z));
            }
            if !pairs.iter().any(|&(i, _)| i == z) {
                pairs.insert((z, rng.random_range(z + 1..total)));
            }
        }
        let arcs = pairs
            .into_iter()
            .map(|(i, j)| (i, j, labeled.then(|| rng.random_range(-2.0..=2.0))))
            .collect();
        Self::new(n, p, m, arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.n + self.p + self.m
    }

    pub fn is_source(&self, v: usize) -> bool {
        v < self.n
    }

    pub fn is_intermediate(&self, v: usize) -> bool {
        v >= self.n && v < self.n + self.p
    }

    pub fn is_sink(&self, v: usize) -> bool {
        v >= self.n + self.p
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn preds(&self, v: usize) -> &BTreeSet<usize> {
        &self.preds[v]
    }

    pub fn succs(&self, v: usize) -> &BTreeSet<usize> {
        &self.succs[v]
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.contains_key(&(i, j))
    }

    pub fn label(&self, i: usize, j: usize) -> Option<f64> {
        self.arcs.get(&(i, j)).copied().flatten()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, Option<f64>)> + '_ {
        self.arcs.iter().map(|(&(i, j), &l)| (i, j, l))
    }

    pub fn arc_set(&self) -> BTreeSet<(usize, usize)> {
        self.arcs.keys().copied().collect()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_labeled(&self) -> bool {
        self.arcs.values().all(Option::is_some)
    }

    pub fn alive_intermediates(&self) -> Vec<usize> {
        (self.n..self.n + self.p).filter(|&z| self.alive[z]).collect()
    }

    /// No intermediates left: every arc runs from X to Y.
    pub fn is_bipartite(&self) -> bool {
        self.alive_intermediates().is_empty()
    }

    /// Same dag with arcs reversed and vertices renumbered v ↦ N-1-v, so that
    /// sinks become sources.
    pub fn mirror(&self) -> Self {
        let last = self.vertex_count() - 1;
        let mut out = Self {
            n: self.m,
            p: self.p,
            m: self.n,
            arcs: BTreeMap::new(),
            preds: vec![BTreeSet::new(); last + 1],
            succs: vec![BTreeSet::new(); last + 1],
            alive: self.alive.iter().rev().copied().collect(),
        };
        for (&(i, j), &l) in &self.arcs {
            let (a, b) = (last - j, last - i);
            out.arcs.insert((a, b), l);
            out.succs[a].insert(b);
            out.preds[b].insert(a);
        }
        out
    }

    fn remove_arc(&mut self, i: usize, j: usize) -> Option<f64> {
        self.succs[i].remove(&j);
        self.preds[j].remove(&i);
        self.arcs.remove(&(i, j)).expect("arc present")
    }

    /// Insert (i, j) with `label`, summing into an existing arc.
    fn add_fused(&mut self, i: usize, j: usize, label: Option<f64>) {
        match self.arcs.get_mut(&(i, j)) {
            Some(existing) => {
                *existing = match (*existing, label) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                }
            }
            None => {
                self.arcs.insert((i, j), label);
                self.succs[i].insert(j);
                self.preds[j].insert(i);
            }
        }
    }

    fn remove_vertex(&mut self, v: usize) {
        for j in std::mem::take(&mut self.succs[v]) {
            self.preds[j].remove(&v);
            self.arcs.remove(&(v, j));
        }
        for i in std::mem::take(&mut self.preds[v]) {
            self.succs[i].remove(&v);
            self.arcs.remove(&(i, v));
        }
        self.alive[v] = false;
    }

    fn product(a: Option<f64>, b: Option<f64>) -> Option<f64> {
        Some(a? * b?)
    }

    fn check_arc(&self, i: usize, j: usize) -> Result<()> {
        if self.has_arc(i, j) {
            Ok(())
        } else {
            Err(ElimError::NotEliminatable(format!("arc ({i}, {j}) not present")))
        }
    }

    pub fn apply_front(&mut self, i: usize, j: usize) -> Result<usize> {
        self.check_arc(i, j)?;
        if self.succs[j].is_empty() {
            return Err(ElimError::NotEliminatable(format!("({i}, {j}): vertex {j} has no successors")));
        }
        let d_ij = self.remove_arc(i, j);
        let targets: Vec<usize> = self.succs[j].iter().copied().collect();
        for &k in &targets {
            let l = Self::product(d_ij, self.arcs[&(j, k)]);
            self.add_fused(i, k, l);
        }
        if self.preds[j].is_empty() {
            self.remove_vertex(j);
        }
        Ok(targets.len())
    }

    pub fn apply_back(&mut self, i: usize, j: usize) -> Result<usize> {
        self.check_arc(i, j)?;
        if self.preds[i].is_empty() {
            return Err(ElimError::NotEliminatable(format!("({i}, {j}): vertex {i} has no predecessors")));
        }
        let d_ij = self.remove_arc(i, j);
        let origins: Vec<usize> = self.preds[i].iter().copied().collect();
        for &k in &origins {
            let l = Self::product(self.arcs[&(k, i)], d_ij);
            self.add_fused(k, j, l);
        }
        if self.succs[i].is_empty() {
            self.remove_vertex(i);
        }
        Ok(origins.len())
    }

    pub fn apply_vertex(&mut self, j: usize) -> Result<usize> {
        if !self.is_intermediate(j) || !self.alive[j] {
            return Err(ElimError::NotEliminatable(format!("{j} is not a live intermediate")));
        }
        let ps: Vec<usize> = self.preds[j].iter().copied().collect();
        let ss: Vec<usize> = self.succs[j].iter().copied().collect();
        if ps.is_empty() || ss.is_empty() {
            return Err(ElimError::NotEliminatable(format!("{j} has an empty neighbourhood")));
        }
        for &k in &ps {
            for &l in &ss {
                let label = Self::product(self.arcs[&(k, j)], self.arcs[&(j, l)]);
                self.add_fused(k, l, label);
            }
        }
        self.remove_vertex(j);
        Ok(ps.len() * ss.len())
    }

    pub fn apply(&mut self, step: EliminationStep) -> Result<usize> {
        match step {
            EliminationStep::Front { i, j } => self.apply_front(i, j),
            EliminationStep::Back { i, j } => self.apply_back(i, j),
            EliminationStep::Vertex { j } => self.apply_vertex(j),
        }
    }

    /// Jacobian read off a bipartite dag: row per sink, column per source.
    pub fn bipartite_jacobian(&self) -> Result<Vec<Vec<f64>>> {
        if !self.is_bipartite() {
            return Err(ElimError::InvalidDag("intermediates remain".into()));
        }
        let mut jac = vec![vec![0.0; self.n]; self.m];
        for (&(i, j), &l) in &self.arcs {
            let l = l.ok_or(ElimError::MissingLabel(i, j))?;
            jac[j - self.n - self.p][i] = l;
        }
        Ok(jac)
    }
}

pub fn front_eliminate(g: &LinearizedDag, i: usize, j: usize) -> Result<(LinearizedDag, usize)> {
    let mut out = g.clone();
    let cost = out.apply_front(i, j)?;
    Ok((out, cost))
}

pub fn back_eliminate(g: &LinearizedDag, i: usize, j: usize) -> Result<(LinearizedDag, usize)> {
    let mut out = g.clone();
    let cost = out.apply_back(i, j)?;
    Ok((out, cost))
}

pub fn vertex_eliminate(g: &LinearizedDag, j: usize) -> Result<(LinearizedDag, usize)> {
    let mut out = g.clone();
    let cost = out.apply_vertex(j)?;
    Ok((out, cost))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceOutcome {
    pub dag: LinearizedDag,
    pub total_cost: usize,
    pub is_complete: bool,
    /// Cost of each step in order.
    pub costs: Vec<usize>,
}

pub fn run_sequence(g: &LinearizedDag, steps: &[EliminationStep]) -> Result<SequenceOutcome> {
    let mut dag = g.clone();
    let mut costs = Vec::with_capacity(steps.len());
    for (index, &step) in steps.iter().enumerate() {
        let c = dag.apply(step).map_err(|e| ElimError::IllegalStep {
            index,
            reason: e.to_string(),
        })?;
        costs.push(c);
    }
    Ok(SequenceOutcome {
        is_complete: dag.is_bipartite(),
        total_cost: costs.iter().sum(),
        costs,
        dag,
    })
}

/// Chain-rule Jacobian by forward accumulation over the topological order:
/// entry (t, s) is the sum over s→t paths of the product of labels.
pub fn path_sum_jacobian(g: &LinearizedDag) -> Result<Vec<Vec<f64>>> {
    let total = g.vertex_count();
    let mut jac = vec![vec![0.0; g.n]; g.m];
    for s in 0..g.n {
        let mut acc = vec![0.0; total];
        acc[s] = 1.0;
        for v in s..total {
            if acc[v] == 0.0 {
                continue;
            }
            for &w in &g.succs[v] {
                let l = g.label(v, w).ok_or(ElimError::MissingLabel(v, w))?;
                acc[w] += acc[v] * l;
            }
        }
        for (t, row) in jac.iter_mut().enumerate() {
            row[s] = acc[g.n + g.p + t];
        }
    }
    // Make sure unreachable arcs are labelled too.
    if let Some((&(i, j), _)) = g.arcs.iter().find(|(_, l)| l.is_none()) {
        return Err(ElimError::MissingLabel(i, j));
    }
    Ok(jac)
}

/// Repeatedly eliminate the intermediate with the smallest current
/// |P|·|S| (lowest index on ties).
pub fn greedy_vertex_sequence(g: &LinearizedDag) -> (Vec<EliminationStep>, usize) {
    let mut dag = g.clone();
    let mut steps = Vec::new();
    let mut total = 0;
    while let Some(j) = dag
        .alive_intermediates()
        .into_iter()
        .min_by_key(|&z| (dag.preds[z].len() * dag.succs[z].len(), z))
    {
        total += dag.apply_vertex(j).expect("live intermediate");
        steps.push(EliminationStep::Vertex { j });
    }
    (steps, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Vertex,
    Edge,
}

/// Limits for [`optimal_sequence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_intermediates: usize,
    pub max_edge_states: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self {
            max_intermediates: 10,
            max_edge_states: 2_000_000,
        }
    }
}

/// Minimum-cost complete sequence, by subset DP (vertex mode) or memoised
/// search over arc sets (edge mode).
pub fn optimal_sequence(g: &LinearizedDag, mode: SearchMode, caps: SearchCaps) -> Result<(Vec<EliminationStep>, usize)> {
    match mode {
        SearchMode::Vertex => optimal_vertex(g, caps.max_intermediates),
        SearchMode::Edge => optimal_edge(g, caps.max_edge_states),
    }
}

fn structural(g: &LinearizedDag) -> LinearizedDag {
    let mut s = g.clone();
    s.arcs.values_mut().for_each(|l| *l = None);
    s
}

fn optimal_vertex(g: &LinearizedDag, cap: usize) -> Result<(Vec<EliminationStep>, usize)> {
    let zs = g.alive_intermediates();
    let k = zs.len();
    if k > cap {
        return Err(ElimError::InstanceTooLarge(format!("{k} intermediates, cap {cap}")));
    }
    let base = structural(g);
    let full = (1usize << k) - 1;
    let mut best = vec![usize::MAX; 1 << k];
    let mut via = vec![usize::MAX; 1 << k];
    best[0] = 0;
    let mut masks: Vec<usize> = (0..=full).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        if best[mask] == usize::MAX || mask == full {
            continue;
        }
        // The structure after eliminating a set does not depend on the order.
        let mut dag = base.clone();
        for (b, &z) in zs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                dag.apply_vertex(z).expect("live intermediate");
            }
        }
        for (b, &z) in zs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                continue;
            }
            let next = mask | 1 << b;
            let c = best[mask] + dag.preds[z].len() * dag.succs[z].len();
            if c < best[next] {
                best[next] = c;
                via[next] = b;
            }
        }
    }
    let mut order = Vec::with_capacity(k);
    let mut mask = full;
    while mask != 0 {
        let b = via[mask];
        order.push(EliminationStep::Vertex { j: zs[b] });
        mask &= !(1 << b);
    }
    order.reverse();
    Ok((order, best[full]))
}

type ArcKey = Vec<(usize, usize)>;

fn edge_moves(dag: &LinearizedDag) -> Vec<(EliminationStep, usize)> {
    let mut moves = Vec::new();
    for &(i, j) in dag.arcs.keys() {
        if dag.is_intermediate(j) {
            moves.push((EliminationStep::Front { i, j }, dag.succs[j].len()));
        }
        if dag.is_intermediate(i) {
            moves.push((EliminationStep::Back { i, j }, dag.preds[i].len()));
        }
    }
    moves
}

fn optimal_edge(g: &LinearizedDag, cap: usize) -> Result<(Vec<EliminationStep>, usize)> {
    struct Search {
        memo: HashMap<ArcKey, (usize, Option<EliminationStep>)>,
        cap: usize,
    }
    impl Search {
        fn solve(&mut self, dag: &LinearizedDag) -> Result<usize> {
            let key: ArcKey = dag.arcs.keys().copied().collect();
            if let Some(&(c, _)) = self.memo.get(&key) {
                return Ok(c);
            }
            if self.memo.len() >= self.cap {
                return Err(ElimError::InstanceTooLarge(format!("more than {} edge-mode states", self.cap)));
            }
            let mut best = (usize::MAX, None);
            if dag.is_bipartite() {
                best = (0, None);
            } else {
                for (step, cost) in edge_moves(dag) {
                    let mut next = dag.clone();
                    next.apply(step).expect("legal move");
                    let c = cost + self.solve(&next)?;
                    if c < best.0 {
                        best = (c, Some(step));
                    }
                }
            }
            self.memo.insert(key, best);
            Ok(best.0)
        }
    }
    let start = structural(g);
    let mut search = Search {
        memo: HashMap::new(),
        cap,
    };
    let total = search.solve(&start)?;
    let mut steps = Vec::new();
    let mut dag = start;
    loop {
        let key: ArcKey = dag.arcs.keys().copied().collect();
        match search.memo[&key].1 {
            Some(step) => {
                dag.apply(step).expect("recorded move is legal");
                steps.push(step);
            }
            None => break,
        }
    }
    Ok((steps, total))
}

/// On-disk dag: `{"n":2,"p":1,"m":1,"arcs":[[1,3,2.0],[2,3],[3,4]]}`. Vertex
/// numbers start at `base` (default 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DagJson {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub arcs: Vec<ArcJson>,
    #[serde(default = "one")]
    pub base: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArcJson {
    Labeled(usize, usize, f64),
    Bare(usize, usize),
}

impl TryFrom<DagJson> for LinearizedDag {
    type Error = ElimError;

    fn try_from(j: DagJson) -> Result<Self> {
        let base = j.base;
        let shift = |v: usize| {
            v.checked_sub(base)
                .ok_or_else(|| ElimError::InvalidDag(format!("vertex {v} below base {base}")))
        };
        let mut arcs = Vec::with_capacity(j.arcs.len());
        for a in j.arcs {
            let (i, k, l) = match a {
                ArcJson::Labeled(i, k, l) => (i, k, Some(l)),
                ArcJson::Bare(i, k) => (i, k, None),
            };
            arcs.push((shift(i)?, shift(k)?, l));
        }
        LinearizedDag::new(j.n, j.p, j.m, arcs)
    }
}

impl From<&LinearizedDag> for DagJson {
    fn from(g: &LinearizedDag) -> Self {
        Self {
            n: g.n,
            p: g.p,
            m: g.m,
            arcs: g
                .arcs()
                .map(|(i, j, l)| match l {
                    Some(l) => ArcJson::Labeled(i + 1, j + 1, l),
                    None => ArcJson::Bare(i + 1, j + 1),
                })
                .collect(),
            base: 1,
        }
    }
}
