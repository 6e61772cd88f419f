//! Weighted simple graphs, geodesic distances, ε-net landmark selection and
//! seeded generators.
//!
//! Vertices are dense indices `0..n`. Graphs are immutable once built and are
//! shared by the TDA and zero-forcing modules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{u}, {v}}} has weight {weight}; weights must be finite and positive")]
    BadWeight { u: usize, v: usize, weight: f64 },
    #[error("graph is disconnected but a finite metric is required")]
    DisconnectedGraph,
    #[error("landmark {landmark} out of range for a graph with {n} vertices")]
    LandmarkOutOfRange { landmark: usize, n: usize },
    #[error("epsilon must be finite and nonnegative, got {0}")]
    BadEpsilon(f64),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// Undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Simple undirected graph with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut g = Self::empty(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    /// All edges get weight 1.
    pub fn unit(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges(n, pairs.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(GraphError::BadWeight { u, v, weight });
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if self.has_edge(a, b) {
            return Err(GraphError::DuplicateEdge(a, b));
        }
        self.edges.push(Edge { u: a, v: b, weight });
        self.adj[a].push((b, weight));
        self.adj[b].push((a, weight));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn weighted_neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].iter().any(|&(x, _)| x == v)
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj
            .get(u)?
            .iter()
            .find(|&&(x, _)| x == v)
            .map(|&(_, w)| w)
    }

    /// Connected components, as a component label per vertex and the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for root in 0..self.n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = count;
            stack.push(root);
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if label[u] == usize::MAX {
                        label[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// Same vertex set with a subset of edges removed (edges given by index
    /// into [`WeightedGraph::edges`]).
    pub fn without_edges(&self, removed: &[usize]) -> Self {
        let mut g = Self::empty(self.n);
        for (idx, e) in self.edges.iter().enumerate() {
            if !removed.contains(&idx) {
                g.add_edge(e.u, e.v, e.weight).expect("edge of a valid graph");
            }
        }
        g
    }

    /// Replace every edge by a path of `parts` edges of weight `w / parts`.
    /// Preserves geodesic distances between original vertices and the genus.
    pub fn subdivide(&self, parts: usize) -> Self {
        let parts = parts.max(1);
        let extra = self.edges.len() * (parts - 1);
        let mut g = Self::empty(self.n + extra);
        let mut next = self.n;
        for e in &self.edges {
            let w = e.weight / parts as f64;
            let mut prev = e.u;
            for _ in 1..parts {
                g.add_edge(prev, next, w).expect("fresh vertex");
                prev = next;
                next += 1;
            }
            g.add_edge(prev, e.v, w).expect("fresh vertex");
        }
        g
    }
}

/// All-pairs geodesic distances, `f64::INFINITY` between components.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Build from a dense row-major table. Rows must have equal length `n`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "distance matrix must be square");
            data.extend(row);
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|d| d.is_finite())
    }

    /// Largest entry (0 for an empty matrix).
    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from one source. Unreachable vertices get `f64::INFINITY`.
pub fn single_source_distances(g: &WeightedGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in g.weighted_neighbors(v) {
            let nd = d + w;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(HeapEntry { dist: nd, vertex: u });
            }
        }
    }
    dist
}

/// All-pairs geodesic distances by one Dijkstra per source. Disconnected pairs
/// are infinite; use [`finite_geodesic_distances`] when a metric is required.
pub fn geodesic_distances(g: &WeightedGraph) -> DistanceMatrix {
    let n = g.vertex_count();
    let mut data = Vec::with_capacity(n * n);
    for s in 0..n {
        data.extend(single_source_distances(g, s));
    }
    // Dijkstra sums edges in path order, so d(u,v) and d(v,u) can differ in
    // the last ulp; keep the matrix exactly symmetric.
    for u in 0..n {
        for v in (u + 1)..n {
            let m = data[u * n + v].min(data[v * n + u]);
            data[u * n + v] = m;
            data[v * n + u] = m;
        }
    }
    DistanceMatrix { n, data }
}

pub fn finite_geodesic_distances(g: &WeightedGraph) -> Result<DistanceMatrix> {
    let d = geodesic_distances(g);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(GraphError::DisconnectedGraph)
    }
}

/// A landmark subset together with the scale it was chosen for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkSet {
    pub landmarks: Vec<usize>,
    pub epsilon: f64,
}

impl LandmarkSet {
    /// Landmarks are sorted and deduplicated.
    pub fn new(mut landmarks: Vec<usize>, epsilon: f64) -> Self {
        landmarks.sort_unstable();
        landmarks.dedup();
        Self { landmarks, epsilon }
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NetCheck {
    pub is_sample: bool,
    pub is_sparse: bool,
    pub is_net: bool,
}

/// ε-sample / ε-sparse / ε-net test against a precomputed metric.
pub fn check_epsilon_net(d: &DistanceMatrix, landmarks: &LandmarkSet) -> Result<NetCheck> {
    let n = d.len();
    if let Some(&bad) = landmarks.landmarks.iter().find(|&&l| l >= n) {
        return Err(GraphError::LandmarkOutOfRange { landmark: bad, n });
    }
    let eps = landmarks.epsilon;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(GraphError::BadEpsilon(eps));
    }
    let is_sample = (0..n).all(|v| landmarks.landmarks.iter().any(|&l| d.get(v, l) <= eps));
    let ls = &landmarks.landmarks;
    let is_sparse = ls
        .iter()
        .enumerate()
        .all(|(i, &a)| ls[i + 1..].iter().all(|&b| d.get(a, b) > eps));
    Ok(NetCheck {
        is_sample,
        is_sparse,
        is_net: is_sample && is_sparse,
    })
}

pub fn is_epsilon_net(g: &WeightedGraph, landmarks: &LandmarkSet) -> Result<NetCheck> {
    if let Some(&bad) = landmarks.landmarks.iter().find(|&&l| l >= g.vertex_count()) {
        return Err(GraphError::LandmarkOutOfRange {
            landmark: bad,
            n: g.vertex_count(),
        });
    }
    let d = finite_geodesic_distances(g)?;
    check_epsilon_net(&d, landmarks)
}

/// Farthest-point insertion from `start`: keep adding the vertex farthest from
/// the current landmarks (smallest index on ties) while that distance exceeds ε.
///
/// The insertion order does not depend on ε, so the net for a larger ε is a
/// prefix of the net for a smaller one.
pub fn epsilon_net_from(d: &DistanceMatrix, epsilon: f64, start: usize) -> Result<LandmarkSet> {
    let n = d.len();
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(GraphError::BadEpsilon(epsilon));
    }
    if n == 0 {
        return Ok(LandmarkSet::new(Vec::new(), epsilon));
    }
    if start >= n {
        return Err(GraphError::LandmarkOutOfRange { landmark: start, n });
    }
    if !d.is_finite() {
        return Err(GraphError::DisconnectedGraph);
    }
    let mut chosen = vec![start];
    let mut nearest: Vec<f64> = d.row(start).to_vec();
    loop {
        let (far, far_d) = nearest
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (v, dv)| {
                if dv > best.1 {
                    (v, dv)
                } else {
                    best
                }
            });
        if far_d <= epsilon {
            break;
        }
        chosen.push(far);
        for (v, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(d.get(far, v));
        }
    }
    Ok(LandmarkSet::new(chosen, epsilon))
}

/// Greedy ε-net whose starting vertex is drawn from `seed`.
pub fn epsilon_net_greedy(g: &WeightedGraph, epsilon: f64, seed: u64) -> Result<LandmarkSet> {
    let d = finite_geodesic_distances(g)?;
    if d.is_empty() {
        return Ok(LandmarkSet::new(Vec::new(), epsilon));
    }
    let start = seeded_start(seed, d.len());
    epsilon_net_from(&d, epsilon, start)
}

/// Vertex index used by [`epsilon_net_greedy`] as its starting point.
pub fn seeded_start(seed: u64, n: usize) -> usize {
    ChaCha8Rng::seed_from_u64(seed).random_range(0..n)
}

/// Generator families. Weights are 1 unless `weight` (cycle/path) or
/// `weight_range` (random kinds) say otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Cycle {
        m: usize,
        #[serde(default)]
        weight: Option<f64>,
    },
    Path {
        n: usize,
        #[serde(default)]
        weight: Option<f64>,
    },
    RandomEr {
        n: usize,
        p: f64,
    },
    RandomTree {
        n: usize,
    },
    /// Uniform random spanning tree plus independent extra edges with
    /// probability `p`; always connected.
    RandomConnected {
        n: usize,
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub kind: GraphKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weight_range: Option<(f64, f64)>,
}

impl GraphSpec {
    pub fn new(kind: GraphKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            weight_range: None,
        }
    }
}

pub fn generate(spec: &GraphSpec) -> Result<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    if let Some((lo, hi)) = spec.weight_range {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(GraphError::InvalidSpec(format!(
                "weight_range ({lo}, {hi}) must satisfy 0 < lo <= hi < inf"
            )));
        }
    }
    let draw_weight = |rng: &mut ChaCha8Rng| match spec.weight_range {
        Some((lo, hi)) if hi > lo => rng.random_range(lo..hi),
        Some((lo, _)) => lo,
        None => 1.0,
    };
    match spec.kind {
        GraphKind::Cycle { m, weight } => {
            if m < 3 {
                return Err(GraphError::InvalidSpec(format!(
                    "a simple cycle needs at least 3 vertices, got {m}"
                )));
            }
            let w = weight.unwrap_or(1.0);
            WeightedGraph::from_edges(m, (0..m).map(|i| (i, (i + 1) % m, w)))
        }
        GraphKind::Path { n, weight } => {
            if n == 0 {
                return Err(GraphError::InvalidSpec("path needs n >= 1".into()));
            }
            let w = weight.unwrap_or(1.0);
            WeightedGraph::from_edges(n, (1..n).map(|i| (i - 1, i, w)))
        }
        GraphKind::RandomEr { n, p } => {
            check_probability(p)?;
            let mut g = WeightedGraph::empty(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_bool(p) {
                        let w = draw_weight(&mut rng);
                        g.add_edge(u, v, w)?;
                    }
                }
            }
            Ok(g)
        }
        GraphKind::RandomTree { n } => {
            if n == 0 {
                return Err(GraphError::InvalidSpec("tree needs n >= 1".into()));
            }
            let mut g = WeightedGraph::empty(n);
            for (u, v) in random_tree_edges(n, &mut rng) {
                let w = draw_weight(&mut rng);
                g.add_edge(u, v, w)?;
            }
            Ok(g)
        }
        GraphKind::RandomConnected { n, p } => {
            if n == 0 {
                return Err(GraphError::InvalidSpec("graph needs n >= 1".into()));
            }
            check_probability(p)?;
            let mut g = WeightedGraph::empty(n);
            for (u, v) in random_tree_edges(n, &mut rng) {
                let w = draw_weight(&mut rng);
                g.add_edge(u, v, w)?;
            }
            for u in 0..n {
                for v in (u + 1)..n {
                    if !g.has_edge(u, v) && rng.random_bool(p) {
                        let w = draw_weight(&mut rng);
                        g.add_edge(u, v, w)?;
                    }
                }
            }
            Ok(g)
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GraphError::InvalidSpec(format!("edge probability {p} not in [0, 1]")))
    }
}

/// Uniform labelled tree via a random Prüfer sequence.
fn random_tree_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
        edges.push((leaf.min(c), leaf.max(c)));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.shuffle(rng);
    edges
}

/// On-disk graph format: `{"n": 4, "edges": [[0, 1, 2.5], [1, 2]]}` with
/// 0-based vertices; a missing weight means 1.0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeJson {
    Weighted(usize, usize, f64),
    Unit(usize, usize),
}

impl From<&WeightedGraph> for GraphJson {
    fn from(g: &WeightedGraph) -> Self {
        Self {
            n: g.vertex_count(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeJson::Weighted(e.u, e.v, e.weight))
                .collect(),
        }
    }
}

impl TryFrom<GraphJson> for WeightedGraph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self> {
        WeightedGraph::from_edges(
            j.n,
            j.edges.into_iter().map(|e| match e {
                EdgeJson::Weighted(u, v, w) => (u, v, w),
                EdgeJson::Unit(u, v) => (u, v, 1.0),
            }),
        )
    }
}
