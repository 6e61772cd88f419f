//! Cardinality-based hypergraph s-t cuts: objective, exhaustive oracle,
//! flow reductions, the max-cut reduction and the No-Even-Split variant.

pub mod flow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use flow::{gadget_coefficients, gadget_min_cut_4uniform, lawler_min_cut, DirectedFlowGraph};

use crate::graph::WeightedGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperError {
    #[error("vertex {vertex} out of range for a hypergraph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("hyperedge {index} is invalid: {reason}")]
    BadHyperedge { index: usize, reason: String },
    #[error("terminals must be distinct vertices (s = {s}, t = {t})")]
    BadTerminals { s: usize, t: usize },
    #[error("cut side must contain s and exclude t")]
    TerminalViolation,
    #[error("invalid cut weights: {0}")]
    BadWeights(String),
    #[error("weight vector covers splits up to {have}, hyperedges need {need}")]
    WeightsTooShort { have: usize, need: usize },
    #[error("w2 = {0} outside [1, 2]")]
    WeightOutOfRange(f64),
    #[error("hyperedge {index} has {size} vertices; expected {expected}")]
    NotUniform { index: usize, size: usize, expected: usize },
    #[error("{n} vertices exceeds the brute-force cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, HyperError>;

/// Default vertex cap for exhaustive enumeration.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;

/// Tolerance when comparing float cut values for ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypergraph {
    n: usize,
    s: usize,
    t: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Members of each hyperedge are sorted; each edge needs ≥ 2 distinct vertices.
    pub fn new(n: usize, s: usize, t: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        for v in [s, t] {
            if v >= n {
                return Err(HyperError::VertexOutOfRange { vertex: v, n });
            }
        }
        if s == t {
            return Err(HyperError::BadTerminals { s, t });
        }
        let mut clean = Vec::with_capacity(edges.len());
        for (index, mut e) in edges.into_iter().enumerate() {
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(HyperError::VertexOutOfRange { vertex: v, n });
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(HyperError::BadHyperedge {
                    index,
                    reason: "repeated vertex".into(),
                });
            }
            if e.len() < 2 {
                return Err(HyperError::BadHyperedge {
                    index,
                    reason: "fewer than two vertices".into(),
                });
            }
            clean.push(e);
        }
        Ok(Self { n, s, t, edges: clean })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn max_arity(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn require_uniform(&self, r: usize) -> Result<()> {
        match self.edges.iter().enumerate().find(|(_, e)| e.len() != r) {
            Some((index, e)) => Err(HyperError::NotUniform {
                index,
                size: e.len(),
                expected: r,
            }),
            None => Ok(()),
        }
    }

    /// Same hypergraph with s and t exchanged.
    pub fn swap_terminals(&self) -> Self {
        Self {
            s: self.t,
            t: self.s,
            ..self.clone()
        }
    }
}

/// Split penalties w[0..=⌊r/2⌋] with w[0] = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutWeights(Vec<f64>);

impl CutWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        match w.first() {
            None => return Err(HyperError::BadWeights("empty weight vector".into())),
            Some(&w0) if w0 != 0.0 => {
                return Err(HyperError::BadWeights(format!("w[0] must be 0, got {w0}")))
            }
            _ => {}
        }
        if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(HyperError::BadWeights(format!("weight {x} is not a nonnegative real")));
        }
        Ok(Self(w))
    }

    /// w_i = 1 for every i ≥ 1 up to ⌊r/2⌋.
    pub fn all_ones(max_arity: usize) -> Self {
        let mut w = vec![1.0; max_arity / 2 + 1];
        w[0] = 0.0;
        Self(w)
    }

    /// (0, w₁, w₂).
    pub fn four_uniform(w1: f64, w2: f64) -> Result<Self> {
        Self::new(vec![0.0, w1, w2])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn check_covers(&self, h: &Hypergraph) -> Result<()> {
        let need = h.max_arity() / 2;
        if self.0.len() <= need {
            return Err(HyperError::WeightsTooShort {
                have: self.0.len() - 1,
                need,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutSolution {
    pub value: f64,
    /// Sorted vertex set containing s and not t.
    pub side: Vec<usize>,
}

fn side_mask(h: &Hypergraph, side: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; h.n];
    for &v in side {
        if v >= h.n {
            return Err(HyperError::VertexOutOfRange { vertex: v, n: h.n });
        }
        mask[v] = true;
    }
    if !mask[h.s] || mask[h.t] {
        return Err(HyperError::TerminalViolation);
    }
    Ok(mask)
}

/// min(|e ∩ S|, |e ∖ S|) for every hyperedge.
pub fn split_sizes(h: &Hypergraph, side: &[bool]) -> Vec<usize> {
    h.edges
        .iter()
        .map(|e| {
            let inside = e.iter().filter(|&&v| side[v]).count();
            inside.min(e.len() - inside)
        })
        .collect()
}

fn value_of_mask(h: &Hypergraph, w: &[f64], side: &[bool]) -> f64 {
    split_sizes(h, side).into_iter().map(|i| w[i]).sum()
}

/// Σ_i w[i]·|∂ᵢ(S)|.
pub fn cut_value(h: &Hypergraph, side: &[usize], w: &CutWeights) -> Result<f64> {
    w.check_covers(h)?;
    let mask = side_mask(h, side)?;
    Ok(value_of_mask(h, &w.0, &mask))
}

fn free_vertices(h: &Hypergraph) -> Vec<usize> {
    (0..h.n).filter(|&v| v != h.s && v != h.t).collect()
}

fn mask_from_bits(h: &Hypergraph, free: &[usize], bits: u64) -> Vec<bool> {
    let mut side = vec![false; h.n];
    side[h.s] = true;
    for (i, &v) in free.iter().enumerate() {
        if bits >> i & 1 == 1 {
            side[v] = true;
        }
    }
    side
}

fn members(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&v| mask[v]).collect()
}

/// Best over all terminal-respecting sides of `score` (None = infeasible), with
/// the lexicographically smallest sorted side among ties.
fn exhaustive_min<F>(h: &Hypergraph, cap: usize, score: F) -> Result<Option<(f64, Vec<usize>)>>
where
    F: Fn(&[bool]) -> Option<f64> + Sync,
{
    if h.n > cap.min(64) {
        return Err(HyperError::InstanceTooLarge { n: h.n, cap: cap.min(64) });
    }
    let free = free_vertices(h);
    let total: u64 = 1 << free.len();
    let best = (0..total)
        .into_par_iter()
        .filter_map(|bits| {
            let mask = mask_from_bits(h, &free, bits);
            score(&mask).map(|v| (v, bits))
        })
        .map(|(v, bits)| (v, members(&mask_from_bits(h, &free, bits))))
        .reduce_with(|a, b| {
            if a.0 < b.0 - TIE_TOL || ((a.0 - b.0).abs() <= TIE_TOL && a.1 <= b.1) {
                a
            } else {
                b
            }
        });
    Ok(best)
}

/// Exact minimiser over all 2^(n-2) sides.
pub fn brute_force_min_cut(h: &Hypergraph, w: &CutWeights, cap: usize) -> Result<CutSolution> {
    w.check_covers(h)?;
    let best = exhaustive_min(h, cap, |mask| Some(value_of_mask(h, &w.0, mask)))?;
    let (value, side) = best.expect("S = {s} is always feasible");
    Ok(CutSolution { value, side })
}

/// Hypergraph on V(G) ∪ {s, t} with one hyperedge {u, v, s, t} per edge; s = n, t = n + 1.
pub fn maxcut_reduction(g: &WeightedGraph) -> Hypergraph {
    let n = g.vertex_count();
    let edges = g.edges().iter().map(|e| vec![e.u, e.v, n, n + 1]).collect();
    Hypergraph::new(n + 2, n, n + 1, edges).expect("well-formed by construction")
}

/// Fewest 1-vs-3 splits over sides that split no hyperedge 2-vs-2.
pub fn no_even_split_min(h: &Hypergraph, cap: usize) -> Result<(usize, Vec<usize>)> {
    h.require_uniform(4)?;
    let best = exhaustive_min(h, cap, |mask| {
        let sizes = split_sizes(h, mask);
        if sizes.contains(&2) {
            None
        } else {
            Some(sizes.iter().filter(|&&i| i == 1).count() as f64)
        }
    })?;
    let (value, side) = best.expect("S = {s} never splits a hyperedge 2-vs-2");
    Ok((value as usize, side))
}

/// On-disk format: `{"n": 4, "s": 0, "t": 3, "edges": [[0, 1, 2, 3]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub edges: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphJson> for Hypergraph {
    type Error = HyperError;

    fn try_from(j: HypergraphJson) -> Result<Self> {
        Hypergraph::new(j.n, j.s, j.t, j.edges)
    }
}

impl From<&Hypergraph> for HypergraphJson {
    fn from(h: &Hypergraph) -> Self {
        Self {
            n: h.n,
            s: h.s,
            t: h.t,
            edges: h.edges.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_edge() -> Hypergraph {
        Hypergraph::new(4, 0, 3, vec![vec![0, 1, 2, 3]]).unwrap()
    }

    #[test]
    fn cut_value_examples() {
        let h = one_edge();
        let w = CutWeights::four_uniform(1.0, 0.5).unwrap();
        assert_eq!(cut_value(&h, &[0, 1], &w).unwrap(), 0.5);
        assert_eq!(cut_value(&h, &[0], &w).unwrap(), 1.0);
        let apart = Hypergraph::new(6, 0, 5, vec![vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(cut_value(&apart, &[0], &w).unwrap(), 0.0);
        assert_eq!(cut_value(&h, &[1], &w), Err(HyperError::TerminalViolation));
        assert_eq!(cut_value(&h, &[0, 3], &w), Err(HyperError::TerminalViolation));
    }

    #[test]
    fn brute_force_examples() {
        let h = one_edge();
        let cheap = CutWeights::four_uniform(1.0, 0.5).unwrap();
        let sol = brute_force_min_cut(&h, &cheap, 20).unwrap();
        assert_eq!((sol.value, sol.side), (0.5, vec![0, 1]));
        let dear = CutWeights::four_uniform(1.0, 1.5).unwrap();
        let sol = brute_force_min_cut(&h, &dear, 20).unwrap();
        assert_eq!((sol.value, sol.side), (1.0, vec![0]));

        let h = Hypergraph::new(3, 0, 2, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let sol = brute_force_min_cut(&h, &CutWeights::all_ones(2), 20).unwrap();
        assert_eq!(sol.value, 1.0);
        assert!(matches!(
            brute_force_min_cut(&h, &CutWeights::all_ones(2), 2),
            Err(HyperError::InstanceTooLarge { n: 3, cap: 2 })
        ));
    }

    #[test]
    fn weights_validated() {
        assert!(CutWeights::new(vec![0.5, 1.0]).is_err());
        assert!(CutWeights::new(vec![0.0, -1.0]).is_err());
        let h = one_edge();
        assert!(matches!(
            cut_value(&h, &[0], &CutWeights::new(vec![0.0, 1.0]).unwrap()),
            Err(HyperError::WeightsTooShort { have: 1, need: 2 })
        ));
    }

    #[test]
    fn maxcut_triangle() {
        let k3 = WeightedGraph::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = maxcut_reduction(&k3);
        assert_eq!((h.vertex_count(), h.edges().len()), (5, 3));
        let w = CutWeights::four_uniform(1.0, 0.0).unwrap();
        assert_eq!(brute_force_min_cut(&h, &w, 20).unwrap().value, 1.0);

        let k2 = WeightedGraph::unit(2, &[(0, 1)]).unwrap();
        let h = maxcut_reduction(&k2);
        assert_eq!(brute_force_min_cut(&h, &w, 20).unwrap().value, 0.0);
    }

    #[test]
    fn no_even_split_examples() {
        assert_eq!(no_even_split_min(&one_edge(), 20).unwrap().0, 1);
        let apart = Hypergraph::new(6, 0, 5, vec![vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(no_even_split_min(&apart, 20).unwrap(), (0, vec![0]));
    }

    #[test]
    fn json_round_trip() {
        let j: HypergraphJson = serde_json::from_str(r#"{"n":4,"s":0,"t":3,"edges":[[3,1,2,0]]}"#).unwrap();
        let h = Hypergraph::try_from(j).unwrap();
        assert_eq!(h, one_edge());
    }
}
