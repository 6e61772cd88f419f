//! Zero forcing, (n-k)-contingent and ℓ-leaky variants, and exhaustive
//! minimum-set search.
//!
//! Edge weights are ignored; only adjacency matters.

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::WeightedGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZfError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph has {n} vertices, above the brute-force cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("input graph is not a tree")]
    NotATree,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, ZfError>;

/// Default vertex cap for exhaustive minimum-set search.
pub const DEFAULT_SEARCH_CAP: usize = 12;

/// Result of running forcing moves to exhaustion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcingState {
    pub colored: Vec<bool>,
    /// (forcer, forced) in application order.
    pub history: Vec<(usize, usize)>,
}

impl ForcingState {
    pub fn is_complete(&self) -> bool {
        self.colored.iter().all(|&c| c)
    }

    pub fn colored_set(&self) -> Vec<usize> {
        (0..self.colored.len()).filter(|&v| self.colored[v]).collect()
    }
}

fn adjacency(g: &WeightedGraph) -> Vec<Vec<usize>> {
    (0..g.vertex_count()).map(|v| g.neighbors(v).collect()).collect()
}

fn initial_colors(n: usize, z: &[usize]) -> Result<Vec<bool>> {
    let mut colored = vec![false; n];
    for &v in z {
        if v >= n {
            return Err(ZfError::VertexOutOfRange { vertex: v, n });
        }
        colored[v] = true;
    }
    Ok(colored)
}

/// Worklist closure: a colored vertex with exactly one uncolored neighbour
/// forces it.
fn close(adj: &[Vec<usize>], colored: &mut [bool], mut history: Option<&mut Vec<(usize, usize)>>) {
    let mut open: Vec<usize> = adj
        .iter()
        .zip(colored.iter())
        .map(|(nb, _)| nb.iter().filter(|&&u| !colored[u]).count())
        .collect();
    let mut queue: Vec<usize> = (0..adj.len()).filter(|&v| colored[v] && open[v] == 1).collect();
    while let Some(v) = queue.pop() {
        if open[v] != 1 {
            continue;
        }
        let u = *adj[v].iter().find(|&&u| !colored[u]).expect("one open neighbour");
        colored[u] = true;
        if let Some(h) = history.as_deref_mut() {
            h.push((v, u));
        }
        for &x in &adj[u] {
            open[x] -= 1;
            if colored[x] && open[x] == 1 {
                queue.push(x);
            }
        }
        if open[u] == 1 {
            queue.push(u);
        }
    }
}

fn forces_all(adj: &[Vec<usize>], colored: &mut [bool]) -> bool {
    close(adj, colored, None);
    colored.iter().all(|&c| c)
}

pub fn force_closure(g: &WeightedGraph, z: &[usize]) -> Result<ForcingState> {
    let mut colored = initial_colors(g.vertex_count(), z)?;
    let mut history = Vec::new();
    close(&adjacency(g), &mut colored, Some(&mut history));
    Ok(ForcingState { colored, history })
}

/// Same closure, but each step applies a uniformly random legal move. Used to
/// check that the final colouring does not depend on move order.
pub fn force_closure_random_order<R: Rng>(g: &WeightedGraph, z: &[usize], rng: &mut R) -> Result<ForcingState> {
    let adj = adjacency(g);
    let mut colored = initial_colors(g.vertex_count(), z)?;
    let mut history = Vec::new();
    loop {
        let moves: Vec<(usize, usize)> = (0..adj.len())
            .filter(|&v| colored[v])
            .filter_map(|v| {
                let mut open = adj[v].iter().filter(|&&u| !colored[u]);
                match (open.next(), open.next()) {
                    (Some(&u), None) => Some((v, u)),
                    _ => None,
                }
            })
            .collect();
        let Some(&(v, u)) = moves.choose(rng) else { break };
        colored[u] = true;
        history.push((v, u));
    }
    Ok(ForcingState { colored, history })
}

/// Visit k-subsets of `0..n` in lexicographic order until `f` returns true.
fn any_combination<F: FnMut(&[usize]) -> bool>(n: usize, k: usize, f: &mut F) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    any_combination(n, k, &mut |c| {
        out.push(c.to_vec());
        false
    });
    out
}

/// True iff Z forces the whole graph after deleting any ≤ k edges.
pub fn is_contingent_zfs(g: &WeightedGraph, z: &[usize], k: usize) -> Result<bool> {
    let base = initial_colors(g.vertex_count(), z)?;
    let edges = g.edges();
    let full = adjacency(g);
    let mut adj = full.clone();
    for size in 0..=k.min(edges.len()) {
        let failed = any_combination(edges.len(), size, &mut |removed: &[usize]| {
            for &e in removed {
                let (u, v) = (edges[e].u, edges[e].v);
                adj[u].retain(|&x| x != v);
                adj[v].retain(|&x| x != u);
            }
            let ok = forces_all(&adj, &mut base.clone());
            for &e in removed {
                let (u, v) = (edges[e].u, edges[e].v);
                adj[u].clone_from(&full[u]);
                adj[v].clone_from(&full[v]);
            }
            !ok
        });
        if failed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff Z forces the graph with one pendant vertex attached to each
/// member of any leak set of size ≤ ℓ.
pub fn is_leaky_zfs(g: &WeightedGraph, z: &[usize], leaks: usize) -> Result<bool> {
    let n = g.vertex_count();
    let base = initial_colors(n, z)?;
    let full = adjacency(g);
    for size in 0..=leaks.min(n) {
        let failed = any_combination(n, size, &mut |leak_set: &[usize]| {
            let mut adj = full.clone();
            for (i, &v) in leak_set.iter().enumerate() {
                adj[v].push(n + i);
                adj.push(vec![v]);
            }
            let mut colored = base.clone();
            colored.resize(n + leak_set.len(), false);
            !forces_all(&adj, &mut colored)
        });
        if failed {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    Contingent,
    Leaky,
}

fn passes(g: &WeightedGraph, z: &[usize], k: usize, variant: Variant) -> Result<bool> {
    match variant {
        Variant::Contingent => is_contingent_zfs(g, z, k),
        Variant::Leaky => is_leaky_zfs(g, z, k),
    }
}

/// Smallest set passing the chosen test, lexicographically first among equal
/// sizes. Candidate sets of one size are checked in parallel.
pub fn min_forcing_set(g: &WeightedGraph, k: usize, variant: Variant, cap: usize) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(ZfError::InstanceTooLarge { n, cap });
    }
    for size in 0..=n {
        let found = combinations(n, size)
            .into_par_iter()
            .find_first(|z| passes(g, z, k, variant).unwrap_or(false));
        if let Some(z) = found {
            return Ok(z);
        }
    }
    unreachable!("the full vertex set always forces")
}

pub fn min_contingent_zfs(g: &WeightedGraph, k: usize) -> Result<Vec<usize>> {
    min_forcing_set(g, k, Variant::Contingent, DEFAULT_SEARCH_CAP)
}

/// The tree characterisation: {v : deg(v) ≤ k}.
pub fn tree_contingent_set(tree: &WeightedGraph, k: usize) -> Result<Vec<usize>> {
    if !tree.is_tree() {
        return Err(ZfError::NotATree);
    }
    if k == 0 {
        return Err(ZfError::InvalidParameter("k must be at least 1".into()));
    }
    Ok((0..tree.vertex_count()).filter(|&v| tree.degree(v) <= k).collect())
}

/// CLI-facing verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub set: Vec<usize>,
    pub size: usize,
    pub verified: bool,
}

pub fn check(g: &WeightedGraph, z: &[usize], k: usize, variant: Variant) -> Result<Verdict> {
    let mut set = z.to_vec();
    set.sort_unstable();
    set.dedup();
    let verified = passes(g, &set, k, variant)?;
    Ok(Verdict {
        size: set.len(),
        set,
        verified,
    })
}

pub fn minimum(g: &WeightedGraph, k: usize, variant: Variant, cap: usize) -> Result<Verdict> {
    let set = min_forcing_set(g, k, variant, cap)?;
    let verified = passes(g, &set, k, variant)?;
    Ok(Verdict {
        size: set.len(),
        set,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, GraphSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> WeightedGraph {
        generate(&GraphSpec::new(GraphKind::Path { n, weight: None }, 0)).unwrap()
    }

    fn cycle(m: usize) -> WeightedGraph {
        generate(&GraphSpec::new(GraphKind::Cycle { m, weight: None }, 0)).unwrap()
    }

    fn star(leaves: usize) -> WeightedGraph {
        let pairs: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        WeightedGraph::unit(leaves + 1, &pairs).unwrap()
    }

    #[test]
    fn closure_examples() {
        let p4 = force_closure(&path(4), &[0]).unwrap();
        assert!(p4.is_complete());
        assert_eq!(p4.history, vec![(0, 1), (1, 2), (2, 3)]);

        let c4 = force_closure(&cycle(4), &[0]).unwrap();
        assert_eq!(c4.colored_set(), vec![0]);

        let all = force_closure(&cycle(5), &[0, 1, 2, 3, 4]).unwrap();
        assert!(all.is_complete() && all.history.is_empty());
    }

    #[test]
    fn random_order_matches_worklist() {
        let g = generate(&GraphSpec::new(GraphKind::RandomConnected { n: 12, p: 0.15 }, 5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for z in [vec![0, 1, 2], vec![3, 7], vec![0, 4, 8, 11]] {
            let a = force_closure(&g, &z).unwrap();
            let b = force_closure_random_order(&g, &z, &mut rng).unwrap();
            assert_eq!(a.colored, b.colored);
        }
    }

    #[test]
    fn contingent_examples() {
        assert!(is_contingent_zfs(&star(3), &[1, 2], 0).unwrap());
        assert!(is_contingent_zfs(&path(3), &[0, 2], 1).unwrap());
        assert!(!is_contingent_zfs(&path(3), &[1], 1).unwrap());
    }

    #[test]
    fn leaky_examples() {
        assert!(is_leaky_zfs(&path(3), &[0, 2], 1).unwrap());
        let g = cycle(5);
        for z in [vec![0], vec![0, 1], vec![0, 2]] {
            assert_eq!(
                is_leaky_zfs(&g, &z, 0).unwrap(),
                force_closure(&g, &z).unwrap().is_complete()
            );
        }
    }

    #[test]
    fn minimum_sets() {
        assert_eq!(min_contingent_zfs(&cycle(4), 0).unwrap(), vec![0, 1]);
        assert_eq!(min_contingent_zfs(&path(4), 0).unwrap(), vec![0]);
        let big = path(13);
        assert_eq!(
            min_contingent_zfs(&big, 0),
            Err(ZfError::InstanceTooLarge { n: 13, cap: 12 })
        );
    }

    #[test]
    fn tree_sets() {
        assert_eq!(tree_contingent_set(&path(3), 1).unwrap(), vec![0, 2]);
        assert_eq!(tree_contingent_set(&star(4), 1).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(tree_contingent_set(&star(4), 4).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(tree_contingent_set(&cycle(4), 1), Err(ZfError::NotATree));
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
