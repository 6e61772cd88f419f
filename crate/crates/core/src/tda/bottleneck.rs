//! Bottleneck distance between persistence diagrams in one dimension.

use super::persistence::{DiagramPoint, PersistenceDiagram};
use super::{Result, TdaError};

fn linf(a: &DiagramPoint, b: &DiagramPoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn half_life(p: &DiagramPoint) -> f64 {
    (p.death - p.birth) / 2.0
}

/// Exact L∞ bottleneck distance restricted to `dim`.
///
/// Essential classes are matched among themselves by sorted birth; the counts
/// must agree. Finite points may be matched to each other or to the diagonal.
pub fn bottleneck_distance(pd1: &PersistenceDiagram, pd2: &PersistenceDiagram, dim: usize) -> Result<f64> {
    let split = |pd: &PersistenceDiagram| {
        let mut essential: Vec<f64> = Vec::new();
        let mut finite: Vec<DiagramPoint> = Vec::new();
        for p in pd.in_dim(dim) {
            if p.is_essential() {
                essential.push(p.birth);
            } else {
                finite.push(*p);
            }
        }
        essential.sort_by(f64::total_cmp);
        (essential, finite)
    };
    let (e1, a) = split(pd1);
    let (e2, b) = split(pd2);
    if e1.len() != e2.len() {
        return Err(TdaError::EssentialMismatch {
            dim,
            left: e1.len(),
            right: e2.len(),
        });
    }
    let essential_cost = e1
        .iter()
        .zip(&e2)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(0.0);
    for p in &a {
        candidates.push(half_life(p));
        for q in &b {
            candidates.push(linf(p, q));
        }
    }
    candidates.extend(b.iter().map(half_life));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // The largest candidate is always feasible: match everything to the diagonal.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(&a, &b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo].max(essential_cost))
}

/// Perfect matching in the augmented bipartite graph at threshold δ.
///
/// Left side: points of `a`, then diagonal copies of `b`. Right side: points
/// of `b`, then diagonal copies of `a`.
fn feasible(a: &[DiagramPoint], b: &[DiagramPoint], delta: f64) -> bool {
    let (na, nb) = (a.len(), b.len());
    let size = na + nb;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            if linf(p, q) <= delta {
                adj[i].push(j);
            }
        }
        if half_life(p) <= delta {
            adj[i].push(nb + i);
        }
    }
    for (j, q) in b.iter().enumerate() {
        let left = na + j;
        if half_life(q) <= delta {
            adj[left].push(j);
        }
        adj[left].extend(nb..nb + na);
    }
    let mut match_right: Vec<Option<usize>> = vec![None; size];
    for left in 0..size {
        let mut seen = vec![false; size];
        if !augment(left, &adj, &mut seen, &mut match_right) {
            return false;
        }
    }
    true
}

fn augment(left: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
    for &r in &adj[left] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if match_right[r].is_none_or(|other| augment(other, adj, seen, match_right)) {
            match_right[r] = Some(left);
            return true;
        }
    }
    false
}
