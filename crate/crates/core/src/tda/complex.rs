//! Simplices, filtered complexes and the three constructions on a metric.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{Result, TdaError};
use crate::graph::DistanceMatrix;

/// Sorted, duplicate-free vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; fails on an empty list or repeated vertex.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() {
            return Err(TdaError::InvalidSimplex("empty vertex list".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(TdaError::InvalidSimplex(format!("repeated vertex in {vertices:?}")));
        }
        Ok(Self(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, in the order obtained by dropping vertex 0, 1, ...
    pub fn boundary(&self) -> impl Iterator<Item = Simplex> + '_ {
        let k = self.0.len();
        (0..if k > 1 { k } else { 0 }).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

/// Simplices with filtration values, in filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    simplices: Vec<(Simplex, f64)>,
}

fn canonical_order(a: &(Simplex, f64), b: &(Simplex, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then(a.0.dim().cmp(&b.0.dim()))
        .then_with(|| a.0.cmp(&b.0))
}

impl FilteredComplex {
    /// Sorts by (value, dimension, vertex list). Closure is checked later by
    /// [`FilteredComplex::validate`] and by persistence.
    pub fn new(mut simplices: Vec<(Simplex, f64)>) -> Self {
        simplices.sort_by(canonical_order);
        Self { simplices }
    }

    /// Keeps the given order as the filtration order.
    pub fn from_ordered(simplices: Vec<(Simplex, f64)>) -> Self {
        Self { simplices }
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[(Simplex, f64)] {
        &self.simplices
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, f64)> {
        self.simplices.iter().map(|(s, v)| (s, *v))
    }

    pub fn value_of(&self, simplex: &Simplex) -> Option<f64> {
        self.simplices.iter().find(|(s, _)| s == simplex).map(|&(_, v)| v)
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.iter().map(|(s, _)| s.dim()).max()
    }

    /// Subcomplex of simplices with value ≤ α, order preserved.
    pub fn snapshot(&self, alpha: f64) -> FilteredComplex {
        FilteredComplex {
            simplices: self
                .simplices
                .iter()
                .filter(|(_, v)| *v <= alpha)
                .cloned()
                .collect(),
        }
    }

    /// Alternating count of simplices with value ≤ α.
    pub fn euler_characteristic(&self, alpha: f64) -> i64 {
        self.simplices
            .iter()
            .filter(|(_, v)| *v <= alpha)
            .map(|(s, _)| if s.dim() % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// Position of every simplex; errors if a face is missing, appears later
    /// than a coface, or carries a larger value.
    pub(crate) fn index_checked(&self) -> Result<HashMap<&[usize], usize>> {
        let mut index: HashMap<&[usize], usize> = HashMap::with_capacity(self.simplices.len());
        for (pos, (s, value)) in self.simplices.iter().enumerate() {
            if !(value.is_finite() && *value >= 0.0) {
                return Err(TdaError::InvalidFiltration(format!(
                    "simplex {:?} has value {value}",
                    s.vertices()
                )));
            }
            if index.insert(s.vertices(), pos).is_some() {
                return Err(TdaError::InvalidFiltration(format!(
                    "simplex {:?} listed twice",
                    s.vertices()
                )));
            }
            for face in s.boundary() {
                match index.get(face.vertices()) {
                    None => {
                        return Err(TdaError::InvalidFiltration(format!(
                            "face {:?} of {:?} missing or ordered after it",
                            face.vertices(),
                            s.vertices()
                        )))
                    }
                    Some(&fp) if self.simplices[fp].1 > *value => {
                        return Err(TdaError::InvalidFiltration(format!(
                            "face {:?} enters after its coface {:?}",
                            face.vertices(),
                            s.vertices()
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(index)
    }

    pub fn validate(&self) -> Result<()> {
        self.index_checked().map(|_| ())
    }
}

fn sorted_unique(set: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&x| x >= n) {
        return Err(TdaError::VertexOutOfRange { vertex: bad, n });
    }
    Ok(v)
}

fn require_finite(d: &DistanceMatrix) -> Result<()> {
    if d.is_finite() {
        Ok(())
    } else {
        Err(TdaError::InfiniteDistance)
    }
}

/// Vietoris-Rips filtration: a simplex enters at the largest pairwise distance
/// among its vertices and is kept when that value is ≤ `alpha_max`.
pub fn vietoris_rips(d: &DistanceMatrix, alpha_max: f64, max_dim: usize) -> Result<FilteredComplex> {
    require_finite(d)?;
    let n = d.len();
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(max_dim + 1);
    fn extend(
        d: &DistanceMatrix,
        alpha_max: f64,
        max_size: usize,
        stack: &mut Vec<usize>,
        value: f64,
        out: &mut Vec<(Simplex, f64)>,
    ) {
        out.push((Simplex::from_sorted(stack.clone()), value));
        if stack.len() == max_size {
            return;
        }
        let last = *stack.last().expect("nonempty");
        for v in (last + 1)..d.len() {
            let nv = stack.iter().fold(value, |m, &u| m.max(d.get(u, v)));
            if nv <= alpha_max {
                stack.push(v);
                extend(d, alpha_max, max_size, stack, nv, out);
                stack.pop();
            }
        }
    }
    for v in 0..n {
        stack.push(v);
        extend(d, alpha_max, max_dim + 1, &mut stack, 0.0, &mut out);
        stack.pop();
    }
    Ok(FilteredComplex::new(out))
}

/// Visit every nonempty subset of `items` with at most `max_size` elements, in
/// lexicographic order, passing the running subset.
fn for_each_subset<F>(items: &[usize], max_size: usize, f: &mut F)
where
    F: FnMut(&[usize]),
{
    fn rec<F: FnMut(&[usize])>(items: &[usize], start: usize, max_size: usize, cur: &mut Vec<usize>, f: &mut F) {
        for i in start..items.len() {
            cur.push(items[i]);
            f(cur);
            if cur.len() < max_size {
                rec(items, i + 1, max_size, cur, f);
            }
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(max_size);
    rec(items, 0, max_size, &mut cur, f);
}

fn check_sets(d: &DistanceMatrix, witnesses: &[usize], landmarks: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    require_finite(d)?;
    let w = sorted_unique(witnesses, d.len())?;
    let l = sorted_unique(landmarks, d.len())?;
    if l.is_empty() {
        return Err(TdaError::EmptyLandmarks);
    }
    if w.is_empty() {
        return Err(TdaError::EmptyWitnesses);
    }
    Ok((w, l))
}

/// Dowker filtration on the landmarks: σ enters at
/// `min_w max_{l in σ} d(w, l)`.
pub fn dowker_complex(
    d: &DistanceMatrix,
    witnesses: &[usize],
    landmarks: &[usize],
    max_dim: usize,
) -> Result<FilteredComplex> {
    let (w, l) = check_sets(d, witnesses, landmarks)?;
    let mut out = Vec::new();
    // Running per-witness maxima, one frame per subset size.
    let mut frames: Vec<Vec<f64>> = vec![vec![0.0; w.len()]; max_dim + 2];
    for_each_subset(&l, max_dim + 1, &mut |sigma: &[usize]| {
        let k = sigma.len();
        let newest = sigma[k - 1];
        let (lower, upper) = frames.split_at_mut(k);
        let prev = &lower[k - 1];
        let cur = &mut upper[0];
        let mut value = f64::INFINITY;
        for (i, &wi) in w.iter().enumerate() {
            let base = if k == 1 { 0.0 } else { prev[i] };
            let m = base.max(d.get(wi, newest));
            cur[i] = m;
            value = value.min(m);
        }
        out.push((Simplex::from_sorted(sigma.to_vec()), value));
    });
    Ok(FilteredComplex::new(out))
}

/// Full witness filtration. The value of σ is the least α ≥ 0 at which every
/// face τ of σ has a witness `w` with `d(w, l) <= d(w, l') + α` for all
/// `l` in τ and `l'` in L∖τ.
pub fn witness_filtration(
    d: &DistanceMatrix,
    witnesses: &[usize],
    landmarks: &[usize],
    max_dim: usize,
) -> Result<FilteredComplex> {
    let (w, l) = check_sets(d, witnesses, landmarks)?;
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for_each_subset(&l, max_dim + 1, &mut |tau: &[usize]| subsets.push(tau.to_vec()));
    // Faces must be valued before their cofaces.
    subsets.sort_by_key(|t| t.len());
    let mut values: HashMap<Vec<usize>, f64> = HashMap::with_capacity(subsets.len());
    let mut out = Vec::with_capacity(subsets.len());
    for tau in subsets {
        let own = witness_threshold(d, &w, &l, &tau);
        let simplex = Simplex::from_sorted(tau);
        let inherited = simplex
            .boundary()
            .map(|f| values[f.vertices()])
            .fold(0.0, f64::max);
        let value = own.max(inherited);
        values.insert(simplex.vertices().to_vec(), value);
        out.push((simplex, value));
    }
    Ok(FilteredComplex::new(out))
}

/// Smallest α ≥ 0 for which τ itself (not its faces) has a witness.
fn witness_threshold(d: &DistanceMatrix, w: &[usize], l: &[usize], tau: &[usize]) -> f64 {
    let outside: Vec<usize> = l.iter().copied().filter(|x| !tau.contains(x)).collect();
    if outside.is_empty() {
        return 0.0;
    }
    let best = w
        .iter()
        .map(|&wi| {
            let far_in = tau.iter().map(|&x| d.get(wi, x)).fold(f64::NEG_INFINITY, f64::max);
            let near_out = outside.iter().map(|&x| d.get(wi, x)).fold(f64::INFINITY, f64::min);
            far_in - near_out
        })
        .fold(f64::INFINITY, f64::min);
    best.max(0.0)
}

/// Witness complex at a fixed α, with the filtration values it inherits.
pub fn witness_complex(
    d: &DistanceMatrix,
    witnesses: &[usize],
    landmarks: &[usize],
    alpha: f64,
    max_dim: usize,
) -> Result<FilteredComplex> {
    Ok(witness_filtration(d, witnesses, landmarks, max_dim)?.snapshot(alpha))
}
