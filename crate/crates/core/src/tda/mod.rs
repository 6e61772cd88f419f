//! Filtered complexes on graph metrics, Z/2 persistence and the landmark
//! experiments built on them.

pub mod bottleneck;
pub mod complex;
pub mod persistence;

use serde::Serialize;
use thiserror::Error;

pub use bottleneck::bottleneck_distance;
pub use complex::{dowker_complex, vietoris_rips, witness_complex, witness_filtration, FilteredComplex, Simplex};
pub use persistence::{persistence, DiagramPoint, PersistenceDiagram};

use crate::graph::{epsilon_net_greedy, finite_geodesic_distances, GraphError, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TdaError {
    #[error("distance matrix has infinite entries (disconnected graph)")]
    InfiniteDistance,
    #[error("landmark set is empty")]
    EmptyLandmarks,
    #[error("witness set is empty")]
    EmptyWitnesses,
    #[error("vertex {vertex} out of range for a metric on {n} points")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("essential classes in dimension {dim} differ in count ({left} vs {right})")]
    EssentialMismatch { dim: usize, left: usize, right: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T> = std::result::Result<T, TdaError>;

/// Cyclomatic number |E| - |V| + #components.
pub fn genus(g: &WeightedGraph) -> usize {
    g.edge_count() + g.component_count() - g.vertex_count()
}

/// One attempt of the genus-recovery check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenusAttempt {
    /// "diameter", "extended" or "subdivided".
    pub stage: &'static str,
    pub alpha_max: f64,
    pub vertex_count: usize,
    pub pd1_points: usize,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenusReport {
    pub genus: usize,
    pub attempts: Vec<GenusAttempt>,
}

impl GenusReport {
    pub fn first_try(&self) -> bool {
        self.attempts.first().is_some_and(|a| a.matches)
    }

    pub fn recovered(&self) -> bool {
        self.attempts.last().is_some_and(|a| a.matches)
    }
}

fn rips_pd1_count(g: &WeightedGraph, scale: f64) -> Result<(usize, f64)> {
    let d = finite_geodesic_distances(g)?;
    let alpha = d.diameter() * scale;
    let pd = persistence(&vietoris_rips(&d, alpha, 2)?)?;
    Ok((pd.count(1), alpha))
}

/// Compare the number of PD¹ points of the Rips filtration with the genus.
///
/// The first attempt runs at α_max = diameter. On a mismatch the filtration is
/// re-run at twice the diameter, and then on the graph with every edge split
/// into `subdivide` pieces (same metric graph, denser vertex sample). Short
/// cycles such as triangles are filled the moment their edges appear when only
/// graph vertices are sampled, so they leave no PD¹ point until subdivided.
pub fn genus_recovery(g: &WeightedGraph, subdivide: usize) -> Result<GenusReport> {
    let genus = genus(g);
    let mut attempts = Vec::new();
    let (count, alpha) = rips_pd1_count(g, 1.0)?;
    attempts.push(GenusAttempt {
        stage: "diameter",
        alpha_max: alpha,
        vertex_count: g.vertex_count(),
        pd1_points: count,
        matches: count == genus,
    });
    if count != genus {
        let (count, alpha) = rips_pd1_count(g, 2.0)?;
        attempts.push(GenusAttempt {
            stage: "extended",
            alpha_max: alpha,
            vertex_count: g.vertex_count(),
            pd1_points: count,
            matches: count == genus,
        });
        if count != genus && subdivide > 1 {
            let fine = g.subdivide(subdivide);
            let (count, alpha) = rips_pd1_count(&fine, 1.0)?;
            attempts.push(GenusAttempt {
                stage: "subdivided",
                alpha_max: alpha,
                vertex_count: fine.vertex_count(),
                pd1_points: count,
                matches: count == genus,
            });
        }
    }
    Ok(GenusReport { genus, attempts })
}

/// Landmark experiment: Dowker diagram of an ε-net against the full Rips
/// diagram, in dimension 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandmarkComparison {
    pub epsilon: f64,
    pub landmarks: Vec<usize>,
    pub genus: usize,
    pub dowker_pd1: usize,
    pub rips_pd1: usize,
    pub bottleneck: f64,
}

/// Witnesses are all vertices; landmarks come from the seeded greedy ε-net.
pub fn landmark_comparison(g: &WeightedGraph, epsilon: f64, seed: u64) -> Result<LandmarkComparison> {
    let d = finite_geodesic_distances(g)?;
    let net = epsilon_net_greedy(g, epsilon, seed)?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let dowker = persistence(&dowker_complex(&d, &all, &net.landmarks, 2)?)?;
    let rips = persistence(&vietoris_rips(&d, d.diameter(), 2)?)?;
    let bottleneck = bottleneck_distance(&dowker, &rips, 1)?;
    Ok(LandmarkComparison {
        epsilon,
        genus: genus(g),
        dowker_pd1: dowker.count(1),
        rips_pd1: rips.count(1),
        bottleneck,
        landmarks: net.landmarks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, GraphSpec};

    #[test]
    fn genus_examples() {
        let c7 = generate(&GraphSpec::new(GraphKind::Cycle { m: 7, weight: None }, 0)).unwrap();
        assert_eq!(genus(&c7), 1);
        let tree = generate(&GraphSpec::new(GraphKind::RandomTree { n: 9 }, 4)).unwrap();
        assert_eq!(genus(&tree), 0);
        // theta graph: poles 0 and 1, three paths of length 2
        let theta = WeightedGraph::unit(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap();
        assert_eq!(genus(&theta), 2);
    }

    #[test]
    fn triangle_needs_subdivision() {
        let tri = WeightedGraph::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let report = genus_recovery(&tri, 4).unwrap();
        assert!(!report.first_try());
        assert!(report.recovered());
        assert_eq!(report.attempts.len(), 3);
    }

    #[test]
    fn c4_recovers_directly() {
        let c4 = WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let report = genus_recovery(&c4, 4).unwrap();
        assert!(report.first_try());
        assert_eq!(report.attempts.len(), 1);
    }
}
