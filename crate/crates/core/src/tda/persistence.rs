//! Boundary-matrix reduction over Z/2 and persistence diagrams.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::complex::FilteredComplex;
use super::Result;

/// One (dim, birth, death) pair; `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub dim: usize,
    pub birth: f64,
    #[serde(with = "death_format")]
    pub death: f64,
}

impl DiagramPoint {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

mod death_format {
    use serde::de::{self, Deserializer};
    use serde::{Deserialize, Serializer};

    pub fn serialize<S: Serializer>(death: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if death.is_infinite() {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(*death)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        match Raw::deserialize(de)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Text(s) => Err(de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// Multiset of diagram points kept in canonical (dim, birth, death) order, so
/// that derived equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
}

fn point_order(a: &DiagramPoint, b: &DiagramPoint) -> Ordering {
    a.dim
        .cmp(&b.dim)
        .then(a.birth.total_cmp(&b.birth))
        .then(a.death.total_cmp(&b.death))
}

impl PersistenceDiagram {
    pub fn from_points(mut points: Vec<DiagramPoint>) -> Self {
        points.sort_by(point_order);
        Self { points }
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.dim == dim)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.in_dim(dim).count()
    }

    /// Restriction to one dimension.
    pub fn restrict(&self, dim: usize) -> PersistenceDiagram {
        Self {
            points: self.in_dim(dim).copied().collect(),
        }
    }

    /// Rank of homology in `dim` at scale α: classes with birth ≤ α < death.
    pub fn betti_at(&self, dim: usize, alpha: f64) -> usize {
        self.in_dim(dim)
            .filter(|p| p.birth <= alpha && alpha < p.death)
            .count()
    }
}

fn xor_into(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

/// Standard column reduction. Zero-length pairs are dropped and unpaired
/// creators become essential points.
pub fn persistence(fc: &FilteredComplex) -> Result<PersistenceDiagram> {
    let index = fc.index_checked()?;
    let simplices = fc.simplices();
    let n = simplices.len();
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (s, _) in simplices {
        let mut col: Vec<usize> = s.boundary().map(|f| index[f.vertices()]).collect();
        col.sort_unstable();
        columns.push(col);
    }
    drop(index);

    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    let mut points = Vec::new();
    for j in 0..n {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match owner[low] {
                Some(k) => xor_into(&mut col, &columns[k]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            owner[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let (birth, death) = (simplices[low].1, simplices[j].1);
            if birth < death {
                points.push(DiagramPoint {
                    dim: simplices[low].0.dim(),
                    birth,
                    death,
                });
            }
        }
        columns[j] = col;
    }
    for (j, (s, value)) in simplices.iter().enumerate() {
        if !paired[j] {
            points.push(DiagramPoint {
                dim: s.dim(),
                birth: *value,
                death: f64::INFINITY,
            });
        }
    }
    Ok(PersistenceDiagram::from_points(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, geodesic_distances, GraphKind, GraphSpec};
    use crate::tda::complex::{vietoris_rips, Simplex};
    use crate::tda::TdaError;

    fn pt(dim: usize, birth: f64, death: f64) -> DiagramPoint {
        DiagramPoint { dim, birth, death }
    }

    #[test]
    fn rips_c4_diagram() {
        let g = generate(&GraphSpec::new(GraphKind::Cycle { m: 4, weight: None }, 0)).unwrap();
        let pd = persistence(&vietoris_rips(&geodesic_distances(&g), 2.0, 2).unwrap()).unwrap();
        assert_eq!(pd.restrict(1).points(), &[pt(1, 1.0, 2.0)]);
        let zero: Vec<_> = pd.in_dim(0).copied().collect();
        assert_eq!(
            zero,
            vec![pt(0, 0.0, 1.0), pt(0, 0.0, 1.0), pt(0, 0.0, 1.0), pt(0, 0.0, f64::INFINITY)]
        );
    }

    #[test]
    fn vertices_only_are_essential() {
        let fc = FilteredComplex::new((0..5).map(|v| (Simplex::new(vec![v]).unwrap(), 0.0)).collect());
        let pd = persistence(&fc).unwrap();
        assert_eq!(pd.count(0), 5);
        assert!(pd.points().iter().all(|p| p.is_essential()));
    }

    #[test]
    fn filled_triangle_is_contractible() {
        let mut items = Vec::new();
        for v in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]] {
            items.push((Simplex::new(v).unwrap(), 0.0));
        }
        let pd = persistence(&FilteredComplex::new(items)).unwrap();
        assert_eq!(pd.points(), &[pt(0, 0.0, f64::INFINITY)]);
    }

    #[test]
    fn missing_face_is_rejected() {
        let fc = FilteredComplex::new(vec![(Simplex::new(vec![0, 1]).unwrap(), 1.0)]);
        assert!(matches!(persistence(&fc), Err(TdaError::InvalidFiltration(_))));
    }

    #[test]
    fn json_round_trip_with_inf() {
        let pd = PersistenceDiagram::from_points(vec![pt(0, 0.0, f64::INFINITY), pt(1, 1.0, 2.0)]);
        let text = serde_json::to_string(&pd).unwrap();
        assert_eq!(
            text,
            r#"[{"dim":0,"birth":0.0,"death":"inf"},{"dim":1,"birth":1.0,"death":2.0}]"#
        );
        let back: PersistenceDiagram = serde_json::from_str(&text).unwrap();
        assert_eq!(back, pd);
    }
}
