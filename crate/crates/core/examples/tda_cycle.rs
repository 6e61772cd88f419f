//! Persistence of a cycle, Rips against Dowker on landmarks, and the
//! genus-recovery stages on a denser graph.

use combwork::graph::{finite_geodesic_distances, generate, GraphKind, GraphSpec};
use combwork::tda::{bottleneck_distance, genus_recovery, landmark_comparison, persistence, vietoris_rips};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cycle = generate(&GraphSpec::new(GraphKind::Cycle { m: 12, weight: None }, 0))?;
    let d = finite_geodesic_distances(&cycle)?;
    let rips = persistence(&vietoris_rips(&d, d.diameter(), 2)?)?;
    for p in rips.in_dim(1) {
        println!("C12 H1 class: born {} dies {}", p.birth, p.death);
    }

    let cmp = landmark_comparison(&cycle, 2.0, 0)?;
    println!(
        "landmarks {:?}: dowker PD1 {} points, rips PD1 {} points, bottleneck {:.3}",
        cmp.landmarks, cmp.dowker_pd1, cmp.rips_pd1, cmp.bottleneck
    );
    println!("self-distance: {}", bottleneck_distance(&rips, &rips, 1)?);

    let g = generate(&GraphSpec::new(GraphKind::RandomConnected { n: 10, p: 0.25 }, 3))?;
    let report = genus_recovery(&g, 4)?;
    println!("random graph genus {}", report.genus);
    for a in &report.attempts {
        println!("  {:<10} alpha_max {:>6.2} on {:>3} vertices: {} PD1 points, match {}", a.stage, a.alpha_max, a.vertex_count, a.pd1_points, a.matches);
    }
    Ok(())
}
