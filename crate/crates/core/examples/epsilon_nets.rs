//! Greedy ε-nets on a weighted random graph, checked against the three
//! defining conditions.

use combwork::graph::{check_epsilon_net, epsilon_net_greedy, finite_geodesic_distances, generate, GraphKind, GraphSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = GraphSpec::new(GraphKind::RandomConnected { n: 40, p: 0.05 }, 11);
    spec.weight_range = Some((0.5, 2.0));
    let g = generate(&spec)?;
    let d = finite_geodesic_distances(&g)?;
    println!("n = {}, |E| = {}, diameter = {:.3}", g.vertex_count(), g.edge_count(), d.diameter());

    for eps in [0.5, 1.0, 2.0, 4.0] {
        let net = epsilon_net_greedy(&g, eps, 11)?;
        let check = check_epsilon_net(&d, &net)?;
        println!("eps = {eps:>4}: {:>2} landmarks, sample {} sparse {} net {}", net.len(), check.is_sample, check.is_sparse, check.is_net);
    }
    Ok(())
}
