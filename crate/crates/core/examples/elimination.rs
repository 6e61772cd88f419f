//! Vertex elimination on a random linearized DAG: greedy Markowitz order,
//! the optimal order, and the resulting Jacobian.

use combwork::elimination::{greedy_vertex_sequence, optimal_sequence, path_sum_jacobian, run_sequence, LinearizedDag, SearchCaps, SearchMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dag = LinearizedDag::random(2, 6, 2, 0.4, true, 21)?;
    println!("{} arcs over {} vertices", dag.arc_count(), dag.vertex_count());

    let (greedy, greedy_cost) = greedy_vertex_sequence(&dag);
    let (best, best_cost) = optimal_sequence(&dag, SearchMode::Vertex, SearchCaps::default())?;
    println!("greedy cost {greedy_cost}, optimal vertex cost {best_cost}");
    println!("optimal order: {best:?}");

    let done = run_sequence(&dag, &greedy)?;
    let jac = done.dag.bipartite_jacobian()?;
    let paths = path_sum_jacobian(&dag)?;
    for (row, oracle) in jac.iter().zip(&paths) {
        let fmt: Vec<String> = row.iter().map(|x| format!("{x:>8.4}")).collect();
        let agree = row.iter().zip(oracle).all(|(a, b)| (a - b).abs() < 1e-9);
        println!("[{}]  matches path sums: {agree}", fmt.join(" "));
    }
    Ok(())
}
