//! Cardinality-based s-t cuts on a 4-uniform hypergraph: exhaustive search,
//! the two-gadget flow network, and the No-Even-Split variant.

use combwork::hypergraph::{self, CutWeights, Hypergraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // two five-vertex clusters, s = 0 and t = 9, joined by three hyperedges
    let edges = vec![
        vec![0, 1, 2, 3],
        vec![0, 1, 2, 4],
        vec![0, 1, 3, 4],
        vec![0, 2, 3, 4],
        vec![5, 6, 7, 9],
        vec![5, 6, 8, 9],
        vec![5, 7, 8, 9],
        vec![6, 7, 8, 9],
        vec![1, 2, 5, 6],
        vec![3, 4, 7, 8],
        vec![2, 3, 4, 6],
    ];
    let h = Hypergraph::new(10, 0, 9, edges)?;

    for w2 in [1.0, 1.5, 2.0] {
        let w = CutWeights::four_uniform(1.0, w2)?;
        let brute = hypergraph::brute_force_min_cut(&h, &w, 20)?;
        let flow = hypergraph::gadget_min_cut_4uniform(&h, w2)?;
        println!("w2 = {w2}: brute {} via {:?}, flow {} via {:?}", brute.value, brute.side, flow.value, flow.side);
    }

    let lawler = hypergraph::lawler_min_cut(&h);
    println!("all-or-nothing (Lawler): {}", lawler.value);

    let (even, side) = hypergraph::no_even_split_min(&h, 20)?;
    println!("no 2-2 splits allowed: {even} hyperedges split 1-3, S = {side:?}");
    Ok(())
}
