//! Contingent zero forcing: minimum sets for small graphs and the tree
//! construction, cross-checked with the leaky formulation.

use combwork::graph::{generate, GraphKind, GraphSpec};
use combwork::zero_forcing::{check, minimum, tree_contingent_set, Variant, DEFAULT_SEARCH_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let petersen_like = generate(&GraphSpec::new(GraphKind::RandomConnected { n: 9, p: 0.3 }, 5))?;
    for k in 0..3 {
        let c = minimum(&petersen_like, k, Variant::Contingent, DEFAULT_SEARCH_CAP)?;
        let l = minimum(&petersen_like, k, Variant::Leaky, DEFAULT_SEARCH_CAP)?;
        println!("k = {k}: contingent {:?} (size {}), leaky size {}", c.set, c.size, l.size);
    }

    let tree = generate(&GraphSpec::new(GraphKind::RandomTree { n: 14 }, 8))?;
    for k in 1..=2 {
        let z = tree_contingent_set(&tree, k)?;
        let v = check(&tree, &z, k, Variant::Contingent)?;
        println!("tree, k = {k}: constructed {:?}, verified {}", z, v.verified);
    }
    Ok(())
}
