//! Data-flow reversal of a chain under a checkpoint budget: store-all,
//! recompute-all and the binomial schedule.

use combwork::elimination::LinearizedDag;
use combwork::reversal::{chain_revolve, chain_revolve_cost, recompute_all_schedule, simulate_reversal, store_all_schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = 20;
    let chain = LinearizedDag::chain(p);
    let base = chain.n() + chain.m();

    let store = simulate_reversal(&chain, &store_all_schedule(&chain), base + p)?;
    let recompute = simulate_reversal(&chain, &recompute_all_schedule(&chain), base)?;
    println!("store-all:     cost {:>4}, peak memory {}", store.computational_cost, store.peak_persistent_memory);
    println!("recompute-all: cost {:>4}, peak memory {}", recompute.computational_cost, recompute.peak_persistent_memory);

    for c in 1..=5 {
        let schedule = chain_revolve(p, c);
        let report = simulate_reversal(&chain, &schedule, base + c)?;
        println!("{c} checkpoints: cost {:>4} (table {:>4}), peak {}", report.computational_cost, chain_revolve_cost(p, c), report.peak_persistent_memory);
    }
    Ok(())
}
