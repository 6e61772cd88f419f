//! Combinatorial workbench.
//!
//! * [`graph`]: weighted graphs, geodesics, ε-nets and seeded generators.
//! * [`tda`]: Rips, Dowker and witness filtrations, Z/2 persistence, bottleneck distance.
//! * [`zero_forcing`]: contingent and leaky zero forcing.
//! * [`hypergraph`]: cardinality-based hypergraph s-t cuts and their flow reductions.
//! * [`elimination`]: vertex, front and back elimination on linearized DAGs.
//! * [`reversal`]: checkpointed data-flow reversal and binomial chain schedules.
//! * [`async_iter`]: spectra of block iterations with communication delays.
//! * [`expressiveness`]: exact match probabilities of binary coefficient matrices.

pub mod graph;
pub mod tda;
pub mod zero_forcing;
pub mod hypergraph;
pub mod elimination;
pub mod reversal;
pub mod async_iter;
pub mod expressiveness;
