//! Initial graphs with long or extremal stabilization times.

mod basic;
mod greedy;
mod random;

pub use basic::{disjoint_chain, k4_chain, path_graph};
pub use greedy::{greedy_chain, GreedyChain, GreedyStop, DEFAULT_DEGREE_CAP_COEFF};
pub use random::{
    random_chain, ChainFailure, Condition, RandomChainConfig, RandomChainOutcome, DEFAULT_EPSILON,
};

/// `(r − 2) / (C(r,2) − 2)`, the exponent loss in the best known lower bound
/// `n^{2 − α_r}` on the running time for `r >= 5`. Reported, never used.
pub fn alpha_r(r: usize) -> f64 {
    let pairs = r * (r - 1) / 2;
    (r as f64 - 2.0) / (pairs as f64 - 2.0)
}
