//! Synchronous `K_r`-bootstrap percolation on graphs: the process itself,
//! extremal constructions, chain verification and maximum-time search.

mod error;

pub mod bitset;
pub mod canon;
pub mod chain;
pub mod constructions;
pub mod engine;
pub mod graph;
pub mod search;
pub mod verify;

pub use bitset::VertexSet;
pub use chain::{Chain, ChainGraph};
pub use engine::{run, run_with, step, Process, RunOptions, RunOutcome, RunReport, RunResult, Trace};
pub use error::{Error, Result};
pub use graph::{EdgeId, Graph};
