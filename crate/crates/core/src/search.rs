//! Maximum stabilization time over all graphs on `n` vertices, exactly for
//! tiny `n` and as a sampled lower bound beyond.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{
    adjacency_string, code_string, graph_from_code, pair_count, PermutationTable,
};
use crate::constructions::{disjoint_chain, greedy_chain, k4_chain, path_graph};
use crate::engine::{run_with, RunOptions};
use crate::error::{input, Error, Result};
use crate::graph::Graph;

/// Largest `n` for [`exact_max_time`].
pub const EXACT_MAX_VERTICES: usize = 7;

/// Edge densities tried by [`sampled_max_time`].
pub const SAMPLE_DENSITIES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

const RANGE_LEN: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub r: usize,
    pub max_time: usize,
    /// Sorted. Canonical forms for exact searches, plain adjacency strings
    /// for sampled ones.
    pub witness_graphs: Vec<String>,
    pub graphs_scanned: u64,
    /// Isomorphism classes visited; absent when dedup was off.
    pub dedup_classes: Option<u64>,
    /// False when `max_time` is only a lower bound.
    pub exhaustive: bool,
}

impl SearchResult {
    pub const CSV_HEADER: &'static str = "n,r,max_time,classes,wall_seconds";

    pub fn csv_row(&self, wall_seconds: f64) -> String {
        let classes = self.dedup_classes.map(|c| c.to_string()).unwrap_or_default();
        format!("{},{},{},{},{:.3}", self.n, self.r, self.max_time, classes, wall_seconds)
    }
}

/// Best time and the codes reaching it; merging is associative and
/// commutative.
#[derive(Default)]
struct Best {
    time: usize,
    codes: BTreeSet<u64>,
}

impl Best {
    fn offer(&mut self, time: usize, code: u64) {
        if time > self.time {
            self.time = time;
            self.codes.clear();
        }
        if time == self.time {
            self.codes.insert(code);
        }
    }

    fn merge(mut self, mut other: Best) -> Best {
        if other.time > self.time {
            return other;
        }
        if other.time == self.time {
            self.codes.append(&mut other.codes);
        }
        self
    }
}

fn stabilization_time(g: Graph, r: usize) -> usize {
    let opts = RunOptions {
        max_steps: None,
        record_trace: false,
    };
    run_with(g, r, opts)
        .expect("r validated by caller")
        .result
        .stabilization_time
}

fn check_args(n: usize, r: usize) -> Result<()> {
    if r < 3 {
        return input(format!("r must be at least 3, got {r}"));
    }
    if n == 0 {
        return input("n must be at least 1");
    }
    Ok(())
}

/// `M_r(n)` by running the process on every graph on `0..n`, or on one
/// representative per isomorphism class when `dedup` is set.
pub fn exact_max_time(n: usize, r: usize, dedup: bool) -> Result<SearchResult> {
    check_args(n, r)?;
    if n > EXACT_MAX_VERTICES {
        return Err(Error::Capability {
            what: "exact maximum-time search",
            cap: format!("n = {EXACT_MAX_VERTICES}"),
            got: format!("n = {n}"),
        });
    }
    let l = pair_count(n);
    let total = 1u64 << l;
    let table = PermutationTable::new(n)?;

    let (best, classes) = if dedup {
        let reps = class_representatives(&table, total);
        let best = reps
            .par_iter()
            .fold(Best::default, |mut best, &code| {
                best.offer(stabilization_time(graph_from_code(n, code), r), code);
                best
            })
            .reduce(Best::default, Best::merge);
        (best, Some(reps.len() as u64))
    } else {
        let ranges = total.div_ceil(RANGE_LEN);
        let best = (0..ranges)
            .into_par_iter()
            .map(|k| {
                let mut best = Best::default();
                for code in k * RANGE_LEN..((k + 1) * RANGE_LEN).min(total) {
                    best.offer(stabilization_time(graph_from_code(n, code), r), code);
                }
                best
            })
            .reduce(Best::default, Best::merge);
        (best, None)
    };

    let witnesses: BTreeSet<String> = best
        .codes
        .iter()
        .map(|&c| code_string(table.canonical_code(c), l))
        .collect();
    Ok(SearchResult {
        n,
        r,
        max_time: best.time,
        witness_graphs: witnesses.into_iter().collect(),
        graphs_scanned: classes.unwrap_or(total),
        dedup_classes: classes,
        exhaustive: true,
    })
}

/// Smallest code of every orbit, in increasing order. Scanning codes upward,
/// the first unseen member of an orbit is its minimum.
fn class_representatives(table: &PermutationTable, total: u64) -> Vec<u64> {
    let mut seen = vec![0u64; total.div_ceil(64) as usize];
    let mut reps = Vec::new();
    for code in 0..total {
        if seen[(code / 64) as usize] >> (code % 64) & 1 == 1 {
            continue;
        }
        reps.push(code);
        for image in table.orbit(code) {
            seen[(image / 64) as usize] |= 1 << (image % 64);
        }
    }
    reps
}

/// Lower bound on `M_r(n)`: the best of `samples` random graphs per density
/// in [`SAMPLE_DENSITIES`] and of every construction that fits on `n`
/// vertices. Reproducible for a fixed seed.
pub fn sampled_max_time(n: usize, r: usize, samples: usize, seed: u64) -> Result<SearchResult> {
    check_args(n, r)?;
    let mut candidates: Vec<Graph> = constructions_on(n, r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &p in &SAMPLE_DENSITIES {
        for _ in 0..samples {
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        g.add_edge(u, v);
                    }
                }
            }
            candidates.push(g);
        }
    }
    let scanned = candidates.len() as u64;
    let timed: Vec<(usize, String)> = candidates
        .into_par_iter()
        .map(|g| {
            let s = adjacency_string(&g);
            (stabilization_time(g, r), s)
        })
        .collect();
    let max_time = timed.iter().map(|(t, _)| *t).max().unwrap_or(0);
    let witnesses: BTreeSet<String> = timed
        .into_iter()
        .filter(|(t, _)| *t == max_time)
        .map(|(_, s)| s)
        .collect();
    Ok(SearchResult {
        n,
        r,
        max_time,
        witness_graphs: witnesses.into_iter().collect(),
        graphs_scanned: scanned,
        dedup_classes: None,
        exhaustive: false,
    })
}

fn constructions_on(n: usize, r: usize) -> Vec<Graph> {
    let mut out = vec![Graph::new(n)];
    if let Ok(g) = path_graph(n) {
        out.push(g);
    }
    if let Ok(g) = k4_chain(n) {
        out.push(g);
    }
    if r >= 4 && n >= r {
        let t = (n - 2) / (r - 2);
        if let Ok(cg) = disjoint_chain(r, t) {
            out.push(pad(&cg.graph, n));
        }
    }
    if r >= 5 {
        if let Ok(gc) = greedy_chain(n, r, 1.0) {
            out.push(gc.chain_graph.graph);
        }
    }
    out
}

fn pad(g: &Graph, n: usize) -> Graph {
    let mut out = Graph::new(n);
    for e in g.edges() {
        let (u, v) = e.endpoints();
        out.add_edge(u, v);
    }
    out
}
