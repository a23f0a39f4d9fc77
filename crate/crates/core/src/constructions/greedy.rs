use serde::Serialize;

use crate::bitset::VertexSet;
use crate::chain::{Chain, ChainGraph};
use crate::error::{input, Error, Result};
use crate::graph::{EdgeId, Graph};

/// The constant for which the asymptotic argument goes through. Useless at
/// small `n`, where the cap falls below 2.
pub const DEFAULT_DEGREE_CAP_COEFF: f64 = 1.0 / 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyStop {
    /// Every vertex lies within distance two of the growing set.
    NoEligibleVertex,
    /// The least loaded eligible vertex would exceed the cap.
    DegreeCap,
}

#[derive(Clone, Debug)]
pub struct GreedyChain {
    pub chain_graph: ChainGraph,
    /// `⌊coeff·√n⌋`, the bound on how many sets may contain a vertex.
    pub degree_cap: usize,
    pub stop: GreedyStop,
    /// `(r−1)·r²·(Δ+1)²`, compared against `n/2` in the existence argument.
    pub slack_bound: f64,
    pub slack_bound_holds: bool,
}

/// Builds `A_t = e_{t−1} ∪ {w_1, …, w_{r−2}}` one vertex at a time, each `w`
/// taken outside the second neighbourhood (in the set system, counting the
/// partial `A_t`) of every current member, least loaded first, ties to the
/// smallest label. `e_t = {w_1, w_2}`.
///
/// `w_1` and `w_2` will also sit in `A_{t+1}`, so they need two units of
/// headroom under the cap, the rest one.
pub fn greedy_chain(n: usize, r: usize, degree_cap_coeff: f64) -> Result<GreedyChain> {
    if r < 5 {
        return input(format!("greedy chain needs r >= 5, got {r}"));
    }
    if n < r {
        return input(format!("greedy chain needs n >= r, got n={n}, r={r}"));
    }
    if !(degree_cap_coeff > 0.0 && degree_cap_coeff.is_finite()) {
        return input(format!("degree cap coefficient must be positive, got {degree_cap_coeff}"));
    }
    let cap_real = degree_cap_coeff * (n as f64).sqrt();
    let cap = cap_real.floor() as usize;

    let mut system = Graph::new(n);
    let mut load = vec![0usize; n];
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut shared = vec![EdgeId::new(0, 1)];

    let stop = loop {
        let prev = *shared.last().unwrap();
        let mut members = vec![prev.u as usize, prev.v as usize];
        system.add_edge(members[0], members[1]);
        let mut stopped = None;
        for i in 0..r - 2 {
            let blocked = second_neighbourhood(&system, &members);
            let headroom = if i < 2 { 2 } else { 1 };
            let pick = (0..n)
                .filter(|&v| !blocked.contains(v))
                .min_by_key(|&v| (load[v], v));
            match pick {
                None => stopped = Some(GreedyStop::NoEligibleVertex),
                Some(v) if load[v] + headroom > cap => stopped = Some(GreedyStop::DegreeCap),
                Some(v) => {
                    // The partial set counts as a set of the system.
                    for &m in &members {
                        system.add_edge(m, v);
                    }
                    members.push(v);
                    continue;
                }
            }
            break;
        }
        if let Some(stop) = stopped {
            break stop;
        }
        for &v in &members {
            load[v] += 1;
        }
        shared.push(EdgeId::new(members[2], members[3]));
        sets.push(members);
    };

    if sets.is_empty() {
        return Err(Error::Construction(format!(
            "no set fits: n={n}, r={r}, degree cap {cap_real:.3} ({stop:?})"
        )));
    }
    shared.truncate(sets.len() + 1);
    let slack_bound = (r - 1) as f64 * (r * r) as f64 * (cap_real + 1.0).powi(2);
    let chain_graph = ChainGraph::from_chain(Chain {
        r,
        n,
        cliques: sets,
        shared_edges: shared,
    })?;
    Ok(GreedyChain {
        chain_graph,
        degree_cap: cap,
        stop,
        slack_bound,
        slack_bound_holds: slack_bound < n as f64 / 2.0,
    })
}

/// Vertices within distance two of some member in `system`, members included.
fn second_neighbourhood(system: &Graph, members: &[usize]) -> VertexSet {
    let n = system.n();
    let mut first = VertexSet::from_vertices(n, members.iter().copied());
    for &m in members {
        for (a, b) in first.words_mut().iter_mut().zip(system.row(m)) {
            *a |= b;
        }
    }
    let mut second = first.clone();
    for v in first.iter() {
        for (a, b) in second.words_mut().iter_mut().zip(system.row(v)) {
            *a |= b;
        }
    }
    second
}
