use crate::chain::{Chain, ChainGraph};
use crate::error::{input, Result};
use crate::graph::{EdgeId, Graph};

/// The path `0 – 1 – ⋯ – (n−1)`.
pub fn path_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return input(format!("path needs n >= 2, got {n}"));
    }
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
}

/// A graph on `n` vertices whose `K_4`-process takes exactly `n − 3` steps.
///
/// Starts from `K_4^-` missing `{2,3}`. Each new vertex `z` is joined to an
/// edge `{x,y}` that the current graph only receives at its last step; every
/// edge from `z` then arrives one step later, so `{z, w}` is the next such edge.
pub fn k4_chain(n: usize) -> Result<Graph> {
    if n < 4 {
        return input(format!("k4 chain needs n >= 4, got {n}"));
    }
    let mut g = Graph::new(n);
    for (u, v) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)] {
        g.add_edge(u, v);
    }
    let (mut x, mut y) = (2, 3);
    for z in 4..n {
        g.add_edge(x, z);
        g.add_edge(y, z);
        let w = (0..).find(|&w| w != x && w != y && w != z).unwrap();
        (x, y) = (z, w);
    }
    Ok(g)
}

/// `t` cliques of size `r` where consecutive cliques share one edge and
/// nothing else; `n = 2 + t(r−2)`.
///
/// `e_0 = {0,1}`; `e_i` is the first two vertices new to `H_i`.
pub fn disjoint_chain(r: usize, t: usize) -> Result<ChainGraph> {
    if r < 4 {
        return input(format!("disjoint chain needs r >= 4, got {r}"));
    }
    if t == 0 {
        return input("disjoint chain needs t >= 1");
    }
    let n = 2 + t * (r - 2);
    let mut cliques = Vec::with_capacity(t);
    let mut shared = vec![EdgeId::new(0, 1)];
    for i in 0..t {
        let prev = shared[i];
        let first = 2 + i * (r - 2);
        let mut c = vec![prev.u as usize, prev.v as usize];
        c.extend(first..first + r - 2);
        cliques.push(c);
        shared.push(EdgeId::new(first, first + 1));
    }
    ChainGraph::from_chain(Chain {
        r,
        n,
        cliques,
        shared_edges: shared,
    })
}
