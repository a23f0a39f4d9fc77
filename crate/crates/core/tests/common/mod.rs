//! Slow, obviously-correct reference implementations used as test oracles.
#![allow(dead_code)]

use krboot::{Chain, EdgeId, Graph};
use rand::Rng;

pub type Adj = Vec<Vec<bool>>;

pub fn adjacency(g: &Graph) -> Adj {
    let n = g.n();
    (0..n)
        .map(|u| (0..n).map(|v| g.has_edge(u, v)).collect())
        .collect()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn is_clique(adj: &Adj, s: &[usize]) -> bool {
    s.iter()
        .enumerate()
        .all(|(i, &a)| s[i + 1..].iter().all(|&b| adj[a][b]))
}

/// Non-edges `uv` such that some `r−2` common neighbours form a clique.
pub fn step_oracle(adj: &Adj, r: usize) -> Vec<EdgeId> {
    let n = adj.len();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if adj[u][v] {
                continue;
            }
            let hit = subsets(n, r - 2).into_iter().any(|s| {
                !s.contains(&u)
                    && !s.contains(&v)
                    && s.iter().all(|&w| adj[u][w] && adj[v][w])
                    && is_clique(adj, &s)
            });
            if hit {
                out.push(EdgeId::new(u, v));
            }
        }
    }
    out
}

/// Stabilization time and per-step additions by repeated oracle steps.
pub fn run_oracle(adj: &Adj, r: usize) -> (usize, Vec<Vec<EdgeId>>) {
    let mut adj = adj.clone();
    let mut steps = Vec::new();
    loop {
        let new = step_oracle(&adj, r);
        if new.is_empty() {
            return (steps.len(), steps);
        }
        for e in &new {
            let (u, v) = e.endpoints();
            adj[u][v] = true;
            adj[v][u] = true;
        }
        steps.push(new);
    }
}

/// Floyd–Warshall.
pub fn diameter_oracle(adj: &Adj) -> Option<usize> {
    let n = adj.len();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for v in 0..n {
            if adj[u][v] {
                d[u][v] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let m = d.iter().flatten().copied().max().unwrap_or(0);
    (m < INF).then_some(m)
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

fn covered(cliques: &[Vec<usize>], a: usize, b: usize) -> bool {
    cliques.iter().any(|c| c.contains(&a) && c.contains(&b))
}

/// First `r`-set with at least `C(r,2) − 1` pairs inside some clique that is
/// not itself a clique.
pub fn external_krm_oracle(chain: &Chain) -> Option<Vec<usize>> {
    let r = chain.r;
    let threshold = r * (r - 1) / 2 - 1;
    let cliques: Vec<Vec<usize>> = chain.cliques.iter().map(|c| sorted(c)).collect();
    subsets(chain.n, r).into_iter().find(|b| {
        let count = subsets(r, 2)
            .iter()
            .filter(|p| covered(&cliques, b[p[0]], b[p[1]]))
            .count();
        count >= threshold && !cliques.contains(b)
    })
}

/// 0 safe, 1 dangerous, 2 deadly, with the lexicographically first witness
/// of that strength.
pub fn classify_oracle(adj: &Adj, chain: &Chain, a: &[usize]) -> (u8, Option<Vec<usize>>) {
    let cliques: Vec<Vec<usize>> = chain.cliques.iter().map(|c| sorted(c)).collect();
    let mut best: (u8, Option<Vec<usize>>) = (0, None);
    for b in subsets(adj.len(), chain.r) {
        if !a.iter().all(|v| b.contains(v)) || cliques.contains(&b) {
            continue;
        }
        let missing = subsets(b.len(), 2)
            .iter()
            .filter(|p| {
                let (x, y) = (b[p[0]], b[p[1]]);
                !adj[x][y] && !(a.contains(&x) && a.contains(&y))
            })
            .count();
        let level = match missing {
            0 => 2,
            1 => 1,
            _ => 0,
        };
        if level > best.0 {
            best = (level, Some(b));
        }
    }
    best
}

/// Largest clique containing both `u` and `v`, by exhaustion.
pub fn max_clique_through(adj: &Adj, u: usize, v: usize) -> usize {
    let n = adj.len();
    if !adj[u][v] {
        return 0;
    }
    let others: Vec<usize> = (0..n).filter(|&w| w != u && w != v).collect();
    let mut best = 2;
    for mask in 0u32..1 << others.len() {
        let mut s = vec![u, v];
        s.extend((0..others.len()).filter(|i| mask >> i & 1 == 1).map(|i| others[i]));
        if s.len() > best && is_clique(adj, &s) {
            best = s.len();
        }
    }
    best
}

pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// A chain-shaped object: random `r`-cliques on `0..n` with shared edges
/// taken from intersections when possible. Not necessarily valid.
pub fn random_chain_shape(n: usize, r: usize, t: usize, rng: &mut impl Rng) -> Chain {
    let pick = |rng: &mut dyn rand::RngCore| -> Vec<usize> {
        rand::seq::index::sample(rng, n, r).into_vec()
    };
    let cliques: Vec<Vec<usize>> = (0..t).map(|_| pick(rng)).collect();
    let mut shared = Vec::with_capacity(t + 1);
    for i in 0..=t {
        let pool: Vec<usize> = if i == 0 {
            cliques[0].clone()
        } else if i == t {
            cliques[t - 1].clone()
        } else {
            let common: Vec<usize> = cliques[i - 1]
                .iter()
                .copied()
                .filter(|v| cliques[i].contains(v))
                .collect();
            if common.len() >= 2 {
                common
            } else {
                cliques[i].clone()
            }
        };
        let idx = rand::seq::index::sample(rng, pool.len(), 2).into_vec();
        shared.push(EdgeId::new(pool[idx[0]], pool[idx[1]]));
    }
    Chain {
        r,
        n,
        cliques,
        shared_edges: shared,
    }
}

/// Verdict of a classify report as the oracle's level.
pub fn level(v: krboot::verify::Verdict) -> u8 {
    match v {
        krboot::verify::Verdict::Safe => 0,
        krboot::verify::Verdict::Dangerous => 1,
        krboot::verify::Verdict::Deadly => 2,
    }
}
