//! Chains of `r`-cliques sharing an edge with their successor, and the
//! initial graphs built from them.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{EdgeId, Graph, MAX_VERTICES};

/// `e_0, H_1, e_1, …, H_T, e_T`: `cliques[i]` is `V(H_{i+1})`,
/// `shared_edges[i]` is `e_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub r: usize,
    pub n: usize,
    pub cliques: Vec<Vec<usize>>,
    pub shared_edges: Vec<EdgeId>,
}

impl Chain {
    /// Chain length `T`.
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Checks sizes and labels only: every clique has `r` distinct vertices
    /// below `n`, there are `T + 1` shared edges, and each `e_i` lies in the
    /// cliques it is meant to join. Sharing rules are left to the verifier.
    pub fn check_shape(&self) -> Result<()> {
        if self.r < 3 {
            return input(format!("chain clique size r={} below 3", self.r));
        }
        if self.n == 0 || self.n > MAX_VERTICES {
            return input(format!("chain vertex count {} out of range", self.n));
        }
        if self.cliques.is_empty() {
            return input("chain has no cliques");
        }
        if self.shared_edges.len() != self.cliques.len() + 1 {
            return input(format!(
                "chain of length {} needs {} shared edges, got {}",
                self.len(),
                self.len() + 1,
                self.shared_edges.len()
            ));
        }
        for (i, c) in self.cliques.iter().enumerate() {
            if c.len() != self.r {
                return input(format!("clique {} has {} vertices, expected {}", i + 1, c.len(), self.r));
            }
            let distinct: HashSet<_> = c.iter().collect();
            if distinct.len() != c.len() {
                return input(format!("clique {} repeats a vertex", i + 1));
            }
            if let Some(v) = c.iter().find(|&&v| v >= self.n) {
                return input(format!("clique {} uses vertex {v} >= n={}", i + 1, self.n));
            }
        }
        for (i, e) in self.shared_edges.iter().enumerate() {
            if e.v as usize >= self.n {
                return input(format!("shared edge e_{i} = {e:?} out of range"));
            }
        }
        Ok(())
    }

    /// Vertex sets sorted, for set-equality lookups.
    pub fn sorted_cliques(&self) -> HashSet<Vec<usize>> {
        self.cliques
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect()
    }

    /// `⋃ H_i^(2)`.
    pub fn union_graph(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for c in &self.cliques {
            for (i, &a) in c.iter().enumerate() {
                for &b in &c[i + 1..] {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Withheld edges `e_1..e_T`.
    pub fn withheld(&self) -> &[EdgeId] {
        &self.shared_edges[1..]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let chain: Chain = serde_json::from_str(text)?;
        chain.check_shape()?;
        Ok(chain)
    }
}

/// The initial infected set `⋃ H_i^(2) − {e_1, …, e_T}` of a chain.
#[derive(Clone, Debug)]
pub struct ChainGraph {
    pub graph: Graph,
    pub chain: Chain,
    pub withheld: Vec<EdgeId>,
}

impl ChainGraph {
    pub fn from_chain(chain: Chain) -> Result<Self> {
        chain.check_shape()?;
        let mut graph = chain.union_graph();
        let withheld = chain.withheld().to_vec();
        for e in &withheld {
            let (u, v) = e.endpoints();
            graph.remove_edge(u, v);
        }
        Ok(Self {
            graph,
            chain,
            withheld,
        })
    }

    /// Chain length `T`.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }
}
