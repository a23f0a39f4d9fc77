//! Checkers for chains: validity, goodness (no external `K_r^-`), dangerous
//! and deadly vertex sets, and the external-triangle rule for set systems.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::bitset::{popcount, VertexSet};
use crate::chain::Chain;
use crate::error::{input, Error, Result};
use crate::graph::{EdgeId, Graph};

/// Vertex cap for the all-`r`-subsets oracle.
pub const EXHAUSTIVE_MAX_VERTICES: usize = 12;

/// Depth-first enumeration of `r`-sets `B ⊇ seed` whose non-edges (edges
/// inside the seed excepted) number at most `budget`. Extras are added in
/// increasing label order, so for a fixed seed the sets arrive in
/// lexicographic order.
pub(crate) struct NearCliques<'a> {
    g: &'a Graph,
    r: usize,
    budget: usize,
}

impl<'a> NearCliques<'a> {
    pub(crate) fn new(g: &'a Graph, r: usize, budget: usize) -> Self {
        Self { g, r, budget }
    }

    pub(crate) fn for_each<F>(&self, seed: &[usize], visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize], usize) -> ControlFlow<()>,
    {
        let mut members = seed.to_vec();
        let mut in_b = VertexSet::from_vertices(self.g.n(), seed.iter().copied());
        self.dfs(&mut members, &mut in_b, 0, 0, visit)
    }

    fn dfs<F>(
        &self,
        members: &mut Vec<usize>,
        in_b: &mut VertexSet,
        missing: usize,
        min_label: usize,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[usize], usize) -> ControlFlow<()>,
    {
        let g = self.g;
        if members.len() == self.r {
            let mut b = members.clone();
            b.sort_unstable();
            return visit(&b, missing);
        }
        let need = self.r - members.len();
        let slack = self.budget - missing;
        let mut pool = if members.is_empty() || members.len() <= slack {
            VertexSet::full(g.n())
        } else if slack == 0 {
            let mut p = VertexSet::full(g.n());
            for &s in members.iter() {
                for (a, b) in p.words_mut().iter_mut().zip(g.row(s)) {
                    *a &= b;
                }
            }
            p
        } else {
            let mut p = VertexSet::empty(g.n());
            for &s in members.iter() {
                for (a, b) in p.words_mut().iter_mut().zip(g.row(s)) {
                    *a |= b;
                }
            }
            p
        };
        pool.difference_with(in_b);
        let words = pool.words_mut();
        for (w, word) in words.iter_mut().enumerate() {
            let base = w * 64;
            if base + 64 <= min_label {
                *word = 0;
            } else if base < min_label {
                *word &= u64::MAX << (min_label - base);
            } else {
                break;
            }
        }
        if popcount(pool.as_words()) < need {
            return ControlFlow::Continue(());
        }
        let min_degree = (self.r - 1).saturating_sub(self.budget);
        let candidates: Vec<usize> = pool.iter().collect();
        for x in candidates {
            if g.degree(x) < min_degree {
                continue;
            }
            let adjacent = members.iter().filter(|&&s| g.has_edge(s, x)).count();
            let added = members.len() - adjacent;
            if missing + added > self.budget {
                continue;
            }
            members.push(x);
            in_b.insert(x);
            let flow = self.dfs(members, in_b, missing + added, x + 1, visit);
            members.pop();
            in_b.remove(x);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn binom2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Whether `chain` is a `K_r`-chain with its listed shared edges: cliques
/// are edge-disjoint except consecutive ones, which share exactly the edge
/// `e_i`; `e_0` and `e_T` are further edges of the end cliques; all `e_i`
/// are distinct.
pub fn is_valid_chain(chain: &Chain) -> Result<bool> {
    chain.check_shape()?;
    let t = chain.len();
    let mut owners: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (i, c) in chain.cliques.iter().enumerate() {
        for (k, &a) in c.iter().enumerate() {
            for &b in &c[k + 1..] {
                owners.entry(EdgeId::new(a, b)).or_default().push(i);
            }
        }
    }
    let mut shared_with_next = vec![0usize; t];
    for (e, cs) in &owners {
        match cs.as_slice() {
            [_] => {}
            &[i, j] if j == i + 1 => {
                if chain.shared_edges[j] != *e {
                    return Ok(false);
                }
                shared_with_next[i] += 1;
            }
            _ => return Ok(false),
        }
    }
    if shared_with_next[..t - 1].iter().any(|&c| c != 1) {
        return Ok(false);
    }
    let e = &chain.shared_edges;
    let distinct: HashSet<_> = e.iter().collect();
    if distinct.len() != e.len() {
        return Ok(false);
    }
    let inside = |edge: EdgeId, clique: &[usize]| {
        clique.contains(&(edge.u as usize)) && clique.contains(&(edge.v as usize))
    };
    Ok(inside(e[0], &chain.cliques[0]) && inside(e[t], &chain.cliques[t - 1]))
}

/// First `r`-set `B` (lexicographically) that spans at least
/// `C(r,2) − 1` edges of the chain union and is not one of the cliques.
/// `None` means the chain is good.
pub fn find_external_kr_minus(chain: &Chain) -> Result<Option<Vec<usize>>> {
    chain.check_shape()?;
    let union = chain.union_graph();
    let cliques = chain.sorted_cliques();
    let mut found = None;
    let _ = NearCliques::new(&union, chain.r, 1).for_each(&[], &mut |b, _| {
        if cliques.contains(b) {
            ControlFlow::Continue(())
        } else {
            found = Some(b.to_vec());
            ControlFlow::Break(())
        }
    });
    Ok(found)
}

/// All-`r`-subsets version of [`find_external_kr_minus`], for `n <= 12`.
pub fn find_external_kr_minus_exhaustive(chain: &Chain) -> Result<Option<Vec<usize>>> {
    chain.check_shape()?;
    if chain.n > EXHAUSTIVE_MAX_VERTICES {
        return Err(Error::Capability {
            what: "exhaustive external K_r^- scan",
            cap: format!("n = {EXHAUSTIVE_MAX_VERTICES}"),
            got: format!("n = {}", chain.n),
        });
    }
    let union = chain.union_graph();
    let cliques = chain.sorted_cliques();
    let threshold = binom2(chain.r) - 1;
    let mut b: Vec<usize> = (0..chain.r).collect();
    loop {
        let edges = b
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| b[i + 1..].iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| union.has_edge(x, y))
            .count();
        if edges >= threshold && !cliques.contains(&b) {
            return Ok(Some(b));
        }
        if !next_combination(&mut b, chain.n) {
            return Ok(None);
        }
    }
}

/// Advances a sorted `k`-subset of `0..n` to its lexicographic successor.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Safe,
    Dangerous,
    Deadly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DangerReport {
    pub subject: Vec<usize>,
    /// Length of the chain the graph was checked against.
    pub time_label: usize,
    pub verdict: Verdict,
    pub witness: Option<Vec<usize>>,
}

/// Looks for an `r`-set `B ⊃ A`, not a chain clique, that is complete
/// (deadly) or misses one edge (dangerous) in `g ∪ K_A`.
///
/// The witness is the lexicographically first `B` of the strongest verdict.
pub fn classify_set(g: &Graph, chain: &Chain, a: &[usize]) -> Result<DangerReport> {
    let cliques = chain.sorted_cliques();
    classify_with(g, chain.r, &cliques, chain.len(), a)
}

pub(crate) fn classify_with(
    g: &Graph,
    r: usize,
    cliques: &HashSet<Vec<usize>>,
    time_label: usize,
    a: &[usize],
) -> Result<DangerReport> {
    if a.len() < 2 || a.len() >= r {
        return input(format!("|A| = {} outside 2..={}", a.len(), r - 1));
    }
    let mut subject = a.to_vec();
    subject.sort_unstable();
    subject.dedup();
    if subject.len() != a.len() {
        return input("A repeats a vertex");
    }
    if let Some(v) = subject.iter().find(|&&v| v >= g.n()) {
        return input(format!("vertex {v} out of range for n={}", g.n()));
    }
    let mut deadly = None;
    let mut dangerous = None;
    let _ = NearCliques::new(g, r, 1).for_each(&subject, &mut |b, missing| {
        if cliques.contains(b) {
            return ControlFlow::Continue(());
        }
        if missing == 0 {
            deadly = Some(b.to_vec());
            return ControlFlow::Break(());
        }
        if dangerous.is_none() {
            dangerous = Some(b.to_vec());
        }
        ControlFlow::Continue(())
    });
    let (verdict, witness) = match (deadly, dangerous) {
        (Some(b), _) => (Verdict::Deadly, Some(b)),
        (None, Some(b)) => (Verdict::Dangerous, Some(b)),
        (None, None) => (Verdict::Safe, None),
    };
    Ok(DangerReport {
        subject,
        time_label,
        verdict,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cover {
    NotCovered,
    SimplyCovered,
    /// All three pairs covered, no single set holds the triple.
    Violation,
}

/// How the set system covers the triangle on `triple`.
pub fn covers_simply(sets: &[Vec<usize>], triple: [usize; 3]) -> Cover {
    let [u, v, w] = triple;
    let holds = |s: &Vec<usize>, x: usize, y: usize| s.contains(&x) && s.contains(&y);
    let pairs = [(u, v), (u, w), (v, w)];
    if !pairs.iter().all(|&(x, y)| sets.iter().any(|s| holds(s, x, y))) {
        return Cover::NotCovered;
    }
    if sets.iter().any(|s| s.contains(&u) && s.contains(&v) && s.contains(&w)) {
        Cover::SimplyCovered
    } else {
        Cover::Violation
    }
}

/// Pair-to-sets index for bulk cover queries.
pub struct SetSystemIndex {
    n: usize,
    union: Graph,
    owners: HashMap<EdgeId, Vec<usize>>,
}

impl SetSystemIndex {
    pub fn new(n: usize, sets: &[Vec<usize>]) -> Self {
        let mut union = Graph::new(n);
        let mut owners: HashMap<EdgeId, Vec<usize>> = HashMap::new();
        for (i, s) in sets.iter().enumerate() {
            for (k, &a) in s.iter().enumerate() {
                for &b in &s[k + 1..] {
                    union.add_edge(a, b);
                    owners.entry(EdgeId::new(a, b)).or_default().push(i);
                }
            }
        }
        Self { n, union, owners }
    }

    pub fn cover(&self, [u, v, w]: [usize; 3]) -> Cover {
        if !(self.union.has_edge(u, v) && self.union.has_edge(u, w) && self.union.has_edge(v, w)) {
            return Cover::NotCovered;
        }
        let uv = &self.owners[&EdgeId::new(u, v)];
        let uw = &self.owners[&EdgeId::new(u, w)];
        if uv.iter().any(|i| uw.contains(i)) {
            Cover::SimplyCovered
        } else {
            Cover::Violation
        }
    }

    /// Brute force over every triple of vertices.
    pub fn count_violations(&self) -> usize {
        let n = self.n;
        let mut count = 0;
        for u in 0..n {
            for v in u + 1..n {
                if !self.union.has_edge(u, v) {
                    continue;
                }
                for w in v + 1..n {
                    if self.cover([u, v, w]) == Cover::Violation {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// The four set-system conditions behind the deterministic construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetSystemReport {
    /// `e_i = A_i ∩ A_{i+1}` for interior `i`.
    pub consecutive_share_edge: bool,
    /// `|A_i ∩ A_j| <= 1` whenever `|i − j| >= 2`.
    pub distant_sets_nearly_disjoint: bool,
    pub external_triangles: usize,
    pub max_degree: usize,
    pub degree_cap: usize,
}

impl SetSystemReport {
    pub fn all_hold(&self) -> bool {
        self.consecutive_share_edge
            && self.distant_sets_nearly_disjoint
            && self.external_triangles == 0
            && self.max_degree <= self.degree_cap
    }
}

pub fn check_set_system(chain: &Chain, degree_cap: usize) -> Result<SetSystemReport> {
    chain.check_shape()?;
    let sets = &chain.cliques;
    let consecutive_share_edge = (0..sets.len().saturating_sub(1)).all(|i| {
        let common: Vec<usize> = sets[i]
            .iter()
            .copied()
            .filter(|v| sets[i + 1].contains(v))
            .collect();
        common.len() == 2 && EdgeId::new(common[0], common[1]) == chain.shared_edges[i + 1]
    });
    let index = SetSystemIndex::new(chain.n, sets);
    let distant_sets_nearly_disjoint = index.owners.values().all(|owners| {
        owners
            .iter()
            .all(|&i| owners.iter().all(|&j| i.abs_diff(j) < 2))
    });
    let mut degree = vec![0usize; chain.n];
    for s in sets {
        for &v in s {
            degree[v] += 1;
        }
    }
    Ok(SetSystemReport {
        consecutive_share_edge,
        distant_sets_nearly_disjoint,
        external_triangles: index.count_violations(),
        max_degree: degree.into_iter().max().unwrap_or(0),
        degree_cap,
    })
}

/// Summary emitted by the `verify-chain` command.
#[derive(Clone, Debug, Serialize)]
pub struct ChainVerification {
    pub valid: bool,
    pub good: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    pub triangle_violations: usize,
}

pub fn verify_chain(chain: &Chain) -> Result<ChainVerification> {
    let valid = is_valid_chain(chain)?;
    let witness = find_external_kr_minus(chain)?;
    let triangle_violations = SetSystemIndex::new(chain.n, &chain.cliques).count_violations();
    Ok(ChainVerification {
        valid,
        good: valid && witness.is_none(),
        witness,
        triangle_violations,
    })
}
