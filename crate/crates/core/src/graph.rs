//! Dense labeled graphs on vertices `0..n` stored as adjacency bitrows.

use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitset::{popcount, words_for, Ones, VertexSet};
use crate::error::{input, Error, Result};

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 1 << 16;

/// An unordered vertex pair `{u, v}` stored with `u < v`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub u: u32,
    pub v: u32,
}

impl EdgeId {
    /// Normalizes the endpoint order. Panics on a loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Self {
            u: u as u32,
            v: v as u32,
        }
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }

    pub fn contains(self, x: usize) -> bool {
        self.u as usize == x || self.v as usize == x
    }

    pub fn shares_vertex(self, other: EdgeId) -> bool {
        self.contains(other.u as usize) || self.contains(other.v as usize)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

impl Serialize for EdgeId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.u, self.v].serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[u32; 2]>::deserialize(d)?;
        if a == b {
            return Err(serde::de::Error::custom(format!("loop edge [{a},{b}]")));
        }
        Ok(EdgeId::new(a as usize, b as usize))
    }
}

/// Simple undirected graph with a fixed vertex count.
///
/// Row `v` is the neighbour mask of `v`. Each row also keeps the range of
/// words that may hold set bits, so intersections of sparse or banded rows
/// only touch the overlapping words. The range only grows.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    edge_count: usize,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    ///
    /// # Panics
    /// If `n == 0` or `n > MAX_VERTICES`.
    pub fn new(n: usize) -> Self {
        assert!(
            (1..=MAX_VERTICES).contains(&n),
            "vertex count {n} outside 1..={MAX_VERTICES}"
        );
        let words = words_for(n);
        Self {
            n,
            words,
            rows: vec![0; n * words],
            lo: vec![u32::MAX; n],
            hi: vec![0; n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Builds a graph from an edge iterator, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return input(format!("vertex count {n} outside 1..={MAX_VERTICES}"));
        }
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `n(n-1)/2`.
    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count == self.pair_count()
    }

    pub(crate) fn word_len(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        popcount(self.row(v))
    }

    pub fn neighbors(&self, v: usize) -> Ones<'_> {
        Ones::new(self.row(v))
    }

    pub fn neighbor_set(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.row(v).to_vec())
    }

    fn set_bit(&mut self, u: usize, v: usize) {
        let w = v / 64;
        self.rows[u * self.words + w] |= 1u64 << (v % 64);
        self.lo[u] = self.lo[u].min(w as u32);
        self.hi[u] = self.hi[u].max(w as u32);
    }

    /// Inserts `uv`; returns whether it was absent. Panics on a loop or an
    /// out-of-range endpoint.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v && u < self.n && v < self.n, "bad edge ({u},{v}) for n={}", self.n);
        if self.has_edge(u, v) {
            return false;
        }
        self.set_bit(u, v);
        self.set_bit(v, u);
        self.edge_count += 1;
        true
    }

    /// Checked insertion used by loaders: duplicates are errors.
    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return input(format!("edge ({u},{v}) out of range for n={}", self.n));
        }
        if u == v {
            return input(format!("loop at vertex {u}"));
        }
        if !self.add_edge(u, v) {
            return input(format!("duplicate edge ({u},{v})"));
        }
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.has_edge(u, v) {
            return false;
        }
        self.rows[u * self.words + v / 64] &= !(1u64 << (v % 64));
        self.rows[v * self.words + u / 64] &= !(1u64 << (u % 64));
        self.edge_count -= 1;
        true
    }

    /// All edges in increasing `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.n).flat_map(move |u| {
            let start = (u + 1) / 64;
            Ones::new(&self.row(u)[start..])
                .map(move |i| start * 64 + i)
                .filter(move |&v| v > u)
                .map(move |v| EdgeId::new(u, v))
        })
    }

    /// Word range that may hold neighbours of `v`; `None` when `v` never had any.
    #[inline]
    pub(crate) fn span(&self, v: usize) -> Option<(usize, usize)> {
        let (lo, hi) = (self.lo[v], self.hi[v]);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    /// Whether `u` and `v` have a common neighbour.
    #[inline]
    pub(crate) fn rows_intersect(&self, u: usize, v: usize) -> bool {
        let lo = self.lo[u].max(self.lo[v]) as usize;
        let hi = self.hi[u].min(self.hi[v]) as usize;
        if lo > hi {
            return false;
        }
        let (a, b) = (self.row(u), self.row(v));
        (lo..=hi).any(|w| a[w] & b[w] != 0)
    }

    /// Writes `N(u) ∩ N(v)` into `buf` (length `word_len`); returns its size.
    pub(crate) fn common_neighbors_into(&self, u: usize, v: usize, buf: &mut [u64]) -> usize {
        buf.iter_mut().for_each(|w| *w = 0);
        let lo = self.lo[u].max(self.lo[v]) as usize;
        let hi = self.hi[u].min(self.hi[v]) as usize;
        let mut count = 0;
        if lo <= hi {
            let (a, b) = (self.row(u), self.row(v));
            for w in lo..=hi {
                buf[w] = a[w] & b[w];
                count += buf[w].count_ones() as usize;
            }
        }
        count
    }

    /// Common neighbourhood of two distinct vertices.
    pub fn common_neighbors(&self, u: usize, v: usize) -> Result<VertexSet> {
        if u >= self.n || v >= self.n {
            return input(format!("vertex out of range: ({u},{v}) with n={}", self.n));
        }
        if u == v {
            return input(format!("common_neighbors needs distinct vertices, got {u} twice"));
        }
        let mut buf = vec![0; self.words];
        self.common_neighbors_into(u, v, &mut buf);
        Ok(VertexSet::from_words(self.n, buf))
    }

    /// Does the subgraph induced on `mask` contain a `K_k`?
    pub fn has_clique(&self, mask: &VertexSet, k: usize) -> bool {
        assert_eq!(mask.capacity(), self.n, "mask universe differs from graph");
        let mut m = mask.as_words().to_vec();
        clique_in(self, &mut m, k)
    }

    /// Largest clique size within `mask`.
    pub fn clique_number(&self, mask: &VertexSet) -> usize {
        let mut k = 0;
        while self.has_clique(mask, k + 1) {
            k += 1;
        }
        k
    }

    /// Copy with vertex `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return input(format!("permutation length {} != n={}", perm.len(), self.n));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return input("relabeling is not a permutation");
            }
        }
        let mut g = Graph::new(self.n);
        for e in self.edges() {
            let (u, v) = e.endpoints();
            g.add_edge(perm[u], perm[v]);
        }
        Ok(g)
    }

    /// Reads the edge-list text format: a header `n <count>` followed by one
    /// `u v` line per edge with `u < v`. Blank lines and `#` comments are
    /// skipped.
    pub fn read_edge_list(reader: impl BufRead) -> Result<Graph> {
        let mut g: Option<Graph> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let toks: Vec<&str> = text.split_whitespace().collect();
            let perr = |msg: String| Error::Parse { line: lineno, msg };
            match g.as_mut() {
                None => {
                    if toks.len() != 2 || toks[0] != "n" {
                        return Err(perr(format!("expected header `n <count>`, got `{text}`")));
                    }
                    let n: usize = toks[1]
                        .parse()
                        .map_err(|_| perr(format!("bad vertex count `{}`", toks[1])))?;
                    if n == 0 || n > MAX_VERTICES {
                        return Err(perr(format!("vertex count {n} outside 1..={MAX_VERTICES}")));
                    }
                    g = Some(Graph::new(n));
                }
                Some(graph) => {
                    if toks.len() != 2 {
                        return Err(perr(format!("expected `u v`, got `{text}`")));
                    }
                    let parse = |t: &str| {
                        t.parse::<usize>()
                            .map_err(|_| perr(format!("bad vertex label `{t}`")))
                    };
                    let (u, v) = (parse(toks[0])?, parse(toks[1])?);
                    if u >= v {
                        return Err(perr(format!("edge `{u} {v}` must satisfy u < v")));
                    }
                    graph.try_add_edge(u, v).map_err(|e| perr(e.to_string()))?;
                }
            }
        }
        g.ok_or(Error::Parse {
            line: 0,
            msg: "empty edge list: missing `n <count>` header".into(),
        })
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        Self::read_edge_list(text.as_bytes())
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for e in self.edges() {
            out.push_str(&format!("{} {}\n", e.u, e.v));
        }
        out
    }
}

/// Clique search on an induced word mask. `mask` is consumed as scratch.
///
/// Branch and bound: peel vertices whose induced degree is below `k - 1`,
/// reject when a greedy colouring uses fewer than `k` colours, then branch on
/// a minimum-degree vertex (include it, or drop it and continue).
pub(crate) fn clique_in(g: &Graph, mask: &mut [u64], k: usize) -> bool {
    if k == 0 {
        return true;
    }
    loop {
        let count = popcount(mask);
        if count < k {
            return false;
        }
        if k == 1 {
            return true;
        }
        if k == 2 {
            return Ones::new(mask).any(|v| and_nonzero(g.row(v), mask));
        }

        // k-core style peeling; also finds a minimum-degree pivot.
        let mut pivot = None;
        loop {
            let mut peeled = false;
            let mut best = usize::MAX;
            let members: Vec<usize> = Ones::new(mask).collect();
            for &v in &members {
                let d = and_count(g.row(v), mask);
                if d + 1 < k {
                    mask[v / 64] &= !(1u64 << (v % 64));
                    peeled = true;
                } else if d < best {
                    best = d;
                    pivot = Some(v);
                }
            }
            if !peeled {
                break;
            }
            pivot = None;
        }
        let Some(v) = pivot else {
            return false;
        };
        if popcount(mask) < k || colour_bound(g, mask) < k {
            return false;
        }
        let mut sub: Vec<u64> = mask.iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
        if clique_in(g, &mut sub, k - 1) {
            return true;
        }
        mask[v / 64] &= !(1u64 << (v % 64));
    }
}

fn colour_bound(g: &Graph, mask: &[u64]) -> usize {
    let mut uncoloured = mask.to_vec();
    let mut colours = 0;
    let mut avail = vec![0u64; mask.len()];
    while uncoloured.iter().any(|&w| w != 0) {
        colours += 1;
        avail.copy_from_slice(&uncoloured);
        while let Some(v) = Ones::new(&avail).next() {
            uncoloured[v / 64] &= !(1u64 << (v % 64));
            avail[v / 64] &= !(1u64 << (v % 64));
            for (a, r) in avail.iter_mut().zip(g.row(v)) {
                *a &= !r;
            }
        }
    }
    colours
}

#[inline]
fn and_nonzero(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

#[inline]
fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn common_neighbors_examples() {
        let p = path(3);
        assert_eq!(p.common_neighbors(0, 2).unwrap().to_vec(), vec![1]);
        assert!(Graph::new(6).common_neighbors(1, 4).unwrap().is_empty());
        assert_eq!(
            Graph::complete(5).common_neighbors(0, 1).unwrap().to_vec(),
            vec![2, 3, 4]
        );
    }

    #[test]
    fn common_neighbors_rejects_bad_vertices() {
        let g = path(3);
        assert!(matches!(g.common_neighbors(0, 3), Err(Error::Input(_))));
        assert!(matches!(g.common_neighbors(1, 1), Err(Error::Input(_))));
    }

    #[test]
    fn has_clique_examples() {
        let k4 = Graph::complete(4);
        assert!(k4.has_clique(&VertexSet::full(4), 3));
        assert!(k4.has_clique(&VertexSet::full(4), 4));
        assert!(!k4.has_clique(&VertexSet::full(4), 5));

        let c6 = cycle(6);
        assert!(!c6.has_clique(&VertexSet::full(6), 3));

        let c5 = cycle(5);
        let all = VertexSet::full(5);
        assert!(c5.has_clique(&all, 2));
        assert!(!c5.has_clique(&all, 3));
        assert!(c5.has_clique(&VertexSet::empty(5), 0));
        assert!(!c5.has_clique(&VertexSet::empty(5), 1));
        assert!(c5.has_clique(&VertexSet::from_vertices(5, [3]), 1));
    }

    #[test]
    fn edges_are_sorted_across_word_boundaries() {
        let g = Graph::from_edges(130, [(70, 129), (0, 64), (63, 64), (0, 1)]).unwrap();
        let es: Vec<_> = g.edges().map(|e| e.endpoints()).collect();
        assert_eq!(es, vec![(0, 1), (0, 64), (63, 64), (70, 129)]);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn edge_list_roundtrip_and_errors() {
        let g = path(4);
        let text = g.to_edge_list();
        assert_eq!(text, "n 4\n0 1\n1 2\n2 3\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);

        assert!(matches!(Graph::parse_edge_list(""), Err(Error::Parse { .. })));
        assert!(Graph::parse_edge_list("n 3\n0 1\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("n 3\n0 3\n").is_err());
        assert!(Graph::parse_edge_list("n 3\n2 1\n").is_err());
        assert!(Graph::parse_edge_list("n 0\n").is_err());
        assert!(Graph::parse_edge_list("3\n").is_err());
        assert_eq!(
            Graph::parse_edge_list("# comment\nn 3\n\n0 2 # trailing\n")
                .unwrap()
                .edge_count(),
            1
        );
    }

    #[test]
    fn relabel_preserves_edge_count() {
        let g = path(5);
        let h = g.relabel(&[4, 3, 2, 1, 0]).unwrap();
        assert!(h.has_edge(4, 3));
        assert_eq!(h.edge_count(), 4);
        assert!(g.relabel(&[0, 0, 1, 2, 3]).is_err());
    }

    #[test]
    fn remove_edge_updates_count() {
        let mut g = Graph::complete(4);
        assert!(g.remove_edge(2, 3));
        assert!(!g.remove_edge(2, 3));
        assert_eq!(g.edge_count(), 5);
        assert!(g.rows_intersect(2, 3));
    }
}
