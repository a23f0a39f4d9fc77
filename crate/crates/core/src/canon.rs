//! Upper-triangle codes and canonical forms for small graphs.
//!
//! A graph on `n <= 11` vertices is packed into a `u64` whose most
//! significant used bit is the pair `(0,1)`, then `(0,2)`, …, `(n-2,n-1)`.
//! Numeric order of codes therefore equals lexicographic order of the
//! corresponding `0`/`1` strings.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest `n` whose upper triangle fits a `u64`.
pub const MAX_CODE_VERTICES: usize = 11;
/// Largest `n` accepted by [`canonical_form`] (`n!` relabelings).
pub const MAX_CANON_VERTICES: usize = 8;

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Row-major index of the pair `u < v` among all pairs of `0..n`.
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// All pairs of `0..n` in index order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

#[inline]
fn code_bit(l: usize, p: usize) -> u64 {
    1u64 << (l - 1 - p)
}

pub fn graph_code(g: &Graph) -> Result<u64> {
    let n = g.n();
    if n > MAX_CODE_VERTICES {
        return Err(Error::Capability {
            what: "upper-triangle code",
            cap: format!("n = {MAX_CODE_VERTICES}"),
            got: format!("n = {n}"),
        });
    }
    let l = pair_count(n);
    Ok(g.edges()
        .map(|e| code_bit(l, pair_index(n, e.u as usize, e.v as usize)))
        .fold(0, |a, b| a | b))
}

/// Inverse of [`graph_code`]; bits beyond the pair count are ignored.
pub fn graph_from_code(n: usize, code: u64) -> Graph {
    assert!(n <= MAX_CODE_VERTICES);
    let l = pair_count(n);
    let mut g = Graph::new(n);
    for (p, (u, v)) in pairs(n).into_iter().enumerate() {
        if code & code_bit(l, p) != 0 {
            g.add_edge(u, v);
        }
    }
    g
}

pub fn code_string(code: u64, l: usize) -> String {
    (0..l)
        .map(|p| if code & code_bit(l, p) != 0 { '1' } else { '0' })
        .collect()
}

pub fn parse_code_string(s: &str) -> Option<u64> {
    if s.len() > 64 {
        return None;
    }
    s.chars().try_fold(0u64, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// Upper-triangle `0`/`1` string of any graph, pair `(0,1)` first.
pub fn adjacency_string(g: &Graph) -> String {
    let n = g.n();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| if g.has_edge(u, v) { '1' } else { '0' })
        .collect()
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// For every relabeling of `0..n`, where each code bit moves to.
pub struct PermutationTable {
    n: usize,
    l: usize,
    /// `images[k][b]` = destination bit of source bit `b` under permutation k.
    images: Vec<Vec<u8>>,
}

impl PermutationTable {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_CANON_VERTICES {
            return Err(Error::Capability {
                what: "permutation enumeration",
                cap: format!("n = {MAX_CANON_VERTICES}"),
                got: format!("n = {n}"),
            });
        }
        let l = pair_count(n);
        let ps = pairs(n);
        let images = permutations(n)
            .into_iter()
            .map(|perm| {
                let mut img = vec![0u8; l];
                for (p, &(u, v)) in ps.iter().enumerate() {
                    let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
                    let q = pair_index(n, a, b);
                    img[l - 1 - p] = (l - 1 - q) as u8;
                }
                img
            })
            .collect();
        Ok(Self { n, l, images })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    fn apply(img: &[u8], mut code: u64) -> u64 {
        let mut out = 0;
        while code != 0 {
            let b = code.trailing_zeros() as usize;
            code &= code - 1;
            out |= 1u64 << img[b];
        }
        out
    }

    /// Every code in the isomorphism class of `code` (with repeats).
    pub fn orbit(&self, code: u64) -> impl Iterator<Item = u64> + '_ {
        self.images.iter().map(move |img| Self::apply(img, code))
    }

    pub fn canonical_code(&self, code: u64) -> u64 {
        self.orbit(code).min().unwrap_or(code)
    }
}

/// Lexicographically smallest upper-triangle bitstring over all relabelings.
pub fn canonical_form(g: &Graph) -> Result<String> {
    let table = PermutationTable::new(g.n())?;
    let code = graph_code(g)?;
    Ok(code_string(table.canonical_code(code), table.pair_count()))
}
